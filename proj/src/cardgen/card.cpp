#include "qualdash/cardgen/card.hpp"

#include <algorithm>

#include "qualdash/aggregate/filter.hpp"

namespace qualdash::cardgen {

using aggregate::AggregateError;

std::string_view to_string(CardState s) { return s == CardState::entry ? "entry" : "expanded"; }

std::optional<CardState> parse_card_state(std::string_view s) {
    if (s == "entry") return CardState::entry;
    if (s == "expanded") return CardState::expanded;
    return std::nullopt;
}

EncodingPlan plan_encoding(const mss::MetricSpec& spec) {
    EncodingPlan plan;
    plan.chart = spec.chart_or_default();
    std::vector<RuleKind> kinds;
    for (const auto& [name, measure] : spec.measures) {
        const RuleKind k = spec.rule_for(name);
        auto it = std::find(kinds.begin(), kinds.end(), k);
        if (it == kinds.end()) {
            if (kinds.size() == 2) {
                throw CardError("metric '" + spec.metric + "' mixes more than two aggregation rules");
            }
            kinds.push_back(k);
            it = kinds.end() - 1;
        }
        (it == kinds.begin() ? plan.bar_measures : plan.line_measures).push_back(name);
        plan.palette.emplace_back(name, static_cast<int>(std::min<std::size_t>(plan.palette.size(), 4)));
    }
    for (std::size_t i = 0; i < spec.subsidiary.quantities.size(); ++i) {
        plan.quantity_palette.emplace_back(spec.subsidiary.quantities[i].field,
                                           kQuantityPaletteOffset + static_cast<int>(std::min<std::size_t>(i, 4)));
    }
    return plan;
}

std::string EventInstance::text() const {
    std::string out = "Last " + name + ": " + dataio::format_date(date) + " (record " + record_id + ")";
    if (!desc.empty()) out += ". " + desc;
    return out;
}

std::optional<EventInstance> latest_event(const dataio::DataTable& table, const mss::EventSpec& event) {
    const std::size_t dcol = aggregate::column_of(table, event.date);
    const std::size_t icol = aggregate::column_of(table, event.id);
    std::optional<EventInstance> best;
    for (const auto& rec : table.rows()) {
        auto d = dataio::as_date(rec[dcol]);
        if (!d) continue;
        std::string id = dataio::value_text(rec[icol]);
        if (!best || *d > best->date || (*d == best->date && id > best->record_id)) {
            best = EventInstance{event.name, *d, event.desc, std::move(id)};
        }
    }
    return best;
}

namespace {

std::string describe_field(const dataio::DataTable& table, const std::string& field) {
    const auto* info = table.schema().find(field);
    return info ? info->description : std::string();
}

std::size_t intersection_size(const RowSet& a, const RowSet& b) {
    std::size_t n = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++n;
            ++i;
            ++j;
        }
    }
    return n;
}

std::vector<std::pair<Granularity, std::vector<std::string>>> times_or_default(const mss::MetricSpec& spec) {
    if (!spec.subsidiary.times.empty()) return spec.subsidiary.times;
    std::vector<std::string> all;
    for (const auto& [name, m] : spec.measures) all.push_back(name);
    return {{Granularity::month, std::move(all)}};
}

}  // namespace

SelectionInfo selection_info(const CardContext& ctx, const RowSet& cohort, const Selection& selection) {
    SelectionInfo info;
    info.active = !selection.empty();
    info.total = cohort.size();
    const RowSet selected = info.active ? aggregate::apply_selection(ctx.table, ctx.spec, cohort, selection,
                                                                     ctx.xfield, ctx.timeframe, ctx.primary_key)
                                        : RowSet{};
    info.selected = selected.size();
    for (const auto& [name, measure] : ctx.spec.measures) {
        const RowSet rows = aggregate::filter_records(ctx.table, measure, ctx.timeframe, ctx.xfield);
        info.total_per_measure.emplace_back(name, rows.size());
        info.selected_per_measure.emplace_back(name, intersection_size(rows, selected));
    }
    return info;
}

std::vector<CategoryTab> build_category_tabs(const CardContext& ctx, const RowSet& cohort) {
    std::vector<CategoryTab> out;
    for (const auto& field : ctx.spec.subsidiary.categories) {
        out.push_back(CategoryTab{field, describe_field(ctx.table, field),
                                  aggregate::distribution_of(ctx.table, cohort, field)});
    }
    return out;
}

std::vector<QuantityTab> build_quantity_tabs(const CardContext& ctx, const RowSet& cohort) {
    std::vector<QuantityTab> out;
    const auto& qs = ctx.spec.subsidiary.quantities;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        BinSeries s = aggregate::series_over_rows(ctx.table, cohort, ctx.xfield, qs[i].field, qs[i].aggregate,
                                                  ctx.granularity, ctx.timeframe);
        s.measure = qs[i].field;
        out.push_back(QuantityTab{qs[i].field, describe_field(ctx.table, qs[i].field),
                                  kQuantityPaletteOffset + static_cast<int>(std::min<std::size_t>(i, 4)),
                                  std::move(s)});
    }
    return out;
}

std::vector<TimesTab> build_times_tabs(const CardContext& ctx) {
    std::vector<TimesTab> out;
    const int tspan = ctx.spec.subsidiary.tspan_or_default();
    for (const auto& [gran, measures] : times_or_default(ctx.spec)) {
        TimesTab tab;
        tab.granularity = gran;
        for (const auto& m : measures) {
            tab.measures.emplace_back(m, aggregate::yearly_context(ctx.table, ctx.spec, m, ctx.xfield, gran, tspan,
                                                                   ctx.timeframe, ctx.convention));
        }
        out.push_back(std::move(tab));
    }
    return out;
}

CardViewModel build_card(const CardContext& ctx, CardState state) {
    const auto& spec = ctx.spec;
    try {
        CardViewModel card;
        card.title = spec.metric;
        card.slug = mss::slugify(spec.metric);
        card.state = state;
        card.timeframe = ctx.timeframe;
        card.granularity = ctx.granularity;

        MainView& main = card.main;
        for (const auto& [name, measure] : spec.measures) {
            BinSeries s = aggregate::measure_series(ctx.table, measure, spec.rule_for(name), ctx.xfield,
                                                    ctx.granularity, ctx.timeframe, ctx.convention);
            s.measure = name;
            main.series.push_back(std::move(s));
        }
        main.encoding = plan_encoding(spec);
        main.quality = aggregate::quality_stats(ctx.table, spec, ctx.timeframe, ctx.xfield);
        main.quality_line = main.quality.summary();
        main.mark = spec.mark_or_default();
        main.ylabel = spec.ylabel.value_or("");
        if (spec.legend.empty()) {
            for (const auto& [name, m] : spec.measures) main.legend.push_back(name);
        } else {
            main.legend = spec.legend;
        }

        if (spec.event) card.event = latest_event(ctx.table, *spec.event);
        std::vector<std::string> parts;
        if (spec.desc && !spec.desc->empty()) parts.push_back(*spec.desc);
        parts.push_back(main.quality_line);
        if (card.event) parts.push_back(card.event->text());
        for (std::size_t i = 0; i < parts.size(); ++i) card.description += (i ? "\n" : "") + parts[i];

        const RowSet cohort = aggregate::cohort_rows(ctx.table, spec, ctx.timeframe, ctx.xfield);
        card.selection_info = selection_info(ctx, cohort, Selection{});
        if (state == CardState::expanded) {
            Tabs tabs;
            tabs.categories = build_category_tabs(ctx, cohort);
            tabs.quantities = build_quantity_tabs(ctx, cohort);
            tabs.times = build_times_tabs(ctx);
            card.tabs = std::move(tabs);
        }
        return card;
    } catch (const AggregateError& e) {
        throw CardError(spec.metric + ": " + e.what());
    } catch (const dataio::DataError& e) {
        throw CardError(spec.metric + ": " + e.what());
    }
}

namespace {

Json timeframe_json(const Timeframe& tf) {
    return Json{{"from", dataio::format_date(tf.from)}, {"to", dataio::format_date(tf.to)}};
}

Json palette_json(const mss::OrderedMap<int>& palette) {
    Json out = Json::object();
    for (const auto& [name, idx] : palette) {
        out[name] = Json{{"index", idx}, {"color", std::string(kPalette[static_cast<std::size_t>(idx)])}};
    }
    return out;
}

}  // namespace

Json category_tab_to_json(const CategoryTab& t) {
    return Json{{"field", t.field},
                {"description", t.description},
                {"distribution", aggregate::distribution_to_json(t.distribution)}};
}

namespace {

Json quantity_json(const QuantityTab& t) {
    return Json{{"field", t.field},
                {"description", t.description},
                {"palette_index", t.palette_index},
                {"color", std::string(kPalette[static_cast<std::size_t>(t.palette_index)])},
                {"series", aggregate::series_to_json(t.series)}};
}

Json times_json(const TimesTab& t) {
    Json measures = Json::array();
    for (const auto& [name, years] : t.measures) {
        Json ys = Json::array();
        for (const auto& y : years) {
            ys.push_back(Json{{"year", y.year},
                              {"rule", std::string(mss::to_string(y.series.rule))},
                              {"bins", aggregate::bins_to_json(y.series.bins)}});
        }
        measures.push_back(Json{{"measure", name}, {"years", std::move(ys)}});
    }
    return Json{{"granularity", std::string(mss::to_string(t.granularity))}, {"measures", std::move(measures)}};
}

}  // namespace

Json selection_info_to_json(const SelectionInfo& s) {
    Json per = Json::object();
    for (std::size_t i = 0; i < s.total_per_measure.size(); ++i) {
        per[s.total_per_measure[i].first] =
            Json{{"selected", s.selected_per_measure[i].second}, {"total", s.total_per_measure[i].second}};
    }
    return Json{{"active", s.active}, {"selected", s.selected}, {"total", s.total}, {"measures", std::move(per)}};
}

Json encoding_to_json(const EncodingPlan& plan) {
    return Json{{"bar_measures", plan.bar_measures},
                {"line_measures", plan.line_measures},
                {"chart", std::string(mss::to_string(plan.chart))},
                {"palette", palette_json(plan.palette)}};
}

Json event_to_json(const EventInstance& e) {
    return Json{{"name", e.name},
                {"date", dataio::format_date(e.date)},
                {"desc", e.desc},
                {"record_id", e.record_id},
                {"text", e.text()}};
}

Json card_to_json(const CardViewModel& card) {
    Json main{{"mark", std::string(mss::to_string(card.main.mark))},
              {"ylabel", card.main.ylabel},
              {"legend", card.main.legend},
              {"encoding", encoding_to_json(card.main.encoding)},
              {"series", Json::array()},
              {"quality", aggregate::quality_to_json(card.main.quality)}};
    for (const auto& s : card.main.series) main["series"].push_back(aggregate::series_to_json(s));

    Json out{{"title", card.title},
             {"slug", card.slug},
             {"state", std::string(to_string(card.state))},
             {"description", card.description},
             {"timeframe", timeframe_json(card.timeframe)},
             {"granularity", std::string(mss::to_string(card.granularity))},
             {"main", std::move(main)},
             {"selection_info", selection_info_to_json(card.selection_info)}};
    if (card.event) out["event"] = event_to_json(*card.event);
    if (card.tabs) {
        Json cats = Json::array();
        for (const auto& t : card.tabs->categories) cats.push_back(category_tab_to_json(t));
        Json qs = Json::array();
        for (const auto& t : card.tabs->quantities) qs.push_back(quantity_json(t));
        Json times = Json::array();
        for (const auto& t : card.tabs->times) times.push_back(times_json(t));
        Json defaults = Json::object();
        defaults["categories"] = cats.empty() ? Json(nullptr) : Json(card.tabs->categories.front().field);
        defaults["quantities"] = qs.empty() ? Json(nullptr) : Json(card.tabs->quantities.front().field);
        defaults["times"] = times.empty()
                                ? Json(nullptr)
                                : Json(std::string(mss::to_string(card.tabs->times.front().granularity)));
        out["tabs"] = Json{{"categories", std::move(cats)},
                           {"quantities", std::move(qs)},
                           {"times", std::move(times)},
                           {"default_tab", std::move(defaults)},
                           {"quantity_palette", palette_json(card.main.encoding.quantity_palette)}};
    }
    return out;
}

Json build_tab(const CardContext& ctx, std::string_view subview, std::string_view tab) {
    const auto& spec = ctx.spec;
    try {
        if (subview == "categories") {
            const auto& cats = spec.subsidiary.categories;
            if (std::find(cats.begin(), cats.end(), tab) == cats.end()) {
                throw CardError(spec.metric + ": no category tab '" + std::string(tab) + "'");
            }
            const RowSet cohort = aggregate::cohort_rows(ctx.table, spec, ctx.timeframe, ctx.xfield);
            const std::string field(tab);
            return category_tab_to_json(
                CategoryTab{field, describe_field(ctx.table, field), aggregate::distribution_of(ctx.table, cohort, field)});
        }
        if (subview == "quantities") {
            const RowSet cohort = aggregate::cohort_rows(ctx.table, spec, ctx.timeframe, ctx.xfield);
            const auto& qs = spec.subsidiary.quantities;
            for (std::size_t i = 0; i < qs.size(); ++i) {
                if (qs[i].field != tab) continue;
                BinSeries s = aggregate::series_over_rows(ctx.table, cohort, ctx.xfield, qs[i].field, qs[i].aggregate,
                                                          ctx.granularity, ctx.timeframe);
                s.measure = qs[i].field;
                return quantity_json(QuantityTab{qs[i].field, describe_field(ctx.table, qs[i].field),
                                                 kQuantityPaletteOffset + static_cast<int>(std::min<std::size_t>(i, 4)),
                                                 std::move(s)});
            }
            throw CardError(spec.metric + ": no quantities tab '" + std::string(tab) + "'");
        }
        if (subview == "times") {
            const int tspan = spec.subsidiary.tspan_or_default();
            for (const auto& [gran, measures] : times_or_default(spec)) {
                if (mss::to_string(gran) != tab) continue;
                TimesTab t;
                t.granularity = gran;
                for (const auto& m : measures) {
                    t.measures.emplace_back(m, aggregate::yearly_context(ctx.table, spec, m, ctx.xfield, gran, tspan,
                                                                         ctx.timeframe, ctx.convention));
                }
                return times_json(t);
            }
            throw CardError(spec.metric + ": no times tab '" + std::string(tab) + "'");
        }
        throw CardError("unknown sub-view '" + std::string(subview) + "'");
    } catch (const AggregateError& e) {
        throw CardError(spec.metric + ": " + e.what());
    }
}

}  // namespace qualdash::cardgen
