#include "qualdash/cardgen/brush.hpp"

#include <algorithm>

#include "qualdash/aggregate/filter.hpp"

namespace qualdash::cardgen {

using aggregate::AggregateError;

namespace {

void check_selection(const CardContext& ctx, const Selection& s) {
    if (s.category) {
        const auto& cats = ctx.spec.subsidiary.categories;
        if (std::find(cats.begin(), cats.end(), s.category->field) == cats.end()) {
            throw CardError(ctx.spec.metric + ": '" + s.category->field + "' is not a category tab");
        }
    }
    if (!s.bins.empty()) {
        const auto starts = aggregate::bin_starts(ctx.timeframe, s.granularity);
        for (auto b : s.bins) {
            if (!std::binary_search(starts.begin(), starts.end(), aggregate::bin_start(b, s.granularity))) {
                throw CardError(ctx.spec.metric + ": bin " + dataio::format_date(b) + " lies outside the timeframe");
            }
        }
    }
    if (s.measure && !ctx.spec.find_measure(*s.measure)) {
        throw CardError(ctx.spec.metric + ": no measure '" + *s.measure + "'");
    }
}

std::vector<aggregate::Bin> counts_per_bin(const CardContext& ctx, const RowSet& rows) {
    return aggregate::series_over_rows(ctx.table, rows, ctx.xfield, std::nullopt, RuleKind::count, ctx.granularity,
                                       ctx.timeframe)
        .bins;
}

}  // namespace

std::string record_id(const CardContext& ctx, std::size_t row) {
    if (ctx.primary_key) {
        if (auto col = ctx.table.column(*ctx.primary_key)) return dataio::value_text(ctx.table.at(row, *col));
    }
    return "#" + std::to_string(row);
}

RowSet selected_rows(const CardContext& ctx, const Selection& selection) {
    check_selection(ctx, selection);
    try {
        const RowSet cohort = aggregate::cohort_rows(ctx.table, ctx.spec, ctx.timeframe, ctx.xfield);
        return aggregate::apply_selection(ctx.table, ctx.spec, cohort, selection, ctx.xfield, ctx.timeframe,
                                          ctx.primary_key);
    } catch (const AggregateError& e) {
        throw CardError(ctx.spec.metric + ": " + e.what());
    }
}

LinkedUpdate resolve_brush(const CardContext& ctx, const Selection& selection) {
    check_selection(ctx, selection);
    try {
        LinkedUpdate out;
        out.selection = selection;
        const RowSet cohort = aggregate::cohort_rows(ctx.table, ctx.spec, ctx.timeframe, ctx.xfield);
        auto narrow = [&](const Selection& s) {
            return aggregate::apply_selection(ctx.table, ctx.spec, cohort, s, ctx.xfield, ctx.timeframe,
                                              ctx.primary_key);
        };
        const RowSet selected = narrow(selection);

        const auto starts = aggregate::bin_starts(ctx.timeframe, ctx.granularity);
        std::vector<dataio::Date> brushed;
        for (auto b : selection.bins) brushed.push_back(aggregate::bin_start(b, selection.granularity));
        std::sort(brushed.begin(), brushed.end());
        for (auto s : starts) {
            // a main bin lights up when any brushed bin overlaps it
            const auto end = aggregate::next_bin(s, ctx.granularity);
            bool hit = false;
            for (auto b : brushed) {
                if (b < end && aggregate::next_bin(b, selection.granularity) > s) hit = true;
            }
            out.highlight.push_back(hit);
        }

        out.cohort_counts = counts_per_bin(ctx, cohort);
        if (selection.category) {
            Selection untimed = selection;
            untimed.bins.clear();
            out.overlay = counts_per_bin(ctx, narrow(untimed));
        }

        for (const auto& field : ctx.spec.subsidiary.categories) {
            Selection own = selection;
            if (own.category && own.category->field == field) own.category.reset();
            const RowSet rows = own == selection ? selected : narrow(own);
            const auto* info = ctx.table.schema().find(field);
            out.distributions.push_back(CategoryTab{field, info ? info->description : std::string(),
                                                    aggregate::distribution_of(ctx.table, rows, field)});
        }
        out.selection_info = selection_info(ctx, cohort, selection);
        for (std::size_t r : selected) out.record_ids.push_back(record_id(ctx, r));
        return out;
    } catch (const AggregateError& e) {
        throw CardError(ctx.spec.metric + ": " + e.what());
    }
}

LinkedUpdate resolve_time_brush(const CardContext& ctx, const std::vector<dataio::Date>& bins,
                                const Selection& current) {
    Selection s = current;
    s.bins = bins;
    s.granularity = ctx.granularity;
    return resolve_brush(ctx, s);
}

LinkedUpdate resolve_category_brush(const CardContext& ctx, std::string_view field, std::string_view value,
                                    const Selection& current) {
    Selection s = current;
    s.category = aggregate::CategoryValue{std::string(field), std::string(value)};
    return resolve_brush(ctx, s);
}

Json linked_update_to_json(const LinkedUpdate& u) {
    Json dists = Json::array();
    for (const auto& d : u.distributions) dists.push_back(category_tab_to_json(d));
    Json out{{"selection", aggregate::selection_to_json(u.selection)},
             {"highlight", u.highlight},
             {"cohort_counts", aggregate::bins_to_json(u.cohort_counts)},
             {"overlay", u.overlay ? aggregate::bins_to_json(*u.overlay) : Json(nullptr)},
             {"distributions", std::move(dists)},
             {"selection_info", selection_info_to_json(u.selection_info)},
             {"record_ids", u.record_ids}};
    return out;
}

}  // namespace qualdash::cardgen
