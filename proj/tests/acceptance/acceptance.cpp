// Runs every primary acceptance criterion and prints one PASS/FAIL line each.
// Exits non-zero when any criterion fails.
#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "fixtures.hpp"
#include "generators.hpp"
#include "httplib.h"
#include "invariant_cases.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "qualdash/aggregate/filter.hpp"
#include "qualdash/aggregate/quality.hpp"
#include "qualdash/aggregate/series.hpp"
#include "qualdash/cardgen/brush.hpp"
#include "qualdash/cli/cli.hpp"
#include "qualdash/dataio/synthetic.hpp"
#include "qualdash/dataio/transform.hpp"
#include "qualdash/mss/parser.hpp"
#include "qualdash/mss/validate.hpp"
#include "qualdash/server/http.hpp"
#include "qualdash/server/service.hpp"

using namespace qualdash;
using namespace qualdash::testing;
using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;
using mss::Granularity;
using mss::RuleKind;

namespace {

/// Collects the first few mismatches of one criterion.
class Check {
public:
    void expect(bool ok, const std::string& what) {
        if (ok) return;
        ++failures_;
        if (failures_ <= 5) notes_ << (failures_ > 1 ? "; " : "") << what;
    }
    void note(const std::string& text) { info_ << (info_.tellp() > 0 ? ", " : "") << text; }
    bool ok() const { return failures_ == 0; }
    std::string summary() const {
        if (ok()) return info_.str();
        return std::to_string(failures_) + " mismatch(es): " + notes_.str();
    }

private:
    int failures_ = 0;
    std::ostringstream notes_;
    std::ostringstream info_;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

std::string show(const std::optional<double>& v) { return v ? fmt(*v) : "absent"; }

Json parse_json(const std::string& s) { return Json::parse(s); }

// ---------------------------------------------------------------------------

void gold_standard(Check& c) {
    const auto t0 = Clock::now();
    const auto raw = dataio::generate_synthetic(2024, 500, dataio::builtin_profile("minap"));
    const auto derivations = dataio::parse_derivations(read_fixture("minap_derivations.json"));
    const auto table = dataio::rederive_fields(raw, derivations);
    const auto config = minap_config();
    const auto& spec = *config.find_metric("Gold Standard drugs");
    const auto& measure = *spec.find_measure("MissingGoldStandard");

    std::optional<dataio::Date> lo, hi;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        if (auto d = oracle_date(cell(table, r, "AdmitDate"))) {
            lo = lo ? std::min(*lo, *d) : *d;
            hi = hi ? std::max(*hi, *d) : *d;
        }
    }
    c.expect(lo.has_value(), "no dated records");
    if (!lo) return;
    const aggregate::Timeframe tf{*lo, *hi};
    const auto series = aggregate::measure_series(table, measure, RuleKind::count, "AdmitDate", Granularity::month, tf);
    const double elapsed = seconds_since(t0);

    // per-record loop over the raw drug columns, independent of the derived field
    const std::set<std::string> diagnoses = {"Myocardial infarction (ST elevation)",
                                             "Acute coronary syndrome (troponin positive)/ nSTEMI"};
    const auto keys = oracle_bins(tf.from, tf.to, Granularity::month);
    std::vector<double> expect(keys.size(), 0);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < raw.row_count(); ++r) {
        const auto d = oracle_date(cell(raw, r, "AdmitDate"));
        if (!d) continue;
        bool missing_drug = false;
        for (auto drug : {"betablocker", "aspirin", "statin", "ACEInhibitor", "P2Y12Inhibitor"}) {
            // an unrecorded drug counts as not given
            const auto* b = std::get_if<bool>(&cell(raw, r, drug));
            if (!b || !*b) missing_drug = true;
        }
        const auto& dx = cell(raw, r, "finalDiagnosis");
        const auto* text = std::get_if<std::string>(&dx);
        if (missing_drug && text && diagnoses.count(*text)) {
            expect[*oracle_bin_of(keys, *d, Granularity::month)] += 1;
            ++hits;
        }
    }
    c.expect(series.bins.size() == keys.size(), "bin count differs");
    for (std::size_t i = 0; i < std::min(series.bins.size(), keys.size()); ++i) {
        c.expect(series.bins[i].value == expect[i], "bin " + std::to_string(i) + ": " + show(series.bins[i].value) +
                                                        " vs " + fmt(expect[i]));
    }
    c.expect(hits > 0, "the seeded dataset has no qualifying records");
    c.expect(elapsed < 1.0, "took " + fmt(elapsed) + " s");
    c.note(std::to_string(hits) + " qualifying records over " + std::to_string(keys.size()) + " months in " +
           fmt(elapsed) + " s");
}

// ---------------------------------------------------------------------------

struct ServerWorkspace {
    TempDir dir;

    ServerWorkspace() {
        for (auto name : {"picanet_config.json", "picanet_dictionary.json", "t0.csv"}) dir.copy_fixture(name);
    }
    server::ServerConfig config() const {
        Json j{{"port", 0},
               {"log_path", "usage.ndjson"},
               {"audits", Json::array({Json{{"config", "picanet_config.json"},
                                            {"dictionary", "picanet_dictionary.json"},
                                            {"data", {"t0.csv"}}}})}};
        return server::parse_server_config(j.dump(), dir.path.string());
    }
};

Json dashboard(server::DashboardService& s) {
    return parse_json(s.handle({"GET", "/dashboard/picanet", {}, ""}).body);
}

void card_removal(Check& c) {
    ServerWorkspace w;
    server::DashboardService s(w.config());
    const auto before = dashboard(s);
    const auto original = parse_json(dataio::read_file(w.dir.file("picanet_config.json")));

    for (std::size_t removed = 0; removed < original["metrics"].size(); ++removed) {
        auto reduced = original;
        reduced["metrics"].erase(removed);
        dataio::write_file(w.dir.file("picanet_config.json"), reduced.dump(2));
        c.expect(s.handle({"POST", "/admin/reload", {}, ""}).status == 200, "reload failed");
        const auto after = dashboard(s);
        c.expect(after["cards"].size() == before["cards"].size() - 1, "card count after removal");
        for (std::size_t i = 0, j = 0; i < before["cards"].size(); ++i) {
            if (i == removed) continue;
            c.expect(j < after["cards"].size() && after["cards"][j].dump() == before["cards"][i].dump(),
                     "card " + std::to_string(i) + " changed after removing " + std::to_string(removed));
            ++j;
        }
        dataio::write_file(w.dir.file("picanet_config.json"), original.dump(2));
        c.expect(s.handle({"POST", "/admin/reload", {}, ""}).status == 200, "reload failed");
        const auto restored = dashboard(s);
        c.expect(restored["cards"].dump() == before["cards"].dump(), "restore differs");
    }
    c.note("each of " + std::to_string(original["metrics"].size()) + " cards removed and restored");
}

// ---------------------------------------------------------------------------

void interval_oracle(Check& c) {
    const auto hand = dataio::load_table_file(fixture_path("interval.csv"), picanet_dictionary());
    const auto jan_feb = aggregate::Timeframe{day(2019, 1, 1), day(2019, 2, 28)};
    const auto h = aggregate::interval_series(hand, "AdmitDate", "DischargeDate", Granularity::month, jan_feb);
    c.expect(h.bins.size() == 2 && h.bins[0].value == 4.0 && h.bins[1].value == 2.0, "hand case is not Jan:4, Feb:2");

    const auto table = dataio::generate_synthetic(99, 1000, dataio::builtin_profile("picanet"));
    Rng rng(1000);
    std::size_t compared = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto tf = random_timeframe(rng);
        const auto tf2 = aggregate::Timeframe{std::min(tf.from, day(2018, 6, 1)), std::max(tf.to, day(2020, 6, 30))};
        const auto g = random_granularity(rng);
        for (auto [s, e] : {std::pair{"AdmitDate", "DischargeDate"}, std::pair{"ventStart", "ventEnd"}}) {
            const auto got = aggregate::interval_series(table, s, e, g, tf2);
            const auto want = oracle_interval(table, s, e, g, tf2.from, tf2.to);
            c.expect(got.bins.size() == want.size(), "bin count differs");
            for (std::size_t i = 0; i < std::min(want.size(), got.bins.size()); ++i) {
                c.expect(got.bins[i].value == want[i], std::string(s) + " bin " + std::to_string(i) + ": " +
                                                           show(got.bins[i].value) + " vs " + fmt(want[i]));
                ++compared;
            }
        }
    }
    std::size_t spanning = 0;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        auto a = oracle_date(cell(table, r, "AdmitDate"));
        auto b = oracle_date(cell(table, r, "DischargeDate"));
        if (a && b && aggregate::bin_start(*a, Granularity::month) != aggregate::bin_start(*b, Granularity::month)) {
            ++spanning;
        }
    }
    c.expect(spanning > 0, "no stays span a month boundary");
    c.note(std::to_string(compared) + " bins compared, " + std::to_string(spanning) + " stays span months");
}

// ---------------------------------------------------------------------------

void aggregation_oracle(Check& c) {
    Rng rng(200);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = trial % 20 == 0 ? 10000 : std::size_t(rng.between(0, 3000));
        const auto t = random_table(rng, n);
        const auto rule = random_rule(rng);
        const auto m = random_measure(rng, rule);
        const auto tf = random_timeframe(rng);
        const auto g = random_granularity(rng);
        const std::string tag = "case " + std::to_string(trial);
        const auto got = aggregate::measure_series(t, m, rule, "Admit", g, tf);
        const auto want = oracle_series(t, m, rule, "Admit", g, tf.from, tf.to);
        c.expect(got.bins.size() == want.size(), tag + " bin count");
        for (std::size_t i = 0; i < std::min(want.size(), got.bins.size()); ++i) {
            const bool exact = rule == RuleKind::count || rule == RuleKind::sum;
            c.expect(exact ? got.bins[i].value == want[i] : close(got.bins[i].value, want[i]),
                     tag + " bin " + std::to_string(i) + ": " + show(got.bins[i].value) + " vs " + show(want[i]));
        }
        // runningSum is the prefix sum of the matching base series
        auto base_rule = m.field ? RuleKind::sum : RuleKind::count;
        const auto base = aggregate::measure_series(t, m, base_rule, "Admit", g, tf);
        const auto run = aggregate::measure_series(t, m, RuleKind::running_sum, "Admit", g, tf);
        double acc = 0;
        for (std::size_t i = 0; i < base.bins.size(); ++i) {
            acc += base.bins[i].value.value_or(0);
            c.expect(run.bins[i].value == acc, tag + " runningSum prefix at bin " + std::to_string(i));
        }
    }
    c.note("200 cases, 10 with 10k rows");
}

// ---------------------------------------------------------------------------

void quality_conservation(Check& c) {
    Rng rng(300);
    for (int trial = 0; trial < 100; ++trial) {
        const auto t = random_table(rng, std::size_t(rng.between(0, 1000)));
        mss::MetricSpec spec;
        spec.metric = "m";
        for (int i = 0, k = rng.between(1, 4); i < k; ++i) {
            spec.measures.emplace_back("m" + std::to_string(i), random_measure(rng, RuleKind::sum));
        }
        if (rng.chance(0.5)) {
            mss::MeasureSpec iv;
            iv.start = "Start";
            iv.end = "End";
            spec.measures.emplace_back("iv", iv);
        }
        const auto q = aggregate::quality_stats(t, spec, random_timeframe(rng), "Admit");
        for (const auto& f : q.fields) {
            c.expect(f.missing + f.invalid + f.valid == f.total, "field " + f.field + " does not add up");
        }
    }
    const auto config = picanet_config();
    const auto q = aggregate::quality_stats(t0(), config.metrics[0], {day(2019, 1, 1), day(2019, 3, 31)}, "AdmitDate");
    const auto* status = q.find("DischargeStatus");
    c.expect(status && status->missing == 1 && status->invalid == 0 && status->valid == 5,
             "T0 DischargeStatus is not {1, 0, 5}");
    c.note("100 random tables plus T0");
}

// ---------------------------------------------------------------------------

void linking_consistency(Check& c) {
    Rng rng(400);
    for (int trial = 0; trial < 100; ++trial) {
        const auto table = random_table(rng, std::size_t(rng.between(50, 1500)));
        mss::MetricSpec spec;
        spec.metric = "m";
        spec.subsidiary.categories = {"Cat", "Kind"};
        for (int i = 0, k = rng.between(1, 3); i < k; ++i) {
            spec.measures.emplace_back("m" + std::to_string(i), random_measure(rng, RuleKind::count));
        }
        const auto tf = random_timeframe(rng);
        const cardgen::CardContext ctx{spec, table, "Admit", tf, std::string("Key")};
        std::vector<dataio::Date> bins;
        for (auto s : aggregate::bin_starts(tf, Granularity::month)) {
            if (rng.chance(0.3)) bins.push_back(s);
        }
        const std::string field = rng.chance(0.5) ? "Cat" : "Kind";
        const std::string value = field == "Cat" ? rng.pick<std::string>({"a", "b", "c", "d"})
                                                 : rng.pick<std::string>({"x", "y"});
        const std::string tag = "brush " + std::to_string(trial);

        const auto time_first =
            cardgen::resolve_category_brush(ctx, field, value, cardgen::resolve_time_brush(ctx, bins).selection);
        const auto category_first =
            cardgen::resolve_time_brush(ctx, bins, cardgen::resolve_category_brush(ctx, field, value).selection);
        c.expect(time_first.record_ids == category_first.record_ids, tag + " paths disagree");

        const auto time_only = cardgen::resolve_time_brush(ctx, bins);
        for (const auto* u : {&time_only, &time_first}) {
            for (const auto& tab : u->distributions) {
                if (u->selection.category && u->selection.category->field == tab.field) continue;
                std::size_t sum = 0;
                for (const auto& e : tab.distribution.entries) sum += e.count;
                const std::size_t cohort = u->selection.empty() ? aggregate::cohort_rows(table, spec, tf, "Admit").size()
                                                                : u->record_ids.size();
                c.expect(sum == cohort, tag + " " + tab.field + " sums to " + std::to_string(sum) + " not " +
                                            std::to_string(cohort));
            }
        }
    }
    c.note("100 brushes");
}

// ---------------------------------------------------------------------------

void parser_round_trip(Check& c) {
    Rng rng(500);
    for (int i = 0; i < 1000; ++i) {
        const auto cfg = random_config(rng);
        const auto parsed = mss::parse_config(mss::serialize_config(cfg));
        c.expect(parsed == cfg, "config " + std::to_string(i) + " changed");
    }
    std::size_t invariants = 0;
    for (const auto& ic : invariant_cases()) {
        const auto r = mss::validate_config(mss::parse_config(wrap_metrics(ic.metrics)), small_dictionary());
        c.expect(r.errors.size() == 1 && r.errors[0].code == ic.code && r.errors[0].path == ic.path,
                 ic.code + " not reported as expected");
        ++invariants;
    }
    c.note("1000 round trips, " + std::to_string(invariants) + " invariants");
}

// ---------------------------------------------------------------------------

bool has_key(const Json& j, const std::string& key) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            if (k == key || has_key(v, key)) return true;
        }
    } else if (j.is_array()) {
        for (const auto& v : j) {
            if (has_key(v, key)) return true;
        }
    }
    return false;
}

void api_contract(Check& c) {
    ServerWorkspace w;
    server::DashboardService s(w.config());
    server::HttpServer http(s);
    const int port = http.start("127.0.0.1", 0);
    httplib::Client client("127.0.0.1", port);

    auto res = client.Get("/dashboard/picanet");
    c.expect(res && res->status == 200, "dashboard request failed");
    if (!res) return;
    const auto j = parse_json(res->body);
    const auto configured = picanet_config().metrics.size();
    c.expect(configured == 4 && j["cards"].size() == configured, "expected 4 entry cards");
    for (const auto& card : j["cards"]) {
        c.expect(card["state"] == "entry", "card not in entry state");
        for (auto key : {"tabs", "categories", "quantities", "times", "distribution", "quantity_palette"}) {
            c.expect(!has_key(card, key), std::string("entry payload carries ") + key);
        }
    }

    std::atomic<int> accepted{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&, t] {
            httplib::Client cl("127.0.0.1", port);
            for (int i = t; i < 1000; i += 8) {
                Json e{{"timestamp", "2026-01-01T10:00:00Z"},
                       {"session", "s" + std::to_string(i % 17)},
                       {"action", "brush"},
                       {"metric", "Mortality in unit"},
                       {"detail", {{"position", i}}}};
                auto r = cl.Post("/logs", e.dump(), "application/json");
                if (r && r->status == 204) ++accepted;
            }
        });
    }
    for (auto& t : threads) t.join();
    http.stop();

    std::ifstream in(w.dir.file("usage.ndjson"));
    std::set<int> positions;
    std::size_t lines = 0;
    for (std::string line; std::getline(in, line);) {
        ++lines;
        try {
            positions.insert(parse_json(line)["detail"]["position"].get<int>());
        } catch (const std::exception&) {
            c.expect(false, "unparseable log line");
        }
    }
    c.expect(accepted == 1000, std::to_string(accepted.load()) + " posts accepted");
    c.expect(lines == 1000 && positions.size() == 1000, std::to_string(lines) + " log lines");
    c.note("4 entry cards, " + std::to_string(lines) + " log lines");
}

// ---------------------------------------------------------------------------

int cli(std::vector<std::string> args, std::string* out = nullptr) {
    std::ostringstream o, e;
    const int code = cli::run(args, o, e);
    if (out) *out = o.str();
    if (code != 0) std::cerr << e.str();
    return code;
}

void end_to_end(Check& c) {
    TempDir dir;
    const auto data = dir.file("extract.csv");
    const auto prepared = dir.file("prepared");
    c.expect(cli({"gen", "--seed", "1", "--n", "100000", "--profile", "picanet", "--out", data}) == 0, "gen failed");

    auto t0 = Clock::now();
    c.expect(cli({"preprocess", "--input", data, "--dictionary", fixture_path("picanet_dictionary.json"), "--config",
                  fixture_path("picanet_config.json"), "--out", prepared}) == 0,
             "preprocess failed");
    const double preprocess_s = seconds_since(t0);
    c.expect(preprocess_s < 10.0, "preprocess took " + fmt(preprocess_s) + " s");

    Json server_cfg{{"port", 0},
                    {"log_path", dir.file("usage.ndjson")},
                    {"audits", Json::array({Json{{"config", fixture_path("picanet_config.json")},
                                                 {"dictionary", fixture_path("picanet_dictionary.json")},
                                                 {"data_dir", prepared}}})}};
    server::DashboardService service(server::parse_server_config(server_cfg.dump(), dir.path.string()));
    server::HttpServer http(service);
    const int port = http.start("127.0.0.1", 0);
    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(30, 0);

    const auto audits = parse_json(client.Get("/audits")->body);
    c.expect(audits["audits"][0]["rows"] == 100000, "server holds " + audits["audits"][0]["rows"].dump() + " rows");

    double slowest = 0;
    std::string slowest_path;
    auto timed = [&](const std::function<httplib::Result()>& call, const std::string& label) {
        const auto start = Clock::now();
        auto r = call();
        const double s = seconds_since(start);
        c.expect(r && r->status == 200, label + " failed");
        if (s > slowest) {
            slowest = s;
            slowest_path = label;
        }
        c.expect(s < 1.0, label + " took " + fmt(s) + " s");
    };
    timed([&] { return client.Get("/dashboard/picanet"); }, "dashboard");
    for (const auto& m : picanet_config().metrics) {
        const auto path = "/card/picanet/" + mss::slugify(m.metric);
        timed([&] { return client.Get(path + "?state=entry"); }, path + " entry");
        timed([&] { return client.Get(path + "?state=expanded"); }, path + " expanded");
        for (const auto& field : m.subsidiary.categories) {
            timed([&] { return client.Get(path + "?subview=categories&tab=" + field); }, path + " tab " + field);
        }
        const std::string brush = R"({"bins":["2019-03-01","2019-04-01"]})";
        timed([&] { return client.Post(path + "/brush", brush, "application/json"); }, path + " brush");
        if (!m.subsidiary.categories.empty()) {
            const auto sel = Json{{"category", {{"field", m.subsidiary.categories[0]}, {"value", "(missing)"}}}}.dump();
            timed([&] { return client.Post(path + "/brush", sel, "application/json"); }, path + " category brush");
        }
    }
    http.stop();

    t0 = Clock::now();
    std::string out;
    c.expect(cli({"query", "--config", fixture_path("picanet_config.json"), "--dictionary",
                  fixture_path("picanet_dictionary.json"), "--data", prepared, "--metric", "mortality-in-unit",
                  "--measure", "DeathsInUnit"},
                 &out) == 0,
             "query failed");
    c.expect(!out.empty(), "query printed nothing");
    c.note("preprocess " + fmt(preprocess_s) + " s, slowest card query " + fmt(slowest) + " s (" + slowest_path +
           "), cli query " + fmt(seconds_since(t0)) + " s");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
        {"gold-standard-series", gold_standard},
        {"card-removal-isolation", card_removal},
        {"interval-oracle", interval_oracle},
        {"aggregation-oracle", aggregation_oracle},
        {"quality-conservation", quality_conservation},
        {"linking-consistency", linking_consistency},
        {"parser-round-trip", parser_round_trip},
        {"api-contract", api_contract},
        {"end-to-end-desk-scale", end_to_end},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Check c;
        try {
            run(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("threw: ") + e.what());
        }
        std::cout << (c.ok() ? "PASS " : "FAIL ") << name << " (" << c.summary() << ")" << std::endl;
        failed += !c.ok();
    }
    return failed == 0 ? 0 : 1;
}
