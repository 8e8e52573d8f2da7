#include "qualdash/cli/cli.hpp"

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "qualdash/aggregate/serialize.hpp"
#include "qualdash/aggregate/timeframe.hpp"
#include "qualdash/dataio/csv.hpp"
#include "qualdash/dataio/io.hpp"
#include "qualdash/dataio/synthetic.hpp"
#include "qualdash/dataio/transform.hpp"
#include "qualdash/mss/error.hpp"
#include "qualdash/mss/parser.hpp"
#include "qualdash/mss/validate.hpp"
#include "qualdash/server/config.hpp"
#include "qualdash/server/generation.hpp"
#include "qualdash/server/http.hpp"
#include "qualdash/server/service.hpp"

namespace qualdash::cli {

namespace fs = std::filesystem;
using aggregate::Json;

namespace {

/// Failure carrying its exit code; the message goes to the error stream.
struct Failure {
    int code;
    std::string message;
};

std::string read_input(const std::string& path) {
    try {
        return dataio::read_file(path);
    } catch (const std::exception& e) {
        throw Failure{kIo, e.what()};
    }
}

void write_output(const std::string& path, std::string_view contents) {
    try {
        dataio::write_file(path, contents);
    } catch (const std::exception& e) {
        throw Failure{kIo, e.what()};
    }
}

mss::DataDictionary read_dictionary(const std::string& path) {
    try {
        return mss::parse_dictionary(read_input(path));
    } catch (const mss::ConfigError& e) {
        throw Failure{kValidation, path + "#" + e.what()};
    }
}

std::vector<dataio::DerivedFieldSpec> read_derivations(const std::string& path) {
    if (path.empty()) return {};
    try {
        return dataio::parse_derivations(read_input(path));
    } catch (const dataio::DataError& e) {
        throw Failure{kValidation, path + ": " + e.what()};
    }
}

/// The dictionary plus the columns the derivations add.
mss::DataDictionary extend_dictionary(const mss::DataDictionary& dict,
                                      const std::vector<dataio::DerivedFieldSpec>& specs) {
    if (specs.empty()) return dict;
    try {
        return dataio::rederive_fields(dataio::DataTable(dict, {}), specs).schema();
    } catch (const dataio::DataError& e) {
        throw Failure{kValidation, e.what()};
    }
}

mss::OrderedMap<std::string> read_aliases(const std::string& path) {
    mss::OrderedMap<std::string> out;
    if (path.empty()) return out;
    Json doc;
    try {
        doc = Json::parse(read_input(path));
    } catch (const Json::parse_error& e) {
        throw Failure{kValidation, path + ": " + e.what()};
    }
    if (!doc.is_object()) throw Failure{kValidation, path + ": alias file must be a JSON object"};
    for (const auto& [header, field] : doc.items()) {
        if (!field.is_string()) throw Failure{kValidation, path + ": alias target for '" + header + "' must be a string"};
        out.emplace_back(header, field.get<std::string>());
    }
    return out;
}

/// Files as given; directories contribute their *.csv files sorted by name.
std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
    std::vector<std::string> files;
    for (const auto& in : inputs) {
        if (!fs::is_directory(in)) {
            files.push_back(in);
            continue;
        }
        std::vector<std::string> found;
        for (const auto& entry : fs::directory_iterator(in)) {
            if (entry.is_regular_file() && entry.path().extension() == ".csv") found.push_back(entry.path().string());
        }
        std::sort(found.begin(), found.end());
        files.insert(files.end(), found.begin(), found.end());
    }
    return files;
}

std::optional<aggregate::Date> date_arg(const std::string& text, const char* flag) {
    if (text.empty()) return std::nullopt;
    auto d = dataio::parse_date(text);
    if (!d) throw Failure{kValidation, std::string(flag) + " is not a date: " + text};
    return d;
}

aggregate::IntervalConvention convention_arg(const std::string& text) {
    if (text == "half_open") return aggregate::IntervalConvention::half_open;
    if (text == "inclusive") return aggregate::IntervalConvention::inclusive;
    throw Failure{kValidation, "interval convention must be half_open or inclusive"};
}

// validate ----------------------------------------------------------------

struct ValidateArgs {
    std::string config, dictionary, derivations, aliases;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
    const std::string text = read_input(a.config);
    const auto dict = extend_dictionary(read_dictionary(a.dictionary), read_derivations(a.derivations));
    std::vector<mss::Diagnostic> warnings;
    mss::DashboardConfig config;
    try {
        config = mss::parse_config(text, &warnings);
    } catch (const mss::ConfigError& e) {
        out << e.what() << '\n';
        return kValidation;
    }
    for (auto& entry : read_aliases(a.aliases)) config.field_aliases.push_back(std::move(entry));
    mss::ValidationReport report = mss::validate_config(config, dict);
    report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());
    out << mss::render_report(report);
    return report.ok() ? kOk : kValidation;
}

// preprocess --------------------------------------------------------------

struct PreprocessArgs {
    std::vector<std::string> inputs;
    std::string dictionary, derivations, aliases, config, out_dir, audit, date_field;
};

int cmd_preprocess(const PreprocessArgs& a, std::ostream& out, std::ostream& err) {
    const auto specs = read_derivations(a.derivations);
    const auto dict = extend_dictionary(read_dictionary(a.dictionary), specs);
    const auto aliases = read_aliases(a.aliases);

    std::string date_field = a.date_field;
    std::string audit = a.audit;
    if (!a.config.empty()) {
        mss::DashboardConfig config;
        try {
            config = mss::parse_config(read_input(a.config));
        } catch (const mss::ConfigError& e) {
            throw Failure{kValidation, a.config + "#" + e.what()};
        }
        if (date_field.empty()) date_field = config.resolve_field(config.xfield);
        if (audit.empty()) audit = config.audit;
    }
    if (date_field.empty()) throw Failure{kValidation, "preprocess needs --date-field or --config"};
    if (audit.empty()) throw Failure{kValidation, "preprocess needs --audit or --config"};

    dataio::LoadOptions options;
    options.xfield = date_field;
    std::vector<dataio::DataTable> parts;
    const auto files = expand_inputs(a.inputs);
    for (const auto& file : files) {
        const std::string text = read_input(file);
        if (dataio::trim(text).empty()) {
            parts.emplace_back(dict, std::vector<dataio::Record>{});
            continue;
        }
        try {
            options.source = file;
            parts.push_back(dataio::load_table(text, dict, aliases, options));
        } catch (const dataio::DataError& e) {
            throw Failure{kValidation, e.what()};
        }
        if (const auto& unknown = parts.back().provenance().unknown_columns; !unknown.empty()) {
            std::string list;
            for (const auto& f : unknown) list += (list.empty() ? "" : ", ") + f;
            throw Failure{kValidation, file + ": columns not in the dictionary: " + list};
        }
    }

    dataio::DataTable table;
    std::map<std::string, std::size_t> unparseable_by_field;
    std::size_t unparseable = 0;
    try {
        std::vector<const dataio::DataTable*> ptrs;
        for (const auto& p : parts) {
            if (p.empty()) continue;
            ptrs.push_back(&p);
            unparseable += p.provenance().unparseable;
            for (const auto& [f, n] : p.provenance().unparseable_by_field) unparseable_by_field[f] += n;
        }
        if (!ptrs.empty()) {
            table = dataio::concat(ptrs, audit);
        } else {
            table = parts.empty() ? dataio::DataTable(dict, {}) : parts.front();
        }
        table = dataio::rederive_fields(table, specs);
    } catch (const dataio::DataError& e) {
        throw Failure{kValidation, e.what()};
    }
    if (!table.column(date_field)) {
        throw Failure{kValidation, "time field '" + date_field + "' is not among the columns"};
    }

    const auto partition = dataio::split_annual(table, date_field);
    std::error_code ec;
    fs::create_directories(a.out_dir, ec);
    if (ec) throw Failure{kIo, a.out_dir + ": " + ec.message()};
    const fs::path dir(a.out_dir);

    Json years = Json::object();
    for (const auto& [year, part] : partition.years) {
        const std::string name = audit + "_" + std::to_string(year) + ".csv";
        write_output((dir / name).string(), dataio::table_to_csv(part));
        years[std::to_string(year)] = part.row_count();
        out << name << ' ' << part.row_count() << '\n';
    }
    const std::string undated = audit + "_undated.csv";
    write_output((dir / undated).string(), dataio::table_to_csv(partition.undated));
    out << undated << ' ' << partition.undated.row_count() << '\n';

    Json by_field = Json::object();
    for (const auto& [f, n] : unparseable_by_field) by_field[f] = n;
    Json derived = Json::array();
    for (const auto& s : specs) derived.push_back(s.name);
    Json inputs = Json::array();
    for (const auto& f : files) inputs.push_back(f);
    const Json provenance{{"audit", audit},
                          {"inputs", inputs},
                          {"date_field", date_field},
                          {"rows", table.row_count()},
                          {"unparseable", unparseable},
                          {"unparseable_by_field", by_field},
                          {"derived_columns", derived},
                          {"years", years},
                          {"undated", partition.undated.row_count()}};
    write_output((dir / "provenance.json").string(), provenance.dump(2) + "\n");
    write_output((dir / "dictionary.json").string(), mss::serialize_dictionary(table.schema()));
    if (unparseable) err << "warning: " << unparseable << " cells did not parse and were read as missing\n";
    return kOk;
}

// query -------------------------------------------------------------------

struct QueryArgs {
    std::string config, dictionary, derivations, aliases;
    std::vector<std::string> data;
    std::string metric, measure, rule, granularity = "month", from, to, format = "csv";
    std::string convention = "half_open";
};

std::shared_ptr<const server::AuditState> load_for_query(const QueryArgs& a) {
    server::AuditSource source;
    source.config = a.config;
    source.dictionary = a.dictionary;
    if (!a.derivations.empty()) source.derivations = a.derivations;
    if (!a.aliases.empty()) source.aliases = a.aliases;
    source.data = expand_inputs(a.data);
    try {
        return server::load_audit(source);
    } catch (const server::AuditLoadError& e) {
        const auto& errors = e.report().errors;
        const bool io = !errors.empty() && errors.front().code == "IoError";
        throw Failure{io ? kIo : kValidation, mss::render_report(e.report())};
    }
}

int cmd_query(const QueryArgs& a, std::ostream& out) {
    const auto audit = load_for_query(a);
    const mss::MetricSpec* spec = audit->config.find_metric(a.metric);
    if (!spec) throw Failure{kValidation, "unknown metric '" + a.metric + "'"};
    const mss::MeasureSpec* measure = spec->find_measure(a.measure);
    if (!measure) throw Failure{kValidation, "metric '" + spec->metric + "' has no measure '" + a.measure + "'"};

    mss::RuleKind rule = spec->rule_for(a.measure);
    if (!a.rule.empty()) {
        auto parsed = mss::parse_rule(a.rule);
        if (!parsed) throw Failure{kValidation, "unknown rule '" + a.rule + "'"};
        rule = *parsed;
    }
    auto g = mss::parse_granularity(a.granularity);
    if (!g) throw Failure{kValidation, "granularity must be day, month, quarter or year"};
    aggregate::Timeframe tf = server::default_timeframe(*audit);
    if (auto d = date_arg(a.from, "--from")) tf.from = *d;
    if (auto d = date_arg(a.to, "--to")) tf.to = *d;
    if (tf.to < tf.from) throw Failure{kValidation, "--from is after --to"};
    if (a.format != "csv" && a.format != "json") throw Failure{kValidation, "format must be csv or json"};

    aggregate::BinSeries series;
    try {
        series = aggregate::measure_series(*audit->table, *measure, rule, server::metric_xfield(audit->config, *spec), *g,
                                           tf, convention_arg(a.convention));
    } catch (const aggregate::AggregateError& e) {
        throw Failure{kValidation, e.what()};
    }
    series.measure = a.measure;

    if (a.format == "json") {
        out << aggregate::series_to_json(series).dump() << '\n';
        return kOk;
    }
    for (const auto& bin : series.bins) {
        out << aggregate::bin_label(bin.start, *g) << ',';
        if (bin.value) out << dataio::format_number(*bin.value);
        out << '\n';
    }
    return kOk;
}

// gen ---------------------------------------------------------------------

struct GenArgs {
    std::uint64_t seed = 0;
    std::int64_t n = 0;
    std::string profile, out, dictionary_out, aliases;
    std::vector<std::string> missing;
};

dataio::SyntheticProfile load_profile(const std::string& name) {
    try {
        if (fs::exists(name)) return dataio::parse_profile(read_input(name));
        return dataio::builtin_profile(name);
    } catch (const dataio::DataError& e) {
        throw Failure{kValidation, "bad profile '" + name + "': " + e.what()};
    }
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
    auto profile = load_profile(a.profile);
    for (const auto& spec : a.missing) {
        const auto eq = spec.find('=');
        auto rate = eq == std::string::npos ? std::nullopt : dataio::parse_number(spec.substr(eq + 1));
        if (!rate) throw Failure{kValidation, "--missing expects column=rate, got '" + spec + "'"};
        try {
            profile.set_missing(spec.substr(0, eq), *rate);
        } catch (const dataio::DataError& e) {
            throw Failure{kValidation, e.what()};
        }
    }
    dataio::DataTable table;
    try {
        table = dataio::generate_synthetic(a.seed, a.n, profile);
    } catch (const dataio::DataError& e) {
        throw Failure{kValidation, e.what()};
    }

    std::string csv = dataio::table_to_csv(table);
    if (!a.aliases.empty()) {
        // Write site headers: the alias file maps them onto canonical fields.
        std::map<std::string, std::string> external;
        for (const auto& [header, field] : read_aliases(a.aliases)) external.emplace(field, header);
        const auto eol = csv.find('\n');
        std::string header;
        for (const auto& f : table.schema().fields()) {
            auto it = external.find(f.name);
            header += (header.empty() ? "" : ",") + dataio::quote_field(it == external.end() ? f.name : it->second);
        }
        csv = header + csv.substr(eol);
    }
    write_output(a.out, csv);
    if (!a.dictionary_out.empty()) write_output(a.dictionary_out, mss::serialize_dictionary(table.schema()));

    out << "rows " << table.row_count() << '\n';
    for (const auto& f : table.schema().fields()) out << f.name << ' ' << mss::to_string(f.type) << '\n';
    return kOk;
}

// serve -------------------------------------------------------------------

struct ServeArgs {
    std::string config, bind, aliases;
    int port = -1;
};

int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
    std::string path = a.config;
    if (path.empty()) path = server::env_config_path().value_or("");
    if (path.empty()) throw Failure{kValidation, "serve needs --config or QUALDASH_CONFIG"};
    server::ServerConfig config;
    try {
        config = server::load_server_config(path);
        server::apply_env_overrides(config);
    } catch (const server::ServerConfigError& e) {
        throw Failure{kValidation, e.what()};
    }
    if (!a.bind.empty()) config.bind = a.bind;
    if (a.port >= 0) config.port = a.port;
    if (!a.aliases.empty()) {
        for (auto& audit : config.audits) {
            if (!audit.aliases) audit.aliases = a.aliases;
        }
    }
    if (!server::is_loopback(config.bind)) {
        err << "warning: listening on non-loopback address " << config.bind << "; only allowed clients are served\n";
    }

    // Block the stop signals before any server thread exists so that only
    // sigwait below receives them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    std::unique_ptr<server::DashboardService> service;
    try {
        service = std::make_unique<server::DashboardService>(config);
    } catch (const server::AuditLoadError& e) {
        throw Failure{kValidation, mss::render_report(e.report())};
    }
    server::HttpServer http(*service);
    int port;
    try {
        port = http.start(config.bind, config.port);
    } catch (const std::runtime_error& e) {
        throw Failure{kIo, e.what()};
    }
    out << "http://" << config.bind << ':' << port << std::endl;

    int sig = 0;
    sigwait(&signals, &sig);
    http.stop();
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quality dashboard engine"};
    app.require_subcommand(1);

    ValidateArgs va;
    auto* validate = app.add_subcommand("validate", "Check a dashboard config against a data dictionary");
    validate->add_option("--config", va.config, "Dashboard config (JSON)")->required();
    validate->add_option("--dictionary", va.dictionary, "Data dictionary (JSON)")->required();
    validate->add_option("--derivations", va.derivations, "Derived field definitions (JSON)");
    validate->add_option("--alias-file", va.aliases, "Header aliases (JSON)");

    PreprocessArgs pa;
    auto* preprocess = app.add_subcommand("preprocess", "Normalize dates, derive fields and split by year");
    preprocess->add_option("--input", pa.inputs, "CSV files or directories")->required();
    preprocess->add_option("--dictionary", pa.dictionary, "Data dictionary (JSON)")->required();
    preprocess->add_option("--derivations", pa.derivations, "Derived field definitions (JSON)");
    preprocess->add_option("--alias-file", pa.aliases, "Header aliases (JSON)");
    preprocess->add_option("--config", pa.config, "Dashboard config supplying audit name and time field");
    preprocess->add_option("--audit", pa.audit, "Audit name used in output file names");
    preprocess->add_option("--date-field", pa.date_field, "Field that assigns records to years");
    preprocess->add_option("--out", pa.out_dir, "Output directory")->required();

    QueryArgs qa;
    auto* query = app.add_subcommand("query", "Print one measure's series");
    query->add_option("--config", qa.config, "Dashboard config (JSON)")->required();
    query->add_option("--dictionary", qa.dictionary, "Data dictionary (JSON)")->required();
    query->add_option("--data", qa.data, "CSV files or directories")->required();
    query->add_option("--derivations", qa.derivations, "Derived field definitions (JSON)");
    query->add_option("--alias-file", qa.aliases, "Header aliases (JSON)");
    query->add_option("--metric", qa.metric, "Metric title or slug")->required();
    query->add_option("--measure", qa.measure, "Measure name")->required();
    query->add_option("--rule", qa.rule, "count, sum, average, runningSum or runningAverage");
    query->add_option("--granularity", qa.granularity, "day, month, quarter or year");
    query->add_option("--from", qa.from, "First day (YYYY-MM-DD)");
    query->add_option("--to", qa.to, "Last day (YYYY-MM-DD)");
    query->add_option("--format", qa.format, "csv or json");
    query->add_option("--interval-convention", qa.convention, "half_open or inclusive");

    GenArgs ga;
    auto* gen = app.add_subcommand("gen", "Generate a synthetic audit extract");
    gen->add_option("--seed", ga.seed, "Random seed")->required();
    gen->add_option("--n", ga.n, "Number of records")->required();
    gen->add_option("--profile", ga.profile, "Built-in profile name or profile JSON path")->required();
    gen->add_option("--out", ga.out, "Output CSV")->required();
    gen->add_option("--dictionary-out", ga.dictionary_out, "Also write the profile's data dictionary");
    gen->add_option("--missing", ga.missing, "Override a column's missing rate: column=rate");
    gen->add_option("--alias-file", ga.aliases, "Write site headers named by this alias file");

    ServeArgs sa;
    auto* serve = app.add_subcommand("serve", "Run the dashboard HTTP server");
    serve->add_option("--config", sa.config, "Server config (JSON); defaults to QUALDASH_CONFIG");
    serve->add_option("--bind", sa.bind, "Listen address");
    serve->add_option("--port", sa.port, "Listen port; 0 picks a free one");
    serve->add_option("--alias-file", sa.aliases, "Header aliases for audits that name none");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kValidation;
    }

    try {
        if (*validate) return cmd_validate(va, out);
        if (*preprocess) return cmd_preprocess(pa, out, err);
        if (*query) return cmd_query(qa, out);
        if (*gen) return cmd_gen(ga, out);
        if (*serve) return cmd_serve(sa, out, err);
    } catch (const Failure& f) {
        err << f.message;
        if (!f.message.empty() && f.message.back() != '\n') err << '\n';
        return f.code;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kInternal;
}

}  // namespace qualdash::cli
