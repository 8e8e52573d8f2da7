#include "qualdash/server/generation.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "json.hpp"
#include "qualdash/dataio/io.hpp"
#include "qualdash/dataio/transform.hpp"
#include "qualdash/mss/error.hpp"
#include "qualdash/mss/parser.hpp"

namespace qualdash::server {

namespace fs = std::filesystem;

namespace {

std::string first_error(const mss::ValidationReport& report) {
    if (report.errors.empty()) return "audit failed to load";
    const auto& d = report.errors.front();
    return d.path + ": " + d.code + ": " + d.message;
}

[[noreturn]] void fail(const std::string& path, const std::string& code, const std::string& message) {
    mss::ValidationReport r;
    r.errors.push_back(mss::Diagnostic{path, code, message});
    throw AuditLoadError(std::move(r));
}

std::string read_or_fail(const std::string& path) {
    try {
        return dataio::read_file(path);
    } catch (const std::exception& e) {
        fail(path, "IoError", e.what());
    }
}

mss::OrderedMap<std::string> read_aliases(const std::string& path) {
    const std::string text = read_or_fail(path);
    mss::OrderedMap<std::string> out;
    try {
        const auto doc = nlohmann::ordered_json::parse(text);
        if (!doc.is_object()) fail(path, "MalformedValue", "alias file must be a JSON object");
        for (const auto& [header, field] : doc.items()) {
            if (!field.is_string()) fail(path, "MalformedValue", "alias target for '" + header + "' must be a string");
            out.emplace_back(header, field.get<std::string>());
        }
    } catch (const nlohmann::ordered_json::exception& e) {
        fail(path, "SyntaxError", e.what());
    }
    return out;
}

std::vector<std::string> data_files(const AuditSource& source) {
    std::vector<std::string> files = source.data;
    if (source.data_dir) {
        std::vector<std::string> found;
        std::error_code ec;
        for (fs::directory_iterator it(*source.data_dir, ec), end; !ec && it != end; it.increment(ec)) {
            if (it->is_regular_file() && it->path().extension() == ".csv") found.push_back(it->path().string());
        }
        if (ec) fail(*source.data_dir, "IoError", ec.message());
        std::sort(found.begin(), found.end());
        files.insert(files.end(), found.begin(), found.end());
    }
    return files;
}

}  // namespace

AuditLoadError::AuditLoadError(mss::ValidationReport report)
    : std::runtime_error(first_error(report)), report_(std::move(report)) {}

std::shared_ptr<const AuditState> load_audit(const AuditSource& source) {
    auto state = std::make_shared<AuditState>();

    mss::DashboardConfig raw;
    {
        const std::string text = read_or_fail(source.config);
        std::vector<mss::Diagnostic> parse_warnings;
        try {
            raw = mss::parse_config(text, &parse_warnings);
        } catch (const mss::ConfigError& e) {
            fail(source.config + "#" + e.path(), e.code(), e.message());
        }
        state->report.warnings = std::move(parse_warnings);
    }

    mss::DataDictionary dict;
    try {
        dict = mss::parse_dictionary(read_or_fail(source.dictionary));
    } catch (const mss::ConfigError& e) {
        fail(source.dictionary + "#" + e.path(), e.code(), e.message());
    }

    mss::OrderedMap<std::string> aliases = raw.field_aliases;
    if (source.aliases) {
        for (auto& entry : read_aliases(*source.aliases)) aliases.push_back(std::move(entry));
    }

    dataio::LoadOptions options;
    options.xfield = raw.resolve_field(raw.xfield);
    std::vector<dataio::DataTable> parts;
    state->files = data_files(source);
    for (const auto& file : state->files) {
        try {
            parts.push_back(dataio::load_table_file(file, dict, aliases, options));
        } catch (const dataio::DataError& e) {
            fail(file, "DataError", e.what());
        } catch (const std::exception& e) {
            fail(file, "IoError", e.what());
        }
    }

    dataio::DataTable table;
    try {
        if (parts.empty()) {
            table = dataio::DataTable(dict, {});
        } else {
            std::vector<const dataio::DataTable*> ptrs;
            for (const auto& p : parts) ptrs.push_back(&p);
            table = parts.size() == 1 ? parts.front() : dataio::concat(ptrs, source.data_dir.value_or("files"));
        }
        if (source.derivations) {
            const auto specs = dataio::parse_derivations(read_or_fail(*source.derivations));
            table = dataio::rederive_fields(table, specs);
        }
    } catch (const dataio::DataError& e) {
        fail(source.derivations.value_or(source.config), "DataError", e.what());
    }

    mss::DashboardConfig with_aliases = raw;
    with_aliases.field_aliases = aliases;
    mss::ValidationReport report = mss::validate_config(with_aliases, table.schema());
    for (auto& w : report.warnings) state->report.warnings.push_back(std::move(w));
    if (!report.ok()) {
        report.warnings = state->report.warnings;
        throw AuditLoadError(std::move(report));
    }

    state->config = mss::canonicalize(with_aliases);
    std::set<int> years;
    if (auto xcol = table.column(state->config.xfield)) {
        for (const auto& rec : table.rows()) {
            if (auto d = dataio::as_date(rec[*xcol])) years.insert(dataio::year_of(*d));
        }
    }
    state->years.assign(years.begin(), years.end());
    state->table = std::make_shared<const dataio::DataTable>(std::move(table));
    return state;
}

const AuditState* Generation::find(std::string_view audit) const {
    for (const auto& a : audits) {
        if (a->config.audit == audit) return a.get();
    }
    return nullptr;
}

std::shared_ptr<const Generation> load_generation(const ServerConfig& config, std::uint64_t id) {
    auto gen = std::make_shared<Generation>();
    gen->id = id;
    for (const auto& source : config.audits) {
        auto audit = load_audit(source);
        if (gen->find(audit->config.audit)) {
            fail(source.config, "DuplicateAudit", "audit '" + audit->config.audit + "' is configured twice");
        }
        gen->audits.push_back(std::move(audit));
    }
    return gen;
}

}  // namespace qualdash::server
