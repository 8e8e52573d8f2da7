#include "qualdash/dataio/io.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "qualdash/dataio/csv.hpp"

namespace qualdash::dataio {

namespace {

const char* kUndocumented = "Undocumented column (not in the data dictionary)";

Value parse_cell(const std::string& raw, mss::FieldType type, bool normalize_dates, bool& unparseable) {
    unparseable = false;
    if (is_missing_token(raw)) return Missing{};
    switch (type) {
        case mss::FieldType::quantitative:
            if (auto n = parse_number(raw)) return *n;
            break;
        case mss::FieldType::boolean:
            if (auto b = parse_bool(raw)) return *b;
            break;
        case mss::FieldType::temporal:
            if (!normalize_dates) return std::string(trim(raw));
            if (auto d = parse_date(raw)) return *d;
            break;
        case mss::FieldType::nominal:
        case mss::FieldType::ordinal:
            return raw;
    }
    unparseable = true;
    return Missing{};
}

}  // namespace

DataTable load_table(std::string_view text, const mss::DataDictionary& dict,
                     const mss::OrderedMap<std::string>& aliases, const LoadOptions& options) {
    const char delimiter = options.delimiter ? options.delimiter : sniff_delimiter(text);
    CsvDocument doc = read_csv(text, delimiter);
    if (!doc.has_header) throw DataError(options.source + ": missing header row");

    Provenance prov;
    prov.source = options.source;
    prov.loaded_at = utc_timestamp();

    std::vector<mss::FieldInfo> fields;
    std::set<std::string> seen;
    for (const auto& raw_header : doc.header) {
        std::string header(trim(raw_header));
        if (const std::string* canonical = mss::find_entry(aliases, header)) header = *canonical;
        if (!seen.insert(header).second) {
            throw DataError(options.source + ": column '" + header + "' appears twice after alias resolution");
        }
        if (const mss::FieldInfo* info = dict.find(header)) {
            fields.push_back(*info);
        } else {
            fields.push_back(mss::FieldInfo{header, mss::FieldType::nominal, kUndocumented});
            prov.unknown_columns.push_back(header);
        }
    }
    if (options.xfield && !seen.count(*options.xfield)) {
        throw DataError(options.source + ": time field '" + *options.xfield + "' is not among the columns");
    }

    std::vector<std::size_t> bad_by_field(fields.size(), 0);
    std::vector<Record> rows;
    rows.reserve(doc.rows.size());
    for (auto& cells : doc.rows) {
        if (cells.size() != fields.size()) ++prov.ragged_rows;
        Record rec(fields.size());
        const std::size_t n = std::min(cells.size(), fields.size());
        for (std::size_t c = 0; c < n; ++c) {
            bool bad = false;
            rec[c] = parse_cell(cells[c], fields[c].type, options.normalize_dates, bad);
            if (bad) {
                ++bad_by_field[c];
                ++prov.unparseable;
            }
        }
        rows.push_back(std::move(rec));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
        if (bad_by_field[c]) prov.unparseable_by_field.emplace_back(fields[c].name, bad_by_field[c]);
    }
    return DataTable(mss::DataDictionary(std::move(fields)), std::move(rows), std::move(prov));
}

DataTable load_table_file(const std::string& path, const mss::DataDictionary& dict,
                          const mss::OrderedMap<std::string>& aliases, LoadOptions options) {
    options.source = path;
    return load_table(read_file(path), dict, aliases, options);
}

void write_table(std::ostream& out, const DataTable& table, char delimiter) {
    CsvRow header;
    for (const auto& f : table.schema().fields()) header.push_back(f.name);
    write_csv_row(out, header, delimiter);
    CsvRow cells(table.column_count());
    for (const auto& rec : table.rows()) {
        for (std::size_t c = 0; c < rec.size(); ++c) cells[c] = value_text(rec[c]);
        write_csv_row(out, cells, delimiter);
    }
}

std::string table_to_csv(const DataTable& table, char delimiter) {
    std::ostringstream out;
    write_table(out, table, delimiter);
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, std::string_view contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw std::runtime_error("write to '" + tmp + "' failed");
    }
    std::filesystem::rename(tmp, path);
}

std::string utc_timestamp() {
    using namespace std::chrono;
    const auto now = floor<seconds>(system_clock::now());
    const auto day = floor<days>(now);
    const year_month_day ymd{day};
    const hh_mm_ss hms{now - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

}  // namespace qualdash::dataio
