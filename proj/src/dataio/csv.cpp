#include "qualdash/dataio/csv.hpp"

#include <ostream>

#include "qualdash/dataio/table.hpp"

namespace qualdash::dataio {

char sniff_delimiter(std::string_view text) {
    const auto eol = text.find('\n');
    const std::string_view first = text.substr(0, eol);
    const bool tabs = first.find('\t') != std::string_view::npos;
    const bool commas = first.find(',') != std::string_view::npos;
    return tabs && !commas ? '\t' : ',';
}

CsvDocument read_csv(std::string_view text, char delimiter) {
    CsvDocument doc;
    // UTF-8 byte order mark
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    CsvRow row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    bool row_started = false;
    std::size_t line = 1;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        if (!doc.has_header) {
            doc.header = std::move(row);
            doc.has_header = true;
        } else {
            doc.rows.push_back(std::move(row));
        }
        row.clear();
        row_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
            row_started = true;
        } else if (c == delimiter) {
            end_field();
            row_started = true;
        } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            continue;
        } else if (c == '\n') {
            ++line;
            if (row_started || field_started) {
                end_row();
            }
        } else {
            field.push_back(c);
            field_started = true;
            row_started = true;
        }
    }
    if (quoted) throw DataError("unterminated quoted field starting before line " + std::to_string(line));
    if (row_started || field_started) end_row();
    return doc;
}

std::string quote_field(std::string_view field, char delimiter) {
    bool needs = false;
    for (char c : field) {
        if (c == delimiter || c == '"' || c == '\n' || c == '\r') {
            needs = true;
            break;
        }
    }
    if (!needs && !field.empty() && (field.front() == ' ' || field.back() == ' ')) needs = true;
    if (!needs) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_csv_row(std::ostream& out, const CsvRow& row, char delimiter) {
    // a lone empty cell would otherwise read back as a blank line
    if (row.size() == 1 && row.front().empty()) {
        out << "\"\"\n";
        return;
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out.put(delimiter);
        out << quote_field(row[i], delimiter);
    }
    out.put('\n');
}

}  // namespace qualdash::dataio
