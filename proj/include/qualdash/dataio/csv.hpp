// RFC-4180 delimited text: quoted fields, doubled quotes, embedded line
// breaks, CRLF or LF record separators.

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qualdash::dataio {

using CsvRow = std::vector<std::string>;

struct CsvDocument {
    CsvRow header;
    std::vector<CsvRow> rows;
    bool has_header = false;
};

/// Picks tab when the first line has tabs and no commas; comma otherwise.
char sniff_delimiter(std::string_view text);

/// Throws DataError on an unterminated quoted field.
CsvDocument read_csv(std::string_view text, char delimiter);

void write_csv_row(std::ostream& out, const CsvRow& row, char delimiter = ',');
std::string quote_field(std::string_view field, char delimiter = ',');

}  // namespace qualdash::dataio
