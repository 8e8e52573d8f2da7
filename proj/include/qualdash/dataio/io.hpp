#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "qualdash/dataio/table.hpp"
#include "qualdash/mss/config.hpp"
#include "qualdash/mss/dictionary.hpp"

namespace qualdash::dataio {

struct LoadOptions {
    /// Canonical name of the time field; loading fails when it is absent.
    std::optional<std::string> xfield;
    /// 0 sniffs the delimiter from the header line.
    char delimiter = 0;
    /// Parse temporal columns into dates while loading. When off, their
    /// cells stay raw text for a later normalize_dates pass.
    bool normalize_dates = true;
    std::string source = "<memory>";
};

/// Reads delimited text with a header row. Headers are mapped through
/// `aliases` (external header -> canonical field). Columns the dictionary
/// does not describe are kept as nominal text and listed in the provenance.
/// Cells that do not parse as their field type become Missing and are
/// counted.
///
/// Throws DataError when the header row is missing, two headers resolve to
/// one field, or the xfield column is absent.
DataTable load_table(std::string_view text, const mss::DataDictionary& dict,
                     const mss::OrderedMap<std::string>& aliases = {}, const LoadOptions& options = {});

DataTable load_table_file(const std::string& path, const mss::DataDictionary& dict,
                          const mss::OrderedMap<std::string>& aliases = {}, LoadOptions options = {});

void write_table(std::ostream& out, const DataTable& table, char delimiter = ',');
std::string table_to_csv(const DataTable& table, char delimiter = ',');

/// Reads a whole file; throws std::runtime_error when it cannot be opened.
std::string read_file(const std::string& path);
/// Writes via a temporary file and rename.
void write_file(const std::string& path, std::string_view contents);

/// Current UTC time as `YYYY-MM-DDTHH:MM:SSZ`.
std::string utc_timestamp();

}  // namespace qualdash::dataio
