#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qualdash/dataio/value.hpp"
#include "qualdash/mss/config.hpp"
#include "qualdash/mss/dictionary.hpp"

namespace qualdash::dataio {

/// One value slot per schema field, in schema order.
using Record = std::vector<Value>;

struct Provenance {
    std::string source;
    std::string loaded_at;  // ISO-8601 UTC, empty for generated tables
    std::size_t rows = 0;
    std::size_t unparseable = 0;
    mss::OrderedMap<std::size_t> unparseable_by_field;
    std::vector<std::string> unknown_columns;  // header columns absent from the dictionary
    std::vector<std::string> derived_columns;
    std::size_t ragged_rows = 0;  // rows whose cell count differed from the header

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Immutable typed record collection. Each cell holds the variant matching
/// its field type or Missing; temporal fields may also hold raw text until
/// normalize_dates has run over them.
class DataTable {
public:
    DataTable() = default;
    /// Throws DataError when a record has the wrong arity or a cell's variant
    /// contradicts the schema.
    DataTable(mss::DataDictionary schema, std::vector<Record> rows, Provenance provenance = {});

    const mss::DataDictionary& schema() const { return schema_; }
    const std::vector<Record>& rows() const { return rows_; }
    const Provenance& provenance() const { return provenance_; }

    std::size_t row_count() const { return rows_.size(); }
    std::size_t column_count() const { return schema_.size(); }
    bool empty() const { return rows_.empty(); }

    std::optional<std::size_t> column(std::string_view field) const;
    /// Throws DataError for an unknown field.
    std::size_t require_column(std::string_view field) const;
    const Value& at(std::size_t row, std::size_t col) const { return rows_[row][col]; }

    /// Same schema, a subset of rows (by index, in the given order).
    DataTable select_rows(const std::vector<std::size_t>& indices) const;
    /// Drops one column. Throws DataError for an unknown field.
    DataTable drop_column(std::string_view field) const;

    friend bool operator==(const DataTable& a, const DataTable& b) {
        return a.schema_ == b.schema_ && a.rows_ == b.rows_;
    }

private:
    mss::DataDictionary schema_;
    std::vector<Record> rows_;
    Provenance provenance_;
};

using TablePtr = std::shared_ptr<const DataTable>;

/// Row-wise concatenation of tables with identical schemas.
DataTable concat(const std::vector<const DataTable*>& parts, std::string source = {});

/// Date of a cell, if it holds one.
inline std::optional<Date> as_date(const Value& v) {
    if (const auto* d = std::get_if<Date>(&v)) return *d;
    return std::nullopt;
}
inline std::optional<double> as_number(const Value& v) {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    return std::nullopt;
}

}  // namespace qualdash::dataio
