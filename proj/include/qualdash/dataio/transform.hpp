#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qualdash/dataio/table.hpp"
#include "qualdash/mss/config.hpp"

namespace qualdash::dataio {

/// Converts the listed fields to canonical dates. Raw text goes through
/// parse_date, numbers are read as epoch seconds, anything else becomes
/// Missing and is counted in the provenance. Dates pass through unchanged,
/// so the operation is idempotent. Throws DataError for a field that is
/// unknown or not declared temporal.
DataTable normalize_dates(const DataTable& table, const std::vector<std::string>& date_fields);

/// Expression tree for a derived column. Boolean nodes combine predicates
/// over existing fields; date_diff_days yields a number of days.
struct Expr {
    enum class Op { equals, in, is_missing, negate, all_of, any_of, date_diff_days };

    Op op = Op::equals;
    std::string field;                // equals/in/is_missing; end field of date_diff_days
    std::string other;                // start field of date_diff_days
    std::vector<mss::Literal> values;
    std::vector<Expr> args;           // negate (one), all_of/any_of (any number)

    static Expr equals(std::string field, mss::Literal v);
    static Expr in(std::string field, std::vector<mss::Literal> vs);
    static Expr is_missing(std::string field);
    static Expr negate(Expr e);
    static Expr all_of(std::vector<Expr> es);
    static Expr any_of(std::vector<Expr> es);
    static Expr date_diff_days(std::string end, std::string start);

    bool is_boolean() const { return op != Op::date_diff_days; }

    friend bool operator==(const Expr&, const Expr&) = default;
};

struct DerivedFieldSpec {
    std::string name;
    Expr expression;
    std::string description;  // empty -> generated from the expression
};

/// Appends one column per spec, in order; later specs may reference earlier
/// ones. Missing operands make equals/in false and is_missing true, except
/// that a Missing boolean cell reads as false (an unrecorded flag is an
/// unset flag). date_diff_days is Missing when either date is.
///
/// Throws DataError on a name collision, an unknown field, date_diff_days
/// over non-temporal fields or nested inside a boolean node.
DataTable derive_fields(const DataTable& table, const std::vector<DerivedFieldSpec>& specs);

/// derive_fields after dropping any existing column a spec would produce,
/// so running it over its own output changes nothing.
DataTable rederive_fields(const DataTable& table, const std::vector<DerivedFieldSpec>& specs);

/// JSON array of `{name, description?, expr}`. Throws DataError.
std::vector<DerivedFieldSpec> parse_derivations(std::string_view text);

struct AnnualPartition {
    std::map<int, DataTable> years;
    DataTable undated;  // records whose date field is Missing

    std::size_t total_rows() const;
};

/// Partitions by the calendar year of `date_field`. Row order within each
/// partition follows the input.
AnnualPartition split_annual(const DataTable& table, std::string_view date_field);

}  // namespace qualdash::dataio
