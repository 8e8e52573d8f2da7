#pragma once

#include "json.hpp"
#include "qualdash/aggregate/breakdown.hpp"
#include "qualdash/aggregate/quality.hpp"
#include "qualdash/aggregate/series.hpp"

namespace qualdash::aggregate {

using Json = nlohmann::ordered_json;

/// `[{"bin": "2019-01-01", "value": 1}, ...]`, Absent as null.
Json bins_to_json(const std::vector<Bin>& bins);
Json series_to_json(const BinSeries& series);
Json distribution_to_json(const Distribution& d);
Json quality_to_json(const QualityStats& q);

/// `{"bins": [...], "granularity": "month", "category": {"field", "value"},
/// "ids": [...], "measure": "..."}`; every key optional.
/// Throws AggregateError on a malformed payload.
Selection selection_from_json(const Json& j);
Json selection_to_json(const Selection& s);

}  // namespace qualdash::aggregate
