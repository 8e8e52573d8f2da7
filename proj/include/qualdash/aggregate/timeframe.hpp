#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qualdash/dataio/value.hpp"
#include "qualdash/mss/config.hpp"

namespace qualdash::aggregate {

using dataio::Date;
using mss::Granularity;

class AggregateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inclusive date range.
struct Timeframe {
    Date from;
    Date to;

    /// Throws AggregateError when from > to.
    static Timeframe make(Date from, Date to);
    static Timeframe year(int y);

    bool contains(Date d) const { return from <= d && d <= to; }
    friend bool operator==(const Timeframe&, const Timeframe&) = default;
};

/// Start of the calendar-aligned bin containing d.
Date bin_start(Date d, Granularity g);
/// Start of the bin after the one starting at `start`.
Date next_bin(Date start, Granularity g);
/// Starts of every bin intersecting the timeframe, in order.
std::vector<Date> bin_starts(const Timeframe& tf, Granularity g);
/// `2019-01-28`, `2019-01`, `2019-Q1` or `2019`.
std::string bin_label(Date start, Granularity g);

/// Maps a date to its bin index within a fixed bin list.
class BinIndex {
public:
    BinIndex(const Timeframe& tf, Granularity g);

    /// Covers whole bins, so days just outside a clipped timeframe still map
    /// to its edge bins. Callers filter by timeframe first.
    std::optional<std::size_t> index_of(Date d) const;
    const std::vector<Date>& starts() const { return starts_; }
    std::size_t size() const { return starts_.size(); }
    Granularity granularity() const { return granularity_; }

private:
    std::vector<Date> starts_;
    Granularity granularity_;
};

}  // namespace qualdash::aggregate
