#include "qualdash/aggregate/timeframe.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

namespace qualdash::aggregate {

using namespace std::chrono;

Timeframe Timeframe::make(Date from, Date to) {
    if (to < from) {
        throw AggregateError("timeframe starts (" + dataio::format_date(from) + ") after it ends (" +
                             dataio::format_date(to) + ")");
    }
    return Timeframe{from, to};
}

Timeframe Timeframe::year(int y) { return Timeframe{dataio::make_date(y, 1, 1), dataio::make_date(y, 12, 31)}; }

Date bin_start(Date d, Granularity g) {
    const year_month_day ymd{d};
    switch (g) {
        case Granularity::day:
            return d;
        case Granularity::month:
            return sys_days{ymd.year() / ymd.month() / 1};
        case Granularity::quarter: {
            const unsigned m = static_cast<unsigned>(ymd.month());
            return sys_days{ymd.year() / month{(m - 1) / 3 * 3 + 1} / 1};
        }
        case Granularity::year:
            return sys_days{ymd.year() / January / 1};
    }
    return d;
}

Date next_bin(Date start, Granularity g) {
    const year_month_day ymd{start};
    switch (g) {
        case Granularity::day:
            return start + days{1};
        case Granularity::month:
            return sys_days{(ymd.year() / ymd.month() / 1) + months{1}};
        case Granularity::quarter:
            return sys_days{(ymd.year() / ymd.month() / 1) + months{3}};
        case Granularity::year:
            return sys_days{(ymd.year() + years{1}) / January / 1};
    }
    return start;
}

std::vector<Date> bin_starts(const Timeframe& tf, Granularity g) {
    std::vector<Date> out;
    for (Date b = bin_start(tf.from, g); b <= tf.to; b = next_bin(b, g)) out.push_back(b);
    return out;
}

std::string bin_label(Date start, Granularity g) {
    const year_month_day ymd{start};
    const int y = static_cast<int>(ymd.year());
    const unsigned m = static_cast<unsigned>(ymd.month());
    char buf[32];
    switch (g) {
        case Granularity::day:
            return dataio::format_date(start);
        case Granularity::month:
            std::snprintf(buf, sizeof buf, "%04d-%02u", y, m);
            return buf;
        case Granularity::quarter:
            std::snprintf(buf, sizeof buf, "%04d-Q%u", y, (m - 1) / 3 + 1);
            return buf;
        case Granularity::year:
            std::snprintf(buf, sizeof buf, "%04d", y);
            return buf;
    }
    return {};
}

BinIndex::BinIndex(const Timeframe& tf, Granularity g) : starts_(bin_starts(tf, g)), granularity_(g) {}

std::optional<std::size_t> BinIndex::index_of(Date d) const {
    if (starts_.empty() || d < starts_.front()) return std::nullopt;
    auto it = std::upper_bound(starts_.begin(), starts_.end(), d);
    const std::size_t idx = static_cast<std::size_t>(it - starts_.begin()) - 1;
    if (d >= next_bin(starts_[idx], granularity_)) return std::nullopt;
    return idx;
}

}  // namespace qualdash::aggregate
