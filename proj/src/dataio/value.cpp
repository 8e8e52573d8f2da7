#include "qualdash/dataio/value.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace qualdash::dataio {

namespace {

using namespace std::chrono;

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

std::optional<int> to_int(std::string_view s) {
    if (!all_digits(s)) return std::nullopt;
    int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<Date> checked(int y, int m, int d) {
    if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd};
}

/// Drops a trailing time-of-day part introduced by 'T' or a space.
std::string_view date_part(std::string_view s) {
    auto pos = s.find_first_of("T ");
    return pos == std::string_view::npos ? s : s.substr(0, pos);
}

constexpr std::array<std::string_view, 12> kMonths{"jan", "feb", "mar", "apr", "may", "jun",
                                                    "jul", "aug", "sep", "oct", "nov", "dec"};

std::optional<int> month_abbrev(std::string_view s) {
    if (s.size() != 3) return std::nullopt;
    std::string lower;
    for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    for (std::size_t i = 0; i < kMonths.size(); ++i) {
        if (kMonths[i] == lower) return static_cast<int>(i) + 1;
    }
    return std::nullopt;
}

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::optional<Date> parse_date(std::string_view text) {
    const std::string_view s = trim(text);
    if (s.empty()) return std::nullopt;

    // epoch seconds
    {
        std::string_view digits = s;
        bool negative = false;
        if (digits.front() == '-') {
            negative = true;
            digits.remove_prefix(1);
        }
        if (all_digits(digits)) {
            long long secs = 0;
            auto res = std::from_chars(digits.data(), digits.data() + digits.size(), secs);
            if (res.ec != std::errc{}) return std::nullopt;
            if (negative) secs = -secs;
            return floor<days>(sys_seconds{seconds{secs}});
        }
    }

    const std::string_view d = date_part(s);
    if (d.size() == 10 && d[4] == '-' && d[7] == '-') {
        auto y = to_int(d.substr(0, 4));
        auto m = to_int(d.substr(5, 2));
        auto dd = to_int(d.substr(8, 2));
        if (!y || !m || !dd) return std::nullopt;
        return checked(*y, *m, *dd);
    }

    // DD/MM/YYYY
    if (auto p1 = d.find('/'); p1 != std::string_view::npos) {
        auto p2 = d.find('/', p1 + 1);
        if (p2 == std::string_view::npos || d.size() - p2 - 1 != 4) return std::nullopt;
        auto dd = to_int(d.substr(0, p1));
        auto m = to_int(d.substr(p1 + 1, p2 - p1 - 1));
        auto y = to_int(d.substr(p2 + 1));
        if (!dd || !m || !y || p1 > 2 || p2 - p1 - 1 > 2) return std::nullopt;
        return checked(*y, *m, *dd);
    }

    // DD-Mon-YYYY
    if (auto p1 = d.find('-'); p1 != std::string_view::npos) {
        auto p2 = d.find('-', p1 + 1);
        if (p2 == std::string_view::npos || d.size() - p2 - 1 != 4 || p1 > 2) return std::nullopt;
        auto dd = to_int(d.substr(0, p1));
        auto m = month_abbrev(d.substr(p1 + 1, p2 - p1 - 1));
        auto y = to_int(d.substr(p2 + 1));
        if (!dd || !m || !y) return std::nullopt;
        return checked(*y, *m, *dd);
    }
    return std::nullopt;
}

std::string format_date(Date d) {
    const year_month_day ymd{d};
    std::array<char, 16> buf{};
    std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf.data();
}

Date make_date(int y, unsigned m, unsigned d) { return sys_days{year{y} / month{m} / day{d}}; }

int year_of(Date d) { return static_cast<int>(year_month_day{d}.year()); }

std::optional<double> parse_number(std::string_view text) {
    const std::string_view s = trim(text);
    if (s.empty()) return std::nullopt;
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<bool> parse_bool(std::string_view text) {
    const std::string_view s = trim(text);
    for (auto t : {"true", "t", "yes", "y", "1"}) {
        if (iequals(s, t)) return true;
    }
    for (auto f : {"false", "f", "no", "n", "0"}) {
        if (iequals(s, f)) return false;
    }
    return std::nullopt;
}

bool is_missing_token(std::string_view text) {
    const std::string_view s = trim(text);
    return s.empty() || s == "NA" || s == "N/A" || s == "NULL" || s == "null";
}

std::string format_number(double d) {
    std::array<char, 32> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), d);
    return std::string(buf.data(), res.ptr);
}

std::string value_text(const Value& v) {
    struct Visitor {
        std::string operator()(Missing) const { return {}; }
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(double d) const { return format_number(d); }
        std::string operator()(Date d) const { return format_date(d); }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
    };
    return std::visit(Visitor{}, v);
}

bool matches_literal(const Value& v, const mss::Literal& lit) {
    if (is_missing(v)) return false;
    if (const auto* s = std::get_if<std::string>(&v)) {
        if (const auto* ls = std::get_if<std::string>(&lit)) return *s == *ls;
    }
    if (const auto* d = std::get_if<double>(&v)) {
        if (const auto* ld = std::get_if<double>(&lit)) return *d == *ld;
    }
    if (const auto* b = std::get_if<bool>(&v)) {
        if (const auto* lb = std::get_if<bool>(&lit)) return *b == *lb;
    }
    if (const auto* date = std::get_if<Date>(&v)) {
        if (const auto* ls = std::get_if<std::string>(&lit)) {
            auto parsed = parse_date(*ls);
            return parsed && *parsed == *date;
        }
        return false;
    }
    return value_text(v) == mss::literal_text(lit);
}

}  // namespace qualdash::dataio
