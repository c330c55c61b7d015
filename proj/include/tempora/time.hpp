#pragma once

#include <algorithm>
#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include "tempora/error.hpp"

namespace tempora {

/// A calendar day, counted in days from 1970-01-01. Day granularity is the
/// universal time atom; coarser inputs (years, months) expand to day spans.
struct TimePoint {
    std::int64_t day = 0;

    auto operator<=>(const TimePoint&) const = default;

    TimePoint plus_days(std::int64_t n) const { return TimePoint{day + n}; }
    std::int64_t operator-(TimePoint other) const { return day - other.day; }

    static TimePoint from_ymd(int year, unsigned month, unsigned day_of_month);
    static TimePoint parse(const std::string& text);
    std::string to_string() const;
};

inline TimePoint TimePoint::from_ymd(int year, unsigned month, unsigned day_of_month) {
    namespace chr = std::chrono;
    const chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day_of_month}};
    if (!ymd.ok())
        throw ParseError("invalid calendar date: " + std::to_string(year) + "-" +
                         std::to_string(month) + "-" + std::to_string(day_of_month));
    return TimePoint{chr::sys_days{ymd}.time_since_epoch().count()};
}

inline TimePoint TimePoint::parse(const std::string& text) {
    int y = 0;
    unsigned m = 0, d = 0;
    int consumed = 0;
    if (std::sscanf(text.c_str(), "%d-%u-%u%n", &y, &m, &d, &consumed) != 3 ||
        consumed != static_cast<int>(text.size()))
        throw ParseError("expected a date of the form YYYY-MM-DD, got '" + text + "'");
    return from_ymd(y, m, d);
}

inline std::string TimePoint::to_string() const {
    namespace chr = std::chrono;
    const chr::year_month_day ymd{chr::sys_days{chr::days{day}}};
    char buf[24];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

/// Closed interval of days; start <= end always. A single day is {d, d}.
struct TimeInterval {
    TimePoint start;
    TimePoint end;

    TimeInterval() = default;
    TimeInterval(TimePoint s, TimePoint e) : start(s), end(e) {
        if (s > e)
            throw DataError("interval start after end: " + s.to_string() + " > " + e.to_string());
    }

    auto operator<=>(const TimeInterval&) const = default;

    bool contains(TimePoint t) const { return start <= t && t <= end; }
    std::int64_t length_days() const { return end.day - start.day + 1; }

    std::string to_string() const {
        return "(interval " + start.to_string() + " " + end.to_string() + ")";
    }
};

inline bool subsumes(const TimeInterval& outer, const TimeInterval& inner) {
    return outer.start <= inner.start && inner.end <= outer.end;
}

inline std::optional<TimeInterval> intersect(const TimeInterval& a, const TimeInterval& b) {
    const TimePoint s = std::max(a.start, b.start);
    const TimePoint e = std::min(a.end, b.end);
    if (s > e) return std::nullopt;
    return TimeInterval{s, e};
}

inline TimeInterval hull(const TimeInterval& a, const TimeInterval& b) {
    return TimeInterval{std::min(a.start, b.start), std::max(a.end, b.end)};
}

inline TimeInterval day_interval(TimePoint t) { return TimeInterval{t, t}; }

/// A bare year denotes the full span [Jan 1, Dec 31].
inline TimeInterval year_interval(int year) {
    return TimeInterval{TimePoint::from_ymd(year, 1, 1), TimePoint::from_ymd(year, 12, 31)};
}

/// Divides the time after `origin` into consecutive numbered risk periods.
/// Period j (1-based) is the half-open day span (origin+(j-1)*len, origin+j*len];
/// rendered as a closed interval it runs from the day after the open boundary
/// through the closing day.
struct PeriodScheme {
    TimePoint origin;
    std::int64_t period_days = 365;

    PeriodScheme(TimePoint o, std::int64_t len) : origin(o), period_days(len) {
        if (len < 1) throw DataError("period length must be at least one day");
    }

    std::int64_t period_index(TimePoint t) const {
        if (t <= origin)
            throw DataError("time " + t.to_string() + " is not after the risk-period origin " +
                            origin.to_string());
        return (t.day - origin.day + period_days - 1) / period_days;
    }

    TimeInterval period_span(std::int64_t j) const {
        if (j < 1) throw DataError("period index must be positive, got " + std::to_string(j));
        return TimeInterval{origin.plus_days((j - 1) * period_days + 1),
                            origin.plus_days(j * period_days)};
    }
};

/// Duration literals: a plain integer is a day count; "2year" = 730 days,
/// "3month" = 90 days. Fixed conversions (year = 365d, month = 30d), so the
/// arithmetic stays deterministic; calendar drift is accepted.
inline std::int64_t parse_duration_days(const std::string& text) {
    std::size_t pos = 0;
    std::int64_t n = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
        n = n * 10 + (text[pos] - '0');
        ++pos;
    }
    if (pos == 0) throw ParseError("expected a duration, got '" + text + "'");
    std::string unit = text.substr(pos);
    if (!unit.empty() && unit.back() == 's') unit.pop_back();
    if (unit.empty() || unit == "d" || unit == "day") return n;
    if (unit == "month") return n * 30;
    if (unit == "y" || unit == "year") return n * 365;
    throw ParseError("unknown duration unit '" + unit + "' in '" + text + "'");
}

} // namespace tempora
