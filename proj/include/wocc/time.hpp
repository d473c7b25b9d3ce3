#pragma once

#include <charconv>
#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace wocc {

/// Naive local time at minute precision, counted from 1970-01-01 00:00.
struct Timestamp {
    std::int64_t minutes = 0;

    constexpr auto operator<=>(const Timestamp&) const = default;

    constexpr Timestamp& operator+=(std::int64_t m) { minutes += m; return *this; }
    friend constexpr Timestamp operator+(Timestamp t, std::int64_t m) { return Timestamp{t.minutes + m}; }
    friend constexpr Timestamp operator-(Timestamp t, std::int64_t m) { return Timestamp{t.minutes - m}; }
    friend constexpr std::int64_t operator-(Timestamp a, Timestamp b) { return a.minutes - b.minutes; }
};

inline constexpr std::int64_t kMinutesPerDay = 24 * 60;

inline Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour = 0, int minute = 0)
{
    using namespace std::chrono;
    const sys_days days{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}};
    return Timestamp{static_cast<std::int64_t>(days.time_since_epoch().count()) * kMinutesPerDay + hour * 60 + minute};
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline Timestamp day_start(Timestamp t) { return Timestamp{floor_div(t.minutes, kMinutesPerDay) * kMinutesPerDay}; }
inline std::int64_t minute_of_day(Timestamp t) { return t - day_start(t); }

/// 0 = Monday ... 6 = Sunday.
inline int weekday(Timestamp t)
{
    const std::int64_t days = floor_div(t.minutes, kMinutesPerDay);
    // 1970-01-01 was a Thursday.
    return static_cast<int>(((days % 7) + 7 + 3) % 7);
}

namespace detail {

inline bool parse_uint(std::string_view s, int& out)
{
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && out >= 0;
}

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace detail

/// Accepts "dd/mm/yyyy" and "yyyy-mm-dd".
inline std::optional<Timestamp> parse_date(std::string_view text)
{
    text = detail::trim(text);
    int y = 0, m = 0, d = 0;
    if (text.size() == 10 && text[2] == '/' && text[5] == '/') {
        if (!detail::parse_uint(text.substr(0, 2), d) || !detail::parse_uint(text.substr(3, 2), m) ||
            !detail::parse_uint(text.substr(6, 4), y))
            return std::nullopt;
    } else if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
        if (!detail::parse_uint(text.substr(0, 4), y) || !detail::parse_uint(text.substr(5, 2), m) ||
            !detail::parse_uint(text.substr(8, 2), d))
            return std::nullopt;
    } else {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return make_timestamp(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

/// "HH:MM" to minutes after midnight. 24:00 is allowed as an end-of-day marker.
inline std::optional<std::int64_t> parse_clock(std::string_view text)
{
    text = detail::trim(text);
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    int h = 0, m = 0;
    if (!detail::parse_uint(text.substr(0, colon), h) || !detail::parse_uint(text.substr(colon + 1), m)) return std::nullopt;
    if (text.size() - colon - 1 != 2 || m > 59 || h > 24 || (h == 24 && m != 0)) return std::nullopt;
    return h * 60 + m;
}

/// "dd/mm/yyyy HH:MM" (log format) or "yyyy-mm-dd HH:MM".
inline std::optional<Timestamp> parse_timestamp(std::string_view text)
{
    text = detail::trim(text);
    const auto space = text.find(' ');
    if (space == std::string_view::npos) return std::nullopt;
    const auto date = parse_date(text.substr(0, space));
    const auto clock = parse_clock(text.substr(space + 1));
    if (!date || !clock || *clock >= kMinutesPerDay) return std::nullopt;
    return *date + *clock;
}

inline std::string format_date(Timestamp t)
{
    using namespace std::chrono;
    const year_month_day ymd{sys_days{days{floor_div(t.minutes, kMinutesPerDay)}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02u/%02u/%04d", static_cast<unsigned>(ymd.day()),
                  static_cast<unsigned>(ymd.month()), static_cast<int>(ymd.year()));
    return buf;
}

inline std::string format_clock(std::int64_t minute_of_day)
{
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d:%02d", static_cast<int>(minute_of_day / 60), static_cast<int>(minute_of_day % 60));
    return buf;
}

inline std::string format_timestamp(Timestamp t) { return format_date(t) + " " + format_clock(minute_of_day(t)); }

} // namespace wocc
