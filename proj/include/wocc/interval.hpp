#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wocc/time.hpp"

namespace wocc {

/// Half-open time span [start, end).
struct Interval {
    Timestamp start;
    Timestamp end;

    std::int64_t length() const { return end > start ? end - start : 0; }
    bool empty() const { return end <= start; }
    bool contains(Timestamp t) const { return start <= t && t < end; }
    bool overlaps(const Interval& other) const { return start < other.end && other.start < end; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

inline std::optional<Interval> intersect(const Interval& a, const Interval& b)
{
    Interval out{std::max(a.start, b.start), std::min(a.end, b.end)};
    if (out.empty()) return std::nullopt;
    return out;
}

/// Union of the inputs as a sorted list of disjoint intervals. Touching
/// intervals coalesce; empty intervals vanish.
inline std::vector<Interval> merge_intervals(std::vector<Interval> intervals)
{
    std::erase_if(intervals, [](const Interval& i) { return i.empty(); });
    std::sort(intervals.begin(), intervals.end(),
              [](const Interval& a, const Interval& b) { return a.start < b.start || (a.start == b.start && a.end < b.end); });

    std::vector<Interval> merged;
    for (const auto& iv : intervals) {
        if (!merged.empty() && iv.start <= merged.back().end) {
            merged.back().end = std::max(merged.back().end, iv.end);
        } else {
            merged.push_back(iv);
        }
    }
    return merged;
}

inline std::int64_t total_length(std::span<const Interval> intervals)
{
    std::int64_t sum = 0;
    for (const auto& iv : intervals) sum += iv.length();
    return sum;
}

/// Total length of `merged` (disjoint) falling inside `window`.
inline std::int64_t covered_length(std::span<const Interval> merged, const Interval& window)
{
    std::int64_t sum = 0;
    for (const auto& iv : merged)
        if (auto c = intersect(iv, window)) sum += c->length();
    return sum;
}

/// Point query on a sorted disjoint list.
inline bool covers(std::span<const Interval> merged, Timestamp t)
{
    auto it = std::upper_bound(merged.begin(), merged.end(), t,
                               [](Timestamp v, const Interval& iv) { return v < iv.start; });
    if (it == merged.begin()) return false;
    return std::prev(it)->contains(t);
}

} // namespace wocc
