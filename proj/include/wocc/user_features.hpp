#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "wocc/interval.hpp"
#include "wocc/session_store.hpp"

namespace wocc {

/// Hours during which lectures are normally scheduled; t_out is measured
/// against this day minus the class itself.
inline constexpr std::int64_t kTeachingDayStart = 9 * 60;
inline constexpr std::int64_t kTeachingDayEnd = 21 * 60;

enum class UserLabel { Occupant, Bystander };

inline constexpr std::size_t kUserFeatureCount = 6;
inline constexpr std::array<std::string_view, kUserFeatureCount> kUserFeatureNames{
    "t_in", "t_out", "arrival_delay", "n_sessions", "n_devices", "avg_rssi"};

struct UserFeatureVector {
    std::string user_id;
    std::string class_id;
    double t_in = 0;          // percent of the class connected
    double t_out = 0;         // percent of the rest of the teaching day connected
    double arrival_delay = 0; // minutes after class start, clamped at 0
    double n_sessions = 0;
    double n_devices = 0;
    double avg_rssi = std::nan(""); // mean |RSSI|; NaN until imputed when no session reported one
    bool rssi_imputed = false;
    std::optional<UserLabel> label;

    Eigen::VectorXd values() const
    {
        Eigen::VectorXd v(static_cast<Eigen::Index>(kUserFeatureCount));
        v << t_in, t_out, arrival_delay, n_sessions, n_devices, avg_rssi;
        return v;
    }
};

namespace detail {

inline Interval teaching_day(const ClassEvent& cls)
{
    const auto day = day_start(cls.start);
    return {day + kTeachingDayStart, day + kTeachingDayEnd};
}

// `sessions` are one user's sessions on the room's APs during the class day.
inline std::optional<UserFeatureVector> features_from_sessions(const ClassEvent& cls, const std::string& user,
                                                               std::span<const SessionRecord* const> sessions)
{
    const auto window = cls.window();
    std::vector<Interval> spans;
    std::set<std::string> devices;
    std::size_t in_class = 0;
    Timestamp first_seen = window.end;
    double rssi_sum = 0;
    std::size_t rssi_n = 0;
    for (const auto* s : sessions) {
        spans.push_back(s->span());
        const auto clipped = intersect(s->span(), window);
        if (!clipped) continue;
        ++in_class;
        devices.insert(s->device_mac);
        first_seen = std::min(first_seen, clipped->start);
        if (s->rssi) {
            rssi_sum += std::abs(*s->rssi);
            ++rssi_n;
        }
    }
    if (in_class == 0) return std::nullopt;

    const auto merged = merge_intervals(std::move(spans));
    const auto day = teaching_day(cls);
    const double duration = static_cast<double>(cls.duration());
    const auto in_len = covered_length(merged, window);
    std::int64_t out_len = covered_length(merged, day);
    if (const auto overlap = intersect(window, day)) out_len -= covered_length(merged, *overlap);
    const double out_denominator = static_cast<double>(kTeachingDayEnd - kTeachingDayStart) - duration;

    UserFeatureVector v;
    v.user_id = user;
    v.class_id = cls.class_id;
    v.t_in = 100.0 * static_cast<double>(in_len) / duration;
    v.t_out = out_denominator > 0 ? std::min(100.0, 100.0 * static_cast<double>(out_len) / out_denominator) : 0.0;
    v.arrival_delay = static_cast<double>(std::max<std::int64_t>(0, first_seen - cls.start));
    v.n_sessions = static_cast<double>(in_class);
    v.n_devices = static_cast<double>(devices.size());
    if (rssi_n > 0) v.avg_rssi = rssi_sum / static_cast<double>(rssi_n);
    return v;
}

inline std::vector<const SessionRecord*> room_day_sessions(const SessionStore& store, const ClassEvent& cls,
                                                           const std::set<std::string>& aps)
{
    const auto day = teaching_day(cls);
    const Interval span{std::min(day.start, cls.start), std::max(day.end, cls.end)};
    auto rows = store.overlapping(span);
    std::erase_if(rows, [&](const SessionRecord* r) { return !aps.contains(r->ap_name); });
    return rows;
}

} // namespace detail

/// The six occupant/bystander features for one user, computed over the
/// room's APs. Returns nothing when the user has no session there during the
/// class.
inline std::optional<UserFeatureVector> extract_user_features(const SessionStore& store, const ClassEvent& cls,
                                                              const std::set<std::string>& room_aps,
                                                              const std::string& user)
{
    auto rows = detail::room_day_sessions(store, cls, room_aps);
    std::erase_if(rows, [&](const SessionRecord* r) { return r->user_id != user; });
    return detail::features_from_sessions(cls, user, rows);
}

/// Features for every user seen on the room's APs during the class, ordered
/// by user_id.
inline std::vector<UserFeatureVector> extract_class_features(const SessionStore& store, const ClassEvent& cls,
                                                             const std::set<std::string>& room_aps)
{
    std::map<std::string, std::vector<const SessionRecord*>> by_user;
    for (const auto* r : detail::room_day_sessions(store, cls, room_aps)) by_user[r->user_id].push_back(r);
    std::vector<UserFeatureVector> out;
    for (const auto& [user, rows] : by_user)
        if (auto v = detail::features_from_sessions(cls, user, rows)) out.push_back(std::move(*v));
    return out;
}

inline UserLabel label_user(const std::string& user, const Roster& roster)
{
    return roster.contains(user) ? UserLabel::Occupant : UserLabel::Bystander;
}

/// Mean of the available avg_rssi values (NaN when none).
inline double mean_rssi(std::span<const UserFeatureVector> vectors)
{
    double sum = 0;
    std::size_t n = 0;
    for (const auto& v : vectors)
        if (!std::isnan(v.avg_rssi) && !v.rssi_imputed) {
            sum += v.avg_rssi;
            ++n;
        }
    return n ? sum / static_cast<double>(n) : std::nan("");
}

inline void impute_rssi(std::span<UserFeatureVector> vectors, double fill)
{
    for (auto& v : vectors)
        if (std::isnan(v.avg_rssi)) {
            v.avg_rssi = fill;
            v.rssi_imputed = true;
        }
}

} // namespace wocc
