#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wocc/error.hpp"
#include "wocc/keyvalue.hpp"
#include "wocc/occupancy.hpp"
#include "wocc/rng.hpp"
#include "wocc/session_store.hpp"
#include "wocc/text.hpp"
#include "wocc/time.hpp"

namespace wocc {

struct RoomSpec {
    std::string id;
    int capacity = 0;
    int aps = 0;
    std::string building;
    std::string floor;
};

/// Behavioral campus model. Attachment is sampled from these probabilities;
/// nothing here models radio propagation.
struct SimConfig {
    std::uint64_t seed = 42;
    int weeks = 10;
    Timestamp first_monday = make_timestamp(2017, 7, 31);
    int courses_per_room = 3;
    std::vector<RoomSpec> rooms = {
        {"mat227", 42, 3, "mat", "2"},  {"mat228", 42, 3, "mat", "2"}, {"matc", 110, 3, "mat", "1"},
        {"clb8", 231, 10, "clb", "1"},  {"matb", 246, 4, "mat", "0"},  {"mata", 472, 17, "mat", "3"},
        {"clb7", 497, 10, "clb", "2"},
    };
    int doorway_aps_per_room = 1;    // corridor APs just outside each room's door
    int far_aps = 48;                // corridor APs in buildings without rooms
    std::vector<std::string> far_buildings = {"lib", "eng", "sci"};
    double corner_ap_fraction = 0.1; // in-room APs at the room's edge
    double corner_ap_weight = 0.05;  // attachment weight of a corner AP relative to a regular one

    int population = 20000;           // campus users; rosters and bystanders are drawn from it
    double enrollment_min = 0.5;      // roster size ~ U(enrollment_min, 1) x capacity
    double attendance_min = 0.3;      // attendance ratio ~ U(attendance_min, attendance_max)
    double attendance_max = 0.9;
    double non_connecting_probability = 0.18;
    std::array<double, 3> device_weights = {0.6, 0.33, 0.07}; // P(1, 2, 3 devices)
    double late_probability = 0.1;
    double late_mean_minutes = 15;
    double early_leave_probability = 0.08;
    double churn_rate = 0.15;          // re-association probability per 10 minutes
    double cross_room_probability = 0.03; // attach to an AP of an adjacent room
    double doorway_probability = 0.15;    // attach to a doorway corridor AP
    double walk_in_probability = 0.0;    // non-enrolled attendees, robustness runs only

    double bystander_rate_per_hour = 12;  // bystander arrivals around a room during a class
    double bystander_dwell_mean = 5;      // minutes, exponential
    double bystander_inroom_probability = 0.3;
    double lingerer_fraction = 0.05;      // bystanders that stay for hours
    double absentee_nearby_probability = 0.3;  // absent enrolled student loiters at the room's door
    double absentee_campus_probability = 0.2;  // absent enrolled student is elsewhere on campus
    double absentee_dwell_mean = 2;            // minutes at the door, exponential

    double corridor_background = 3;  // mean concurrent background users per corridor AP
    double room_background = 0.5;    // per in-room AP, outside the room's classes
    double background_dwell_mean = 40;

    double rssi_inroom_mean = -58, rssi_outroom_mean = -66, rssi_sd = 6;
    std::int64_t report_minute = 21 * 60;

    void validate() const;
    static SimConfig from_keyvalue(const KeyValueFile& kv);
    KeyValueFile to_keyvalue() const;
};

namespace detail {

inline void check_probability(double p, const char* name)
{
    if (!(p >= 0 && p <= 1)) throw usage_error(std::string("sim config: ") + name + " must lie in [0, 1]");
}

inline std::vector<RoomSpec> parse_rooms(const std::string& text)
{
    std::vector<RoomSpec> rooms;
    for (const auto& item : split_row(text, ',')) {
        if (item.empty()) continue;
        const auto f = split_row(item, ':');
        const auto cap = f.size() == 5 ? parse_int(f[1]) : std::nullopt;
        const auto aps = f.size() == 5 ? parse_int(f[2]) : std::nullopt;
        if (!cap || !aps) throw usage_error("sim config: room spec '" + item + "' is not id:capacity:aps:building:floor");
        rooms.push_back({f[0], static_cast<int>(*cap), static_cast<int>(*aps), f[3], f[4]});
    }
    return rooms;
}

} // namespace detail

inline void SimConfig::validate() const
{
    if (rooms.empty()) throw usage_error("sim config: at least one room is required");
    std::set<std::string> ids;
    for (const auto& r : rooms) {
        if (r.id.empty() || r.capacity < 1 || r.aps < 1)
            throw usage_error("sim config: room '" + r.id + "' needs a capacity and at least one AP");
        if (!ids.insert(r.id).second) throw usage_error("sim config: duplicate room '" + r.id + "'");
    }
    if (weeks < 1 || courses_per_room < 1) throw usage_error("sim config: weeks and courses_per_room must be positive");
    if (doorway_aps_per_room < 0 || far_aps < 0) throw usage_error("sim config: AP counts must be non-negative");
    int max_cap = 0;
    for (const auto& r : rooms) max_cap = std::max(max_cap, r.capacity);
    if (population < 2 * max_cap) throw usage_error("sim config: population too small for the largest room");
    for (auto [p, n] : {std::pair{corner_ap_fraction, "corner_ap_fraction"}, {corner_ap_weight, "corner_ap_weight"},
                        {enrollment_min, "enrollment_min"}, {attendance_min, "attendance_min"},
                        {attendance_max, "attendance_max"}, {non_connecting_probability, "non_connecting_probability"},
                        {late_probability, "late_probability"}, {early_leave_probability, "early_leave_probability"},
                        {churn_rate, "churn_rate"}, {cross_room_probability, "cross_room_probability"},
                        {doorway_probability, "doorway_probability"}, {walk_in_probability, "walk_in_probability"},
                        {bystander_inroom_probability, "bystander_inroom_probability"},
                        {lingerer_fraction, "lingerer_fraction"},
                        {absentee_nearby_probability, "absentee_nearby_probability"},
                        {absentee_campus_probability, "absentee_campus_probability"}})
        detail::check_probability(p, n);
    if (attendance_min > attendance_max) throw usage_error("sim config: attendance_min exceeds attendance_max");
    if (cross_room_probability + doorway_probability > 1)
        throw usage_error("sim config: cross_room_probability + doorway_probability exceeds 1");
    if (absentee_nearby_probability + absentee_campus_probability > 1)
        throw usage_error("sim config: absentee_nearby_probability + absentee_campus_probability exceeds 1");
    if (far_aps > 0 && far_buildings.empty()) throw usage_error("sim config: far_aps needs at least one far building");
    for (double w : device_weights)
        if (w < 0) throw usage_error("sim config: device weights must be non-negative");
    if (device_weights[0] + device_weights[1] + device_weights[2] <= 0) throw usage_error("sim config: device weights sum to zero");
    if (bystander_rate_per_hour < 0 || bystander_dwell_mean <= 0 || absentee_dwell_mean <= 0 || late_mean_minutes <= 0 || corridor_background < 0 ||
        room_background < 0 || background_dwell_mean <= 0 || rssi_sd < 0)
        throw usage_error("sim config: rates, means and spreads must be non-negative");
}

inline SimConfig SimConfig::from_keyvalue(const KeyValueFile& kv)
{
    SimConfig c;
    c.seed = static_cast<std::uint64_t>(kv.integer("seed", static_cast<std::int64_t>(c.seed)));
    c.weeks = static_cast<int>(kv.integer("weeks", c.weeks));
    if (const auto d = kv.get("first_monday")) {
        const auto t = parse_date(*d);
        if (!t) throw usage_error("sim config: bad first_monday '" + *d + "'");
        c.first_monday = *t;
    }
    c.courses_per_room = static_cast<int>(kv.integer("courses_per_room", c.courses_per_room));
    if (const auto r = kv.get("rooms")) c.rooms = detail::parse_rooms(*r);
    c.doorway_aps_per_room = static_cast<int>(kv.integer("doorway_aps_per_room", c.doorway_aps_per_room));
    c.far_aps = static_cast<int>(kv.integer("far_aps", c.far_aps));
    if (const auto b = kv.get("far_buildings")) {
        c.far_buildings.clear();
        for (const auto& name : split_row(*b, ','))
            if (!name.empty()) c.far_buildings.push_back(name);
    }
    c.corner_ap_fraction = kv.number("corner_ap_fraction", c.corner_ap_fraction);
    c.corner_ap_weight = kv.number("corner_ap_weight", c.corner_ap_weight);
    c.population = static_cast<int>(kv.integer("population", c.population));
    c.enrollment_min = kv.number("enrollment_min", c.enrollment_min);
    c.attendance_min = kv.number("attendance_min", c.attendance_min);
    c.attendance_max = kv.number("attendance_max", c.attendance_max);
    c.non_connecting_probability = kv.number("non_connecting_probability", c.non_connecting_probability);
    if (const auto w = kv.get("device_weights")) {
        const auto f = split_row(*w, ':');
        if (f.size() != 3) throw usage_error("sim config: device_weights is p1:p2:p3");
        for (std::size_t i = 0; i < 3; ++i) {
            const auto v = parse_double(f[i]);
            if (!v) throw usage_error("sim config: bad device weight '" + f[i] + "'");
            c.device_weights[i] = *v;
        }
    }
    c.late_probability = kv.number("late_probability", c.late_probability);
    c.late_mean_minutes = kv.number("late_mean_minutes", c.late_mean_minutes);
    c.early_leave_probability = kv.number("early_leave_probability", c.early_leave_probability);
    c.churn_rate = kv.number("churn_rate", c.churn_rate);
    c.cross_room_probability = kv.number("cross_room_probability", c.cross_room_probability);
    c.doorway_probability = kv.number("doorway_probability", c.doorway_probability);
    c.walk_in_probability = kv.number("walk_in_probability", c.walk_in_probability);
    c.bystander_rate_per_hour = kv.number("bystander_rate_per_hour", c.bystander_rate_per_hour);
    c.bystander_dwell_mean = kv.number("bystander_dwell_mean", c.bystander_dwell_mean);
    c.bystander_inroom_probability = kv.number("bystander_inroom_probability", c.bystander_inroom_probability);
    c.lingerer_fraction = kv.number("lingerer_fraction", c.lingerer_fraction);
    c.absentee_nearby_probability = kv.number("absentee_nearby_probability", c.absentee_nearby_probability);
    c.absentee_campus_probability = kv.number("absentee_campus_probability", c.absentee_campus_probability);
    c.absentee_dwell_mean = kv.number("absentee_dwell_mean", c.absentee_dwell_mean);
    c.corridor_background = kv.number("corridor_background", c.corridor_background);
    c.room_background = kv.number("room_background", c.room_background);
    c.background_dwell_mean = kv.number("background_dwell_mean", c.background_dwell_mean);
    c.rssi_inroom_mean = kv.number("rssi_inroom_mean", c.rssi_inroom_mean);
    c.rssi_outroom_mean = kv.number("rssi_outroom_mean", c.rssi_outroom_mean);
    c.rssi_sd = kv.number("rssi_sd", c.rssi_sd);
    if (const auto r = kv.get("report_time")) {
        const auto m = parse_clock(*r);
        if (!m) throw usage_error("sim config: bad report_time '" + *r + "'");
        c.report_minute = *m;
    }
    static const std::set<std::string> known{
        "seed", "weeks", "first_monday", "courses_per_room", "rooms", "doorway_aps_per_room", "far_aps", "far_buildings",
        "corner_ap_fraction", "corner_ap_weight", "population", "enrollment_min", "attendance_min", "attendance_max",
        "non_connecting_probability", "device_weights", "late_probability", "late_mean_minutes",
        "early_leave_probability", "churn_rate", "cross_room_probability", "doorway_probability", "walk_in_probability",
        "bystander_rate_per_hour", "bystander_dwell_mean", "bystander_inroom_probability", "lingerer_fraction",
        "absentee_nearby_probability", "absentee_campus_probability", "absentee_dwell_mean", "corridor_background", "room_background", "background_dwell_mean",
        "rssi_inroom_mean", "rssi_outroom_mean", "rssi_sd", "report_time"};
    for (const auto& k : kv.keys())
        if (!known.contains(k)) throw usage_error("sim config: unknown key '" + k + "'");
    c.validate();
    return c;
}

inline KeyValueFile SimConfig::to_keyvalue() const
{
    KeyValueFile kv;
    kv.set("seed", std::to_string(seed));
    kv.set("weeks", std::to_string(weeks));
    kv.set("first_monday", format_date(first_monday));
    kv.set("courses_per_room", std::to_string(courses_per_room));
    std::string rs;
    for (const auto& r : rooms)
        rs += (rs.empty() ? "" : ",") + r.id + ":" + std::to_string(r.capacity) + ":" + std::to_string(r.aps) + ":" +
              r.building + ":" + r.floor;
    kv.set("rooms", rs);
    kv.set("doorway_aps_per_room", std::to_string(doorway_aps_per_room));
    kv.set("far_aps", std::to_string(far_aps));
    kv.set("far_buildings", join(far_buildings));
    kv.set("corner_ap_fraction", format_double(corner_ap_fraction));
    kv.set("corner_ap_weight", format_double(corner_ap_weight));
    kv.set("population", std::to_string(population));
    kv.set("enrollment_min", format_double(enrollment_min));
    kv.set("attendance_min", format_double(attendance_min));
    kv.set("attendance_max", format_double(attendance_max));
    kv.set("non_connecting_probability", format_double(non_connecting_probability));
    kv.set("device_weights", format_double(device_weights[0]) + ":" + format_double(device_weights[1]) + ":" +
                                 format_double(device_weights[2]));
    kv.set("late_probability", format_double(late_probability));
    kv.set("late_mean_minutes", format_double(late_mean_minutes));
    kv.set("early_leave_probability", format_double(early_leave_probability));
    kv.set("churn_rate", format_double(churn_rate));
    kv.set("cross_room_probability", format_double(cross_room_probability));
    kv.set("doorway_probability", format_double(doorway_probability));
    kv.set("walk_in_probability", format_double(walk_in_probability));
    kv.set("bystander_rate_per_hour", format_double(bystander_rate_per_hour));
    kv.set("bystander_dwell_mean", format_double(bystander_dwell_mean));
    kv.set("bystander_inroom_probability", format_double(bystander_inroom_probability));
    kv.set("lingerer_fraction", format_double(lingerer_fraction));
    kv.set("absentee_nearby_probability", format_double(absentee_nearby_probability));
    kv.set("absentee_campus_probability", format_double(absentee_campus_probability));
    kv.set("absentee_dwell_mean", format_double(absentee_dwell_mean));
    kv.set("corridor_background", format_double(corridor_background));
    kv.set("room_background", format_double(room_background));
    kv.set("background_dwell_mean", format_double(background_dwell_mean));
    kv.set("rssi_inroom_mean", format_double(rssi_inroom_mean));
    kv.set("rssi_outroom_mean", format_double(rssi_outroom_mean));
    kv.set("rssi_sd", format_double(rssi_sd));
    kv.set("report_time", format_clock(report_minute));
    return kv;
}

/// APs around one room.
struct RoomLayout {
    RoomSpec spec;
    std::vector<std::string> aps;          // in-room
    std::vector<double> ap_weights;        // attachment weights, corner APs low
    std::vector<std::string> doorway_aps;  // corridor APs at this room's door
    std::vector<std::string> adjacent_aps; // in-room APs of other rooms on the same floor
};

struct Campus {
    ApInventory inventory;
    std::vector<ClassEvent> timetable;
    RosterMap rosters;
    std::vector<std::string> population;
    std::map<std::string, RoomLayout> rooms;
    std::vector<std::string> corridor_aps; // doorway and far
    std::vector<std::string> far_aps;
    std::set<std::string> corner_aps;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::string hex_id(std::uint64_t v, int digits)
{
    static const char* hex = "0123456789abcdef";
    std::string s(static_cast<std::size_t>(digits), '0');
    for (int i = digits - 1; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = hex[v & 0xf];
    return s;
}

inline std::string two_digits(int v)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d", v);
    return buf;
}

// Share of classes by length in minutes.
inline const std::vector<std::pair<std::int64_t, double>>& class_length_mix()
{
    static const std::vector<std::pair<std::int64_t, double>> mix{{60, 0.46}, {120, 0.45}, {180, 0.05},
                                                                  {90, 0.02}, {240, 0.01}, {150, 0.01}};
    return mix;
}

} // namespace detail

/// Rooms, APs, a weekly timetable with no double-booked room, and rosters.
inline Campus generate_campus(const SimConfig& cfg)
{
    cfg.validate();
    Rng rng(cfg.seed);
    Campus campus;

    std::map<std::pair<std::string, std::string>, std::vector<std::string>> floor_rooms;
    for (const auto& r : cfg.rooms) floor_rooms[{r.building, r.floor}].push_back(r.id);

    std::map<std::string, std::vector<std::string>> doorways;
    for (const auto& [floor, ids] : floor_rooms) {
        int n = 0;
        for (const auto& id : ids) {
            for (int i = 0; i < cfg.doorway_aps_per_room; ++i) {
                const auto name = floor.first + "-f" + floor.second + "-cor" + detail::two_digits(++n);
                campus.inventory[name] = ApLocation{std::string(kCorridor), floor.first, floor.second};
                doorways[id].push_back(name);
                campus.corridor_aps.push_back(name);
            }
        }
    }
    for (int i = 0; i < cfg.far_aps; ++i) {
        const auto nb = static_cast<int>(cfg.far_buildings.size());
        const auto& building = cfg.far_buildings[static_cast<std::size_t>(i % nb)];
        const auto name = building + "-cor" + detail::two_digits(i / nb + 1);
        campus.inventory[name] = ApLocation{std::string(kCorridor), building, std::to_string((i / nb) % 4)};
        campus.corridor_aps.push_back(name);
        campus.far_aps.push_back(name);
    }
    for (const auto& r : cfg.rooms) {
        RoomLayout layout;
        layout.spec = r;
        const int corners = static_cast<int>(std::lround(cfg.corner_ap_fraction * r.aps));
        for (int i = 1; i <= r.aps; ++i) {
            const auto name = r.id + "-ap" + detail::two_digits(i);
            campus.inventory[name] = ApLocation{r.id, r.building, r.floor};
            layout.aps.push_back(name);
            const bool corner = i > r.aps - corners;
            layout.ap_weights.push_back(corner ? cfg.corner_ap_weight : 1.0);
            if (corner) campus.corner_aps.insert(name);
        }
        layout.doorway_aps = doorways[r.id];
        campus.rooms.emplace(r.id, std::move(layout));
    }
    for (auto& [id, layout] : campus.rooms)
        for (const auto& other : floor_rooms[{layout.spec.building, layout.spec.floor}])
            if (other != id)
                for (const auto& ap : campus.rooms.at(other).aps) layout.adjacent_aps.push_back(ap);

    std::unordered_set<std::string> used;
    for (std::uint64_t i = 0; campus.population.size() < static_cast<std::size_t>(cfg.population); ++i) {
        auto id = detail::hex_id(detail::splitmix64(cfg.seed * 0x100000001b3ULL + i), 8);
        if (used.insert(id).second) campus.population.push_back(std::move(id));
    }

    std::vector<double> length_weights;
    for (const auto& [len, w] : detail::class_length_mix()) length_weights.push_back(w);

    for (const auto& r : cfg.rooms) {
        struct Slot {
            int weekday;
            std::int64_t start, end;
        };
        std::vector<Slot> booked;
        for (int c = 0; c < cfg.courses_per_room; ++c) {
            Slot slot{};
            bool placed = false;
            for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
                const auto len = detail::class_length_mix()[rng.weighted(length_weights)].first;
                const auto latest_hour = (21 * 60 - len) / 60;
                if (latest_hour < 9) continue;
                const std::int64_t start = rng.integer(9, latest_hour) * 60;
                slot = {static_cast<int>(rng.index(5)), start, start + len};
                placed = std::none_of(booked.begin(), booked.end(), [&](const Slot& b) {
                    return b.weekday == slot.weekday && b.start < slot.end && slot.start < b.end;
                });
            }
            if (!placed) throw usage_error("sim config: cannot fit " + std::to_string(cfg.courses_per_room) + " courses into room '" + r.id + "'");
            booked.push_back(slot);

            const auto enrolled = std::max<std::int64_t>(
                5, std::lround(rng.uniform(cfg.enrollment_min, 1.0) * r.capacity));
            std::vector<std::size_t> picks;
            std::unordered_set<std::size_t> chosen;
            while (picks.size() < static_cast<std::size_t>(enrolled)) {
                const auto p = rng.index(campus.population.size());
                if (chosen.insert(p).second) picks.push_back(p);
            }
            const auto course = r.id + "-c" + std::to_string(c + 1);
            for (int w = 0; w < cfg.weeks; ++w) {
                const auto day = cfg.first_monday + (7 * w + slot.weekday) * kMinutesPerDay;
                ClassEvent ev{course + "-w" + detail::two_digits(w + 1), r.id, day + slot.start, day + slot.end};
                Roster roster{ev.class_id, {}};
                for (auto p : picks) roster.enrolled.insert(campus.population[p]);
                campus.rosters.emplace(ev.class_id, std::move(roster));
                campus.timetable.push_back(std::move(ev));
            }
        }
    }
    std::stable_sort(campus.timetable.begin(), campus.timetable.end(), [](const ClassEvent& a, const ClassEvent& b) {
        return a.start < b.start || (a.start == b.start && a.class_id < b.class_id);
    });
    return campus;
}

struct GroundTruth {
    TruthCounts counts;
    std::map<std::string, std::set<std::string>> attendees;
    std::map<std::string, std::set<std::string>> connected_attendees;
    std::map<std::string, std::set<std::string>> non_connecting;
    std::map<std::string, std::set<std::string>> bystanders; // simulated bystanders seen around the room
};

struct SimOutput {
    std::vector<SessionRecord> sessions;
    GroundTruth truth;
};

namespace detail {

class SessionSimulator {
public:
    SessionSimulator(const Campus& campus, const SimConfig& cfg)
        : campus_(campus), cfg_(cfg), rng_(splitmix64(cfg.seed ^ 0x5e55'1015ULL))
    {
    }

    SimOutput run()
    {
        std::map<std::string, std::vector<const ClassEvent*>> by_room;
        for (const auto& ev : campus_.timetable) by_room[ev.room_id].push_back(&ev);
        for (const auto& ev : campus_.timetable) simulate_class(ev, by_room[ev.room_id]);
        simulate_background(by_room);

        std::stable_sort(out_.sessions.begin(), out_.sessions.end(), [](const SessionRecord& a, const SessionRecord& b) {
            if (a.assoc_time != b.assoc_time) return a.assoc_time < b.assoc_time;
            if (a.user_id != b.user_id) return a.user_id < b.user_id;
            return a.device_mac < b.device_mac;
        });
        return std::move(out_);
    }

private:
    enum class Spot { InRoom, Outside };

    const std::string& mac_for(const std::string& user, int device)
    {
        auto& macs = macs_[user];
        while (static_cast<int>(macs.size()) <= device) {
            const auto v = rng_.next_u64();
            std::string mac;
            for (int b = 0; b < 6; ++b) {
                if (b) mac += ':';
                mac += hex_id((v >> (8 * b)) & 0xff, 2);
            }
            macs.push_back(mac);
        }
        return macs[static_cast<std::size_t>(device)];
    }

    void emit(const std::string& user, int device, const std::string& ap, Timestamp start, Timestamp end, Spot spot)
    {
        const Timestamp report = day_start(start) + cfg_.report_minute;
        if (start >= report || end <= start) return;
        SessionRecord s;
        s.user_id = user;
        s.device_mac = mac_for(user, device);
        s.ap_name = ap;
        s.assoc_time = start;
        if (end > report) {
            s.status = SessionStatus::Associated;
            s.duration = report - start;
        } else {
            s.status = SessionStatus::Disassociated;
            s.duration = end - start;
            s.disassoc_time = end;
        }
        const double mean = spot == Spot::InRoom ? cfg_.rssi_inroom_mean : cfg_.rssi_outroom_mean;
        const double rssi = std::clamp(std::round(rng_.normal(mean, cfg_.rssi_sd)), -95.0, -30.0);
        s.rssi = rssi;
        s.snr = std::clamp(std::round(rssi + 95.0 + rng_.normal(0, 2)), 0.0, 70.0);
        s.bytes_tx = static_cast<std::int64_t>(static_cast<double>(s.duration) * rng_.uniform(1e4, 1e5));
        s.bytes_rcvd = static_cast<std::int64_t>(static_cast<double>(s.duration) * rng_.uniform(2e4, 3e5));
        s.retries = rng_.integer(0, 4000);
        out_.sessions.push_back(std::move(s));
        if (current_class_ && current_attendees_ && current_attendees_->contains(user))
            out_.truth.connected_attendees[*current_class_].insert(user);
    }

    bool busy(const std::string& user, const Interval& span) const
    {
        const auto it = busy_.find(user);
        if (it == busy_.end()) return false;
        return std::any_of(it->second.begin(), it->second.end(), [&](const Interval& b) { return b.overlaps(span); });
    }

    // Seat choice for an attendee: mostly the room's own APs.
    std::pair<std::string, Spot> occupant_ap(const RoomLayout& room)
    {
        const double u = rng_.uniform();
        if (u < cfg_.cross_room_probability && !room.adjacent_aps.empty())
            return {room.adjacent_aps[rng_.index(room.adjacent_aps.size())], Spot::Outside};
        if (u < cfg_.cross_room_probability + cfg_.doorway_probability && !room.doorway_aps.empty())
            return {room.doorway_aps[rng_.index(room.doorway_aps.size())], Spot::Outside};
        return {room.aps[rng_.weighted(room.ap_weights)], Spot::InRoom};
    }

    // One device's connected span, cut into sessions by churn.
    void device_sessions(const std::string& user, int device, const RoomLayout& room, std::pair<std::string, Spot> seat,
                         Timestamp arrive, Timestamp depart)
    {
        Timestamp cur = arrive;
        for (Timestamp t = arrive + 10; t < depart; t += 10) {
            if (!rng_.bernoulli(cfg_.churn_rate)) continue;
            emit(user, device, seat.first, cur, t, seat.second);
            cur = t + rng_.integer(1, 3);
            if (!rng_.bernoulli(0.6)) seat = occupant_ap(room);
            if (cur >= depart) return;
        }
        emit(user, device, seat.first, cur, depart, seat.second);
    }

    void simulate_class(const ClassEvent& ev, const std::vector<const ClassEvent*>& room_classes)
    {
        const auto& room = campus_.rooms.at(ev.room_id);
        const auto& roster = campus_.rosters.at(ev.class_id);
        auto& truth = out_.truth;
        current_class_ = &ev.class_id;

        // Earliest connect time: 15 minutes before, but never while the
        // previous class in this room is still running.
        Timestamp earliest = ev.start - 15;
        for (const auto* other : room_classes)
            if (other != &ev && other->end <= ev.start && other->end > earliest) earliest = other->end;

        std::vector<std::string> enrolled(roster.enrolled.begin(), roster.enrolled.end());
        rng_.shuffle(enrolled);
        const auto target = static_cast<std::size_t>(
            std::lround(rng_.uniform(cfg_.attendance_min, cfg_.attendance_max) * static_cast<double>(enrolled.size())));
        std::set<std::string> attendees;
        std::vector<std::string> absentees;
        for (const auto& u : enrolled) {
            if (attendees.size() < target && !busy(u, ev.window())) attendees.insert(u);
            else absentees.push_back(u);
        }
        if (cfg_.walk_in_probability > 0) {
            const auto walk_ins = static_cast<std::size_t>(std::lround(cfg_.walk_in_probability * static_cast<double>(attendees.size())));
            for (std::size_t i = 0; i < walk_ins; ++i) {
                const auto& u = campus_.population[rng_.index(campus_.population.size())];
                if (!roster.contains(u) && !busy(u, ev.window())) attendees.insert(u);
            }
        }
        truth.attendees[ev.class_id] = attendees;
        truth.counts[ev.class_id] = static_cast<double>(attendees.size());
        truth.connected_attendees[ev.class_id];
        truth.non_connecting[ev.class_id];
        current_attendees_ = &truth.attendees[ev.class_id];

        const std::int64_t dur = ev.duration();
        for (const auto& u : attendees) {
            busy_[u].push_back(ev.window());
            if (rng_.bernoulli(cfg_.non_connecting_probability)) {
                truth.non_connecting[ev.class_id].insert(u);
                continue;
            }
            Timestamp arrive = ev.start + static_cast<std::int64_t>(std::lround(rng_.normal(-2, 4)));
            if (rng_.bernoulli(cfg_.late_probability))
                arrive = ev.start + static_cast<std::int64_t>(std::lround(rng_.exponential(cfg_.late_mean_minutes)));
            arrive = std::clamp(arrive, earliest, ev.end - std::max<std::int64_t>(5, dur / 4));
            Timestamp depart = ev.end - static_cast<std::int64_t>(std::lround(std::abs(rng_.normal(0, 2))));
            if (rng_.bernoulli(cfg_.early_leave_probability))
                depart = arrive + static_cast<std::int64_t>(std::lround(rng_.uniform(0.3, 0.9) * static_cast<double>(depart - arrive)));
            if (depart <= arrive) depart = arrive + 1;

            const auto devices = static_cast<int>(rng_.weighted(cfg_.device_weights)) + 1;
            const auto seat = occupant_ap(room);
            for (int d = 0; d < devices; ++d) {
                Timestamp a = arrive, b = depart;
                if (d > 0 && rng_.bernoulli(0.3)) {
                    a = arrive + static_cast<std::int64_t>(rng_.uniform(0, 0.5) * static_cast<double>(depart - arrive));
                    b = a + std::max<std::int64_t>(1, static_cast<std::int64_t>(rng_.uniform(0.2, 1.0) * static_cast<double>(depart - a)));
                }
                device_sessions(u, d, room, seat, a, b);
            }
        }
        current_attendees_ = nullptr;

        // Bystanders around the room while the class runs.
        auto visit = [&](std::string_view user, const std::string& ap, bool absentee) {
            const double dwell = absentee ? cfg_.absentee_dwell_mean : cfg_.bystander_dwell_mean;
            Timestamp a, b;
            if (!absentee && rng_.bernoulli(cfg_.lingerer_fraction)) {
                a = ev.start + rng_.integer(-90, std::max<std::int64_t>(0, dur - 10));
                b = a + rng_.integer(30, 240);
            } else {
                a = ev.start + rng_.integer(-10, dur + 10);
                b = a + 1 + static_cast<std::int64_t>(std::lround(rng_.exponential(dwell)));
            }
            if (!Interval{a, b}.overlaps(ev.window())) return;
            emit(std::string(user), 0, ap, a, b, Spot::Outside);
            truth.bystanders[ev.class_id].insert(std::string(user));
        };
        const auto arrivals = rng_.poisson(cfg_.bystander_rate_per_hour * static_cast<double>(dur + 20) / 60.0);
        for (std::int64_t i = 0; i < arrivals; ++i) {
            std::string user;
            for (int tries = 0; tries < 20 && user.empty(); ++tries) {
                const auto& u = campus_.population[rng_.index(campus_.population.size())];
                if (!roster.contains(u) && !attendees.contains(u) && !busy(u, ev.window())) user = u;
            }
            if (user.empty()) continue;
            const bool inroom = rng_.bernoulli(cfg_.bystander_inroom_probability) || room.doorway_aps.empty();
            visit(user, inroom ? room.aps[rng_.weighted(room.ap_weights)] : room.doorway_aps[rng_.index(room.doorway_aps.size())], false);
        }

        // Enrolled students who skipped: some hang around the door, some are
        // connected somewhere else on campus.
        for (const auto& u : absentees) {
            if (busy(u, ev.window())) continue;
            const double p = rng_.uniform();
            if (p < cfg_.absentee_nearby_probability) {
                if (!room.doorway_aps.empty()) visit(u, room.doorway_aps[rng_.index(room.doorway_aps.size())], true);
            } else if (p < cfg_.absentee_nearby_probability + cfg_.absentee_campus_probability && !campus_.far_aps.empty()) {
                const Timestamp a = ev.start + rng_.integer(-60, std::max<std::int64_t>(0, dur - 10));
                emit(u, 0, campus_.far_aps[rng_.index(campus_.far_aps.size())], a, a + rng_.integer(20, 180), Spot::Outside);
            }
        }
        current_class_ = nullptr;
    }

    // Campus-wide users unrelated to any class: steady load on corridor APs,
    // and on room APs while the room is free.
    void simulate_background(const std::map<std::string, std::vector<const ClassEvent*>>& by_room)
    {
        std::set<Timestamp> days;
        for (const auto& ev : campus_.timetable) days.insert(day_start(ev.start));
        const std::int64_t open = 8 * 60, close = cfg_.report_minute;
        auto run_ap = [&](const std::string& ap, double concurrency, const std::vector<Interval>* blocked) {
            for (const auto day : days) {
                const double rate = concurrency / cfg_.background_dwell_mean; // arrivals per minute
                const auto n = rng_.poisson(rate * static_cast<double>(close - open));
                for (std::int64_t i = 0; i < n; ++i) {
                    const Timestamp a = day + rng_.integer(open, close - 1);
                    const Timestamp b = a + 1 + static_cast<std::int64_t>(std::lround(rng_.exponential(cfg_.background_dwell_mean)));
                    const Interval span{a, b};
                    if (blocked && std::any_of(blocked->begin(), blocked->end(), [&](const Interval& w) {
                            return w.overlaps(Interval{span.start, span.end + 15});
                        }))
                        continue;
                    const auto& user = campus_.population[rng_.index(campus_.population.size())];
                    if (busy(user, span)) continue;
                    emit(user, 0, ap, a, b, Spot::Outside);
                }
            }
        };
        for (const auto& ap : campus_.corridor_aps) run_ap(ap, cfg_.corridor_background, nullptr);
        for (const auto& [id, room] : campus_.rooms) {
            std::vector<Interval> blocked;
            if (const auto it = by_room.find(id); it != by_room.end())
                for (const auto* ev : it->second) blocked.push_back({ev->start - 15, ev->end});
            for (const auto& ap : room.aps) run_ap(ap, cfg_.room_background, &blocked);
        }
    }

    const Campus& campus_;
    const SimConfig& cfg_;
    Rng rng_;
    SimOutput out_;
    std::unordered_map<std::string, std::vector<Interval>> busy_;
    std::unordered_map<std::string, std::vector<std::string>> macs_;
    const std::string* current_class_ = nullptr;
    const std::set<std::string>* current_attendees_ = nullptr;
};

} // namespace detail

/// Session log plus ground truth for a generated campus.
inline SimOutput simulate_sessions(const Campus& campus, const SimConfig& cfg)
{
    return detail::SessionSimulator(campus, cfg).run();
}

/// Names of the files written by write_simulation, relative to its directory.
struct SimFiles {
    static constexpr const char* sessions = "sessions.csv";
    static constexpr const char* timetable = "timetable.csv";
    static constexpr const char* roster = "roster.csv";
    static constexpr const char* inventory = "inventory.csv";
    static constexpr const char* truth_users = "ground_truth_users.csv";
    static constexpr const char* truth_counts = "ground_truth_counts.csv";
    static constexpr const char* config = "sim_config.txt";
};

inline void write_ground_truth(std::ostream& users, std::ostream& counts, const Campus& campus, const GroundTruth& truth)
{
    write_row(users, {"class_id", "user_id", "occupant"});
    write_row(counts, {"class_id", "true_count"});
    for (const auto& ev : campus.timetable) {
        const auto att = truth.attendees.find(ev.class_id);
        if (att == truth.attendees.end()) continue;
        std::map<std::string, bool> flags;
        for (const auto& u : att->second) flags[u] = true;
        if (const auto b = truth.bystanders.find(ev.class_id); b != truth.bystanders.end())
            for (const auto& u : b->second) flags.emplace(u, false);
        for (const auto& [u, occ] : flags) write_row(users, {ev.class_id, u, occ ? "1" : "0"});
        write_row(counts, {ev.class_id, format_double(truth.counts.at(ev.class_id))});
    }
}

inline void write_simulation(const std::filesystem::path& dir, const Campus& campus, const SimOutput& sim,
                             const SimConfig& cfg)
{
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name);
        if (!out) throw usage_error("cannot write '" + (dir / name).string() + "'");
        return out;
    };
    {
        auto out = open(SimFiles::sessions);
        write_sessions(out, sim.sessions);
    }
    {
        auto out = open(SimFiles::timetable);
        write_timetable(out, campus.timetable);
    }
    {
        auto out = open(SimFiles::roster);
        write_rosters(out, campus.rosters);
    }
    {
        auto out = open(SimFiles::inventory);
        write_inventory(out, campus.inventory);
    }
    {
        auto users = open(SimFiles::truth_users);
        auto counts = open(SimFiles::truth_counts);
        write_ground_truth(users, counts, campus, sim.truth);
    }
    {
        auto out = open(SimFiles::config);
        cfg.to_keyvalue().write(out);
    }
}

} // namespace wocc
