#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wocc/error.hpp"
#include "wocc/interval.hpp"
#include "wocc/text.hpp"
#include "wocc/time.hpp"

namespace wocc {

enum class SessionStatus { Associated, Disassociated };

/// One association event in the controller's session report.
struct SessionRecord {
    std::string user_id;
    std::string device_mac;
    Timestamp assoc_time;
    std::optional<Timestamp> disassoc_time;
    std::int64_t duration = 0; // minutes, recomputed from the effective end
    std::string ap_name;
    std::int64_t bytes_tx = 0;
    std::int64_t bytes_rcvd = 0;
    std::optional<double> snr;
    std::optional<double> rssi; // dBm, usually negative
    SessionStatus status = SessionStatus::Disassociated;
    std::optional<std::int64_t> retries;

    Timestamp end() const { return assoc_time + duration; }
    Interval span() const { return {assoc_time, end()}; }
};

/// A single timetabled meeting of a class in a room.
struct ClassEvent {
    std::string class_id;
    std::string room_id;
    Timestamp start;
    Timestamp end;

    std::int64_t duration() const { return end - start; }
    Interval window() const { return {start, end}; }
};

inline constexpr std::array<std::int64_t, 7> kAllowedClassDurations{30, 60, 90, 120, 150, 180, 240};

struct Roster {
    std::string class_id;
    std::set<std::string> enrolled;

    bool contains(const std::string& user) const { return enrolled.contains(user); }
};

using RosterMap = std::map<std::string, Roster>;

inline constexpr std::string_view kCorridor = "corridor";

struct ApLocation {
    std::string location; // room_id, or "corridor"
    std::string building;
    std::string floor;

    bool is_corridor() const { return location == kCorridor; }
};

/// Ground-truth AP placement; consulted only when scoring a mapping.
using ApInventory = std::map<std::string, ApLocation>;

struct RowIssue {
    std::size_t line = 0;
    std::string message;
};

struct LoadReport {
    std::size_t rows = 0;
    std::vector<RowIssue> rejects;
    std::vector<RowIssue> warnings;
};

struct LoadedSessions {
    std::vector<SessionRecord> records;
    LoadReport report;
};

struct SessionLoadOptions {
    char delimiter = ',';
    /// Fixed report-generation instant for ongoing sessions. When unset, each
    /// ongoing session ends at `report_minute_of_day` on its association date.
    std::optional<Timestamp> report_time;
    std::int64_t report_minute_of_day = 21 * 60;
};

inline const std::vector<std::string>& session_columns()
{
    static const std::vector<std::string> cols{"user_id",  "mac_address", "association_time", "disassociation_time",
                                               "session_duration", "ap_name", "bytes_tx", "bytes_rcvd",
                                               "snr",      "rssi",        "status"};
    return cols;
}

namespace detail {

inline bool is_absent(std::string_view s) { return s.empty() || s == "-" || s == "NA"; }

inline std::string lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

/// "35 min", "35", "35min" -> 35.
inline std::optional<std::int64_t> parse_duration_field(std::string_view s)
{
    s = trim(s);
    std::size_t digits = 0;
    while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits]))) ++digits;
    if (digits == 0) return std::nullopt;
    const auto rest = trim(s.substr(digits));
    if (!rest.empty() && lower(rest) != "min" && lower(rest) != "mins") return std::nullopt;
    return parse_int(s.substr(0, digits));
}

inline std::optional<SessionStatus> parse_status(std::string_view s)
{
    const auto v = lower(trim(s));
    if (v == "disass" || v == "disassociated") return SessionStatus::Disassociated;
    if (v == "ass" || v == "associated") return SessionStatus::Associated;
    return std::nullopt;
}

// Returns an error message, or empty on success.
inline std::string parse_session_row(const std::vector<std::string>& f, const SessionLoadOptions& opts,
                                     SessionRecord& rec, std::vector<std::string>& warnings)
{
    if (f.size() < 11) return "expected at least 11 columns, found " + std::to_string(f.size());
    rec = SessionRecord{};
    rec.user_id = f[0];
    rec.device_mac = f[1];
    rec.ap_name = f[5];
    if (rec.user_id.empty()) return "empty user_id";
    if (rec.device_mac.empty()) return "empty mac_address";
    if (rec.ap_name.empty()) return "empty ap_name";

    const auto assoc = parse_timestamp(f[2]);
    if (!assoc) return "bad association_time '" + f[2] + "'";
    rec.assoc_time = *assoc;

    const auto status = parse_status(f[10]);
    if (!status) return "bad status '" + f[10] + "'";
    rec.status = *status;

    Timestamp effective_end;
    if (rec.status == SessionStatus::Disassociated) {
        const auto dis = parse_timestamp(f[3]);
        if (!dis) return "disassociated session without a valid disassociation_time";
        if (*dis < rec.assoc_time) return "disassociation_time precedes association_time";
        rec.disassoc_time = dis;
        effective_end = *dis;
    } else {
        if (!is_absent(f[3])) return "ongoing session carries a disassociation_time";
        effective_end = opts.report_time ? *opts.report_time : day_start(rec.assoc_time) + opts.report_minute_of_day;
        if (effective_end < rec.assoc_time) return "ongoing session associated after report generation";
    }
    rec.duration = effective_end - rec.assoc_time;

    if (!is_absent(f[4])) {
        const auto logged = parse_duration_field(f[4]);
        if (!logged) warnings.push_back("unparseable session_duration '" + f[4] + "'");
        else if (*logged != rec.duration)
            warnings.push_back("logged duration " + std::to_string(*logged) + " min differs from recomputed " +
                               std::to_string(rec.duration) + " min");
    }

    auto counter = [&](const std::string& s, std::int64_t& out, const char* name) -> std::string {
        if (is_absent(s)) return {};
        const auto v = parse_int(s);
        if (!v || *v < 0) return std::string("bad ") + name + " '" + s + "'";
        out = *v;
        return {};
    };
    if (auto e = counter(f[6], rec.bytes_tx, "bytes_tx"); !e.empty()) return e;
    if (auto e = counter(f[7], rec.bytes_rcvd, "bytes_rcvd"); !e.empty()) return e;

    auto metric = [&](const std::string& s, std::optional<double>& out, const char* name) -> std::string {
        if (is_absent(s)) return {};
        out = parse_double(s);
        if (!out) return std::string("bad ") + name + " '" + s + "'";
        return {};
    };
    if (auto e = metric(f[8], rec.snr, "snr"); !e.empty()) return e;
    if (auto e = metric(f[9], rec.rssi, "rssi"); !e.empty()) return e;

    if (f.size() > 11 && !is_absent(f[11])) {
        const auto r = parse_int(f[11]);
        if (!r || *r < 0) return "bad retries '" + f[11] + "'";
        rec.retries = r;
    }
    return {};
}

inline std::ifstream open_input(const std::filesystem::path& path, std::string_view what)
{
    std::ifstream in(path);
    if (!in) throw usage_error(std::string("cannot read ") + std::string(what) + " file '" + path.string() + "'");
    return in;
}

} // namespace detail

/// Parses a session report. Malformed rows land in the rejects list; more than
/// half the rows rejected means the wrong file was supplied and is fatal.
inline LoadedSessions load_sessions(std::istream& in, const SessionLoadOptions& opts = {})
{
    if (!in) throw validation_error("sessions: unreadable source");
    RowReader reader(in, opts.delimiter);
    read_header(reader, session_columns(), "sessions");

    LoadedSessions out;
    std::vector<std::string> row;
    std::vector<std::string> warnings;
    while (reader.next(row)) {
        ++out.report.rows;
        SessionRecord rec;
        warnings.clear();
        const auto err = detail::parse_session_row(row, opts, rec, warnings);
        if (!err.empty()) {
            out.report.rejects.push_back({reader.line(), err});
            continue;
        }
        for (auto& w : warnings) out.report.warnings.push_back({reader.line(), std::move(w)});
        out.records.push_back(std::move(rec));
    }
    if (in.bad()) throw validation_error("sessions: read error");
    if (out.report.rows > 0 && out.report.rejects.size() * 2 > out.report.rows)
        throw validation_error("sessions: " + std::to_string(out.report.rejects.size()) + " of " +
                               std::to_string(out.report.rows) + " rows rejected; first problem at line " +
                               std::to_string(out.report.rejects.front().line) + ": " +
                               out.report.rejects.front().message);
    return out;
}

inline LoadedSessions load_sessions(const std::filesystem::path& path, const SessionLoadOptions& opts = {})
{
    auto in = detail::open_input(path, "sessions");
    return load_sessions(in, opts);
}

inline const std::vector<std::string>& timetable_columns()
{
    static const std::vector<std::string> cols{"class_id", "room_id", "date", "start", "end"};
    return cols;
}

inline std::vector<ClassEvent> load_timetable(std::istream& in, char delim = ',')
{
    RowReader reader(in, delim);
    read_header(reader, timetable_columns(), "timetable");
    std::vector<ClassEvent> events;
    std::set<std::string> seen;
    std::vector<std::string> f;
    while (reader.next(f)) {
        const auto where = "timetable line " + std::to_string(reader.line()) + ": ";
        if (f.size() < 5) throw validation_error(where + "expected 5 columns");
        const auto date = parse_date(f[2]);
        const auto start = parse_clock(f[3]);
        const auto end = parse_clock(f[4]);
        if (f[0].empty() || f[1].empty()) throw validation_error(where + "empty class_id or room_id");
        if (!date || !start || !end) throw validation_error(where + "bad date or time");
        ClassEvent ev{f[0], f[1], *date + *start, *date + *end};
        if (ev.end <= ev.start) throw validation_error(where + "class ends before it starts");
        if (std::find(kAllowedClassDurations.begin(), kAllowedClassDurations.end(), ev.duration()) ==
            kAllowedClassDurations.end())
            throw validation_error(where + "unsupported class duration " + std::to_string(ev.duration()) + " min");
        if (!seen.insert(ev.class_id).second) throw validation_error(where + "duplicate class_id '" + ev.class_id + "'");
        events.push_back(std::move(ev));
    }
    return events;
}

inline std::vector<ClassEvent> load_timetable(const std::filesystem::path& path, char delim = ',')
{
    auto in = detail::open_input(path, "timetable");
    return load_timetable(in, delim);
}

inline RosterMap load_rosters(std::istream& in, char delim = ',')
{
    RowReader reader(in, delim);
    read_header(reader, std::vector<std::string>{"class_id", "user_id"}, "roster");
    RosterMap rosters;
    std::vector<std::string> f;
    while (reader.next(f)) {
        const auto where = "roster line " + std::to_string(reader.line()) + ": ";
        if (f.size() < 2 || f[0].empty() || f[1].empty()) throw validation_error(where + "expected class_id,user_id");
        auto& r = rosters[f[0]];
        r.class_id = f[0];
        if (!r.enrolled.insert(f[1]).second)
            throw validation_error(where + "duplicate enrollment of '" + f[1] + "' in '" + f[0] + "'");
    }
    return rosters;
}

inline RosterMap load_rosters(const std::filesystem::path& path, char delim = ',')
{
    auto in = detail::open_input(path, "roster");
    return load_rosters(in, delim);
}

inline ApInventory load_inventory(std::istream& in, char delim = ',')
{
    RowReader reader(in, delim);
    read_header(reader, std::vector<std::string>{"ap_name", "location", "building", "floor"}, "inventory");
    ApInventory inv;
    std::vector<std::string> f;
    while (reader.next(f)) {
        const auto where = "inventory line " + std::to_string(reader.line()) + ": ";
        if (f.size() < 4 || f[0].empty() || f[1].empty()) throw validation_error(where + "expected ap_name,location,building,floor");
        if (!inv.emplace(f[0], ApLocation{f[1], f[2], f[3]}).second)
            throw validation_error(where + "duplicate ap_name '" + f[0] + "'");
    }
    return inv;
}

inline ApInventory load_inventory(const std::filesystem::path& path, char delim = ',')
{
    auto in = detail::open_input(path, "inventory");
    return load_inventory(in, delim);
}

inline void write_sessions(std::ostream& out, std::span<const SessionRecord> records, char delim = ',')
{
    write_row(out, {"User ID", "MAC address", "Association time", "Disassociation time", "Session duration", "AP name",
                    "Bytes Tx", "Bytes Rcvd", "SNR", "RSSI", "Status", "Retries"},
              delim);
    for (const auto& r : records) {
        const bool ongoing = r.status == SessionStatus::Associated;
        write_row(out,
                  {r.user_id, r.device_mac, format_timestamp(r.assoc_time),
                   ongoing ? std::string("-") : format_timestamp(r.end()), std::to_string(r.duration) + " min",
                   r.ap_name, std::to_string(r.bytes_tx), std::to_string(r.bytes_rcvd),
                   r.snr ? format_double(*r.snr) : std::string(), r.rssi ? format_double(*r.rssi) : std::string(),
                   ongoing ? "Ass" : "Disass", r.retries ? std::to_string(*r.retries) : std::string()},
                  delim);
    }
}

inline void write_timetable(std::ostream& out, std::span<const ClassEvent> events, char delim = ',')
{
    write_row(out, {"class_id", "room_id", "date", "start", "end"}, delim);
    for (const auto& e : events)
        write_row(out, {e.class_id, e.room_id, format_date(e.start), format_clock(minute_of_day(e.start)),
                        format_clock(e.end - day_start(e.start))},
                  delim);
}

inline void write_rosters(std::ostream& out, const RosterMap& rosters, char delim = ',')
{
    write_row(out, {"class_id", "user_id"}, delim);
    for (const auto& [id, r] : rosters)
        for (const auto& u : r.enrolled) write_row(out, {id, u}, delim);
}

inline void write_inventory(std::ostream& out, const ApInventory& inv, char delim = ',')
{
    write_row(out, {"ap_name", "location", "building", "floor"}, delim);
    for (const auto& [ap, loc] : inv) write_row(out, {ap, loc.location, loc.building, loc.floor}, delim);
}

/// Immutable, time-indexed view over loaded sessions. All queries are const
/// and may run concurrently.
class SessionStore {
public:
    SessionStore() = default;

    explicit SessionStore(std::vector<SessionRecord> records) : records_(std::move(records))
    {
        std::stable_sort(records_.begin(), records_.end(),
                         [](const SessionRecord& a, const SessionRecord& b) { return a.assoc_time < b.assoc_time; });
        for (std::size_t i = 0; i < records_.size(); ++i) {
            max_duration_ = std::max(max_duration_, records_[i].duration);
            auto& idx = by_ap_[records_[i].ap_name];
            idx.rows.push_back(i);
            idx.max_duration = std::max(idx.max_duration, records_[i].duration);
        }
    }

    std::span<const SessionRecord> records() const { return records_; }
    std::size_t size() const { return records_.size(); }

    /// Sessions with a non-empty overlap with `window`, unclipped, in
    /// association order.
    std::vector<const SessionRecord*> overlapping(const Interval& window) const
    {
        std::vector<const SessionRecord*> out;
        auto first = std::lower_bound(records_.begin(), records_.end(), window.start - max_duration_,
                                      [](const SessionRecord& r, Timestamp t) { return r.assoc_time < t; });
        for (auto it = first; it != records_.end() && it->assoc_time < window.end; ++it)
            if (it->span().overlaps(window)) out.push_back(&*it);
        return out;
    }

    /// Users whose merged sessions on `ap` cover `at`; devices collapse to
    /// one user. Unknown APs yield an empty set.
    std::set<std::string> connected_users(std::string_view ap, Timestamp at) const
    {
        std::set<std::string> users;
        const auto found = by_ap_.find(std::string(ap));
        if (found == by_ap_.end()) return users;
        const auto& idx = found->second;
        const Timestamp lower = at - idx.max_duration;
        auto first = std::lower_bound(idx.rows.begin(), idx.rows.end(), lower,
                                      [&](std::size_t i, Timestamp t) { return records_[i].assoc_time < t; });
        for (auto it = first; it != idx.rows.end() && records_[*it].assoc_time <= at; ++it)
            if (records_[*it].span().contains(at)) users.insert(records_[*it].user_id);
        return users;
    }

    /// Sessions on `aps` overlapping the class, with bounds clipped to the
    /// class window.
    std::vector<SessionRecord> class_window_sessions(const ClassEvent& cls, const std::set<std::string>& aps) const
    {
        std::vector<SessionRecord> out;
        const auto window = cls.window();
        for (const auto* r : overlapping(window)) {
            if (!aps.contains(r->ap_name)) continue;
            const auto clipped = intersect(r->span(), window);
            if (!clipped) continue;
            SessionRecord c = *r;
            c.assoc_time = clipped->start;
            c.duration = clipped->length();
            if (c.disassoc_time) c.disassoc_time = clipped->end;
            out.push_back(std::move(c));
        }
        return out;
    }

    std::vector<std::string> ap_names() const
    {
        std::vector<std::string> names;
        for (const auto& [ap, idx] : by_ap_) names.push_back(ap);
        std::sort(names.begin(), names.end());
        return names;
    }

private:
    struct ApIndex {
        std::vector<std::size_t> rows;
        std::int64_t max_duration = 0;
    };

    std::vector<SessionRecord> records_;
    std::unordered_map<std::string, ApIndex> by_ap_;
    std::int64_t max_duration_ = 0;
};

} // namespace wocc
