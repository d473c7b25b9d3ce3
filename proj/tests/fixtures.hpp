#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wocc/session_store.hpp"
#include "wocc/time.hpp"

namespace fx {

using namespace wocc;

inline Timestamp at(int h, int m, int day = 7) { return make_timestamp(2017, 8, static_cast<unsigned>(day), h, m); }

inline SessionRecord session(std::string user, std::string mac, std::string ap, Timestamp start, Timestamp end,
                             std::optional<double> rssi = std::nullopt)
{
    SessionRecord s;
    s.user_id = std::move(user);
    s.device_mac = std::move(mac);
    s.ap_name = std::move(ap);
    s.assoc_time = start;
    s.disassoc_time = end;
    s.duration = end - start;
    s.rssi = rssi;
    s.snr = rssi ? std::optional<double>(*rssi + 95) : std::nullopt;
    s.bytes_tx = 1000;
    s.bytes_rcvd = 2000;
    return s;
}

inline ClassEvent klass(std::string id, std::string room, Timestamp start, Timestamp end)
{
    return ClassEvent{std::move(id), std::move(room), start, end};
}

// Four users in one room on one day: class1 09:00-10:00, class3 11:00-14:00.
struct DailyTrace {
    ClassEvent class1 = klass("class1", "r1", at(9, 0), at(10, 0));
    ClassEvent class3 = klass("class3", "r1", at(11, 0), at(14, 0));
    std::set<std::string> room_aps{"r1-ap1", "r1-ap2"};
    std::vector<SessionRecord> sessions{
        // S1: two devices in class1
        session("S1", "aa:01", "r1-ap1", at(9, 20), at(9, 40), -60),
        session("S1", "aa:02", "r1-ap2", at(9, 30), at(10, 0), -63),
        // S2: straddles the start of class3, returns at the end and after
        session("S2", "bb:01", "r1-ap1", at(10, 50), at(11, 40), -66),
        session("S2", "bb:01", "r1-ap1", at(13, 50), at(14, 0), -66),
        session("S2", "bb:01", "r1-ap2", at(14, 20), at(14, 40), -66),
        // S3: short stay in the middle of class3
        session("S3", "cc:01", "r1-ap2", at(12, 0), at(12, 45), -60),
        // S4: around in the morning, brief visit during class3
        session("S4", "dd:01", "r1-ap1", at(9, 0), at(10, 25), -61),
        session("S4", "dd:01", "r1-ap1", at(12, 0), at(12, 40), -63),
    };
};

} // namespace fx
