#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wocc/error.hpp"
#include "wocc/keyvalue.hpp"
#include "wocc/lda.hpp"
#include "wocc/metrics.hpp"
#include "wocc/rng.hpp"
#include "wocc/session_store.hpp"
#include "wocc/text.hpp"
#include "wocc/user_features.hpp"

namespace wocc {

/// Everything observed for one class on its room's APs.
struct ClassObservation {
    ClassEvent cls;
    std::vector<UserFeatureVector> users; // labeled when a roster is known
    std::size_t wifi_count = 0;
    std::size_t enrolled_wifi_count = 0;
};

inline ClassObservation observe_class(const SessionStore& store, const ClassEvent& cls, const Roster* roster,
                                      const std::set<std::string>& room_aps)
{
    ClassObservation obs{cls, extract_class_features(store, cls, room_aps), 0, 0};
    obs.wifi_count = obs.users.size();
    for (auto& u : obs.users) {
        if (!roster) continue;
        u.label = label_user(u.user_id, *roster);
        if (*u.label == UserLabel::Occupant) ++obs.enrolled_wifi_count;
    }
    return obs;
}

struct OccupancyModel {
    LdaModel lda;
    CalibrationModel calibration;
    double rssi_fill = 0; // substituted for users whose sessions carried no RSSI
};

/// Number of users the classifier calls occupants.
inline std::size_t count_occupants_lda(std::span<const UserFeatureVector> users, const LdaModel& lda, double rssi_fill)
{
    std::set<std::string> occupants;
    for (auto u : users) {
        if (std::isnan(u.avg_rssi)) u.avg_rssi = rssi_fill;
        if (lda.predict(u.values()).label == UserLabel::Occupant) occupants.insert(u.user_id);
    }
    return occupants.size();
}

using TruthCounts = std::map<std::string, double>;

struct TrainingSummary {
    OccupancyModel model;
    std::vector<FeatureScore> ranking;
    std::size_t users = 0;
    std::size_t classes = 0;
    std::size_t imputed_rssi = 0;
};

/// LDA on every labeled user of the given classes, then least squares from
/// the LDA count to ground truth on those classes that have it.
inline TrainingSummary train_occupancy_model(std::span<const ClassObservation> train, const TruthCounts& truth)
{
    std::vector<UserFeatureVector> users;
    for (const auto& obs : train)
        for (const auto& u : obs.users)
            if (u.label) users.push_back(u);
    if (users.empty()) throw validation_error("train: no labeled WiFi users in the training classes");

    TrainingSummary s;
    s.model.rssi_fill = mean_rssi(users);
    if (std::isnan(s.model.rssi_fill)) s.model.rssi_fill = 0.0;
    impute_rssi(users, s.model.rssi_fill);
    s.imputed_rssi = static_cast<std::size_t>(std::count_if(users.begin(), users.end(), [](const auto& u) { return u.rssi_imputed; }));
    s.model.lda = train_lda(users);
    s.ranking = rank_features(users);
    s.users = users.size();

    std::vector<std::pair<double, double>> pairs;
    for (const auto& obs : train) {
        const auto t = truth.find(obs.cls.class_id);
        if (t == truth.end()) continue;
        pairs.emplace_back(static_cast<double>(count_occupants_lda(obs.users, s.model.lda, s.model.rssi_fill)), t->second);
    }
    s.classes = pairs.size();
    s.model.calibration = fit_calibration(pairs);
    return s;
}

struct OccupancyEstimate {
    std::string class_id;
    std::string room_id;
    std::size_t wifi_count = 0;
    std::size_t enrolled_wifi_count = 0;
    std::size_t lda_count = 0;
    double calibrated_count = 0;
    std::optional<double> ground_truth;
};

inline OccupancyEstimate estimate_class(const ClassObservation& obs, const OccupancyModel& model,
                                        std::optional<double> truth = std::nullopt)
{
    OccupancyEstimate e;
    e.class_id = obs.cls.class_id;
    e.room_id = obs.cls.room_id;
    e.wifi_count = obs.wifi_count;
    e.enrolled_wifi_count = obs.enrolled_wifi_count;
    e.lda_count = count_occupants_lda(obs.users, model.lda, model.rssi_fill);
    e.calibrated_count = model.calibration.predict(static_cast<double>(e.lda_count));
    e.ground_truth = truth;
    return e;
}

// ---------------------------------------------------------------------------
// Train/test split and method comparison
// ---------------------------------------------------------------------------

struct ClassSplit {
    std::set<std::string> train;
    std::set<std::string> test;
};

/// Seeded split by class: ids are sorted, shuffled, and the first
/// round(ratio * n) go to training.
inline ClassSplit split_classes(std::vector<std::string> ids, double train_ratio, std::uint64_t seed)
{
    if (train_ratio < 0 || train_ratio > 1) throw usage_error("train ratio must lie in [0, 1]");
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    Rng rng(seed);
    rng.shuffle(ids);
    const auto n_train = static_cast<std::size_t>(std::floor(train_ratio * static_cast<double>(ids.size()) + 0.5));
    ClassSplit s;
    for (std::size_t i = 0; i < ids.size(); ++i) (i < n_train ? s.train : s.test).insert(ids[i]);
    return s;
}

struct BreakdownRow {
    std::string key;
    std::size_t classes = 0;
    double smape = 0;
};

struct MethodComparison {
    double raw_wifi_lr = 0;      // (a) regression on all WiFi users
    double enrolled_wifi_lr = 0; // (b) regression on enrolled WiFi users
    double lda = 0;              // (c) classifier count alone
    double lda_lr = 0;           // (d) classifier count, calibrated
    std::size_t train_classes = 0;
    std::size_t test_classes = 0;
    CalibrationModel raw_fit;
    CalibrationModel enrolled_fit;
    std::optional<double> pearson_wifi;     // vs ground truth, all classes with truth
    std::optional<double> pearson_enrolled;
    std::vector<BreakdownRow> by_occupancy; // method (d), test split
    std::vector<BreakdownRow> by_room;
};

inline std::string occupancy_level(double truth)
{
    if (truth <= 100) return "0-100";
    const auto b = static_cast<long>(std::ceil(truth / 100.0)) - 1;
    return std::to_string(b * 100 + 1) + "-" + std::to_string((b + 1) * 100);
}

/// Scores the four estimators on the test split. (a) and (b) are fitted on
/// the training split here; (c) uses lda_count; (d) uses calibrated_count as
/// produced by the occupancy model.
inline MethodComparison method_comparison(std::span<const OccupancyEstimate> estimates, double train_ratio,
                                          std::uint64_t seed)
{
    std::vector<std::string> ids;
    for (const auto& e : estimates)
        if (e.ground_truth) ids.push_back(e.class_id);
    const auto split = split_classes(ids, train_ratio, seed);

    MethodComparison mc;
    std::vector<std::pair<double, double>> raw_pairs, enr_pairs;
    std::vector<const OccupancyEstimate*> test;
    std::vector<double> all_truth, all_raw, all_enr;
    for (const auto& e : estimates) {
        if (!e.ground_truth) continue;
        all_truth.push_back(*e.ground_truth);
        all_raw.push_back(static_cast<double>(e.wifi_count));
        all_enr.push_back(static_cast<double>(e.enrolled_wifi_count));
        if (split.train.contains(e.class_id)) {
            raw_pairs.emplace_back(static_cast<double>(e.wifi_count), *e.ground_truth);
            enr_pairs.emplace_back(static_cast<double>(e.enrolled_wifi_count), *e.ground_truth);
        } else {
            test.push_back(&e);
        }
    }
    if (test.empty()) throw validation_error("evaluate: empty test split");
    mc.train_classes = raw_pairs.size();
    mc.test_classes = test.size();
    mc.raw_fit = fit_calibration(raw_pairs);
    mc.enrolled_fit = fit_calibration(enr_pairs);

    std::vector<double> actual, fa, fb, fc, fd;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_level, by_room;
    for (const auto* e : test) {
        actual.push_back(*e->ground_truth);
        fa.push_back(mc.raw_fit.predict(static_cast<double>(e->wifi_count)));
        fb.push_back(mc.enrolled_fit.predict(static_cast<double>(e->enrolled_wifi_count)));
        fc.push_back(static_cast<double>(e->lda_count));
        fd.push_back(e->calibrated_count);
        auto& lv = by_level[occupancy_level(*e->ground_truth)];
        lv.first.push_back(e->calibrated_count);
        lv.second.push_back(*e->ground_truth);
        auto& rm = by_room[e->room_id];
        rm.first.push_back(e->calibrated_count);
        rm.second.push_back(*e->ground_truth);
    }
    mc.raw_wifi_lr = smape(fa, actual);
    mc.enrolled_wifi_lr = smape(fb, actual);
    mc.lda = smape(fc, actual);
    mc.lda_lr = smape(fd, actual);

    auto level_key = [](const std::string& k) { return std::stol(k.substr(0, k.find('-'))); };
    std::vector<std::string> levels;
    for (const auto& [k, v] : by_level) levels.push_back(k);
    std::sort(levels.begin(), levels.end(), [&](const auto& a, const auto& b) { return level_key(a) < level_key(b); });
    for (const auto& k : levels)
        mc.by_occupancy.push_back({k, by_level[k].first.size(), smape(by_level[k].first, by_level[k].second)});
    for (const auto& [k, v] : by_room) mc.by_room.push_back({k, v.first.size(), smape(v.first, v.second)});

    try {
        mc.pearson_wifi = pearson(all_raw, all_truth);
        mc.pearson_enrolled = pearson(all_enr, all_truth);
    } catch (const Error&) {
        // constant or too-short series: correlation undefined, left empty
    }
    return mc;
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

namespace detail {

inline std::string join_numbers(const Eigen::VectorXd& v)
{
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += format_double(v(i));
    }
    return out;
}

inline Eigen::VectorXd split_numbers(const std::string& s, Eigen::Index expected, const std::string& key)
{
    std::istringstream in(s);
    std::vector<double> vals;
    std::string tok;
    while (in >> tok) {
        const auto d = parse_double(tok);
        if (!d) throw validation_error("model: bad number '" + tok + "' in '" + key + "'");
        vals.push_back(*d);
    }
    if (static_cast<Eigen::Index>(vals.size()) != expected)
        throw validation_error("model: '" + key + "' has " + std::to_string(vals.size()) + " values, expected " +
                               std::to_string(expected));
    return Eigen::Map<Eigen::VectorXd>(vals.data(), expected);
}

} // namespace detail

inline void write_model(std::ostream& out, const OccupancyModel& m)
{
    out << "# occupancy model: LDA occupant/bystander classifier + linear calibration\n";
    std::string names;
    for (std::size_t i = 0; i < kUserFeatureNames.size(); ++i) names += (i ? "," : "") + std::string(kUserFeatureNames[i]);
    KeyValueFile kv;
    kv.set("features", names);
    kv.set("mean_occupant", detail::join_numbers(m.lda.mean_occupant()));
    kv.set("mean_bystander", detail::join_numbers(m.lda.mean_bystander()));
    for (Eigen::Index r = 0; r < m.lda.covariance().rows(); ++r)
        kv.set("covariance_" + std::to_string(r), detail::join_numbers(m.lda.covariance().row(r).transpose()));
    kv.set("prior_occupant", format_double(m.lda.prior_occupant()));
    kv.set("prior_bystander", format_double(m.lda.prior_bystander()));
    kv.set("slope", format_double(m.calibration.slope));
    kv.set("intercept", format_double(m.calibration.intercept));
    kv.set("rssi_fill", format_double(m.rssi_fill));
    kv.write(out);
}

inline OccupancyModel read_model(std::istream& in)
{
    const auto kv = KeyValueFile::parse(in, "model");
    const auto d = static_cast<Eigen::Index>(kUserFeatureCount);
    const auto mo = detail::split_numbers(kv.require("mean_occupant", "model"), d, "mean_occupant");
    const auto mb = detail::split_numbers(kv.require("mean_bystander", "model"), d, "mean_bystander");
    Eigen::MatrixXd cov(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        const auto key = "covariance_" + std::to_string(r);
        cov.row(r) = detail::split_numbers(kv.require(key, "model"), d, key).transpose();
    }
    const double prior = kv.number("prior_occupant", std::nan(""));
    if (!(prior > 0 && prior < 1)) throw validation_error("model: prior_occupant must lie in (0, 1)");
    OccupancyModel m;
    m.lda = LdaModel(mo, mb, cov, prior);
    m.calibration.slope = kv.number("slope", std::nan(""));
    m.calibration.intercept = kv.number("intercept", std::nan(""));
    m.rssi_fill = kv.number("rssi_fill", 0.0);
    if (!std::isfinite(m.calibration.slope) || !std::isfinite(m.calibration.intercept))
        throw validation_error("model: missing slope or intercept");
    return m;
}

inline const std::vector<std::string>& estimate_columns()
{
    static const std::vector<std::string> cols{"class_id",        "wifi_count",  "enrolled_wifi_count", "lda_count",
                                               "calibrated_count", "ground_truth", "room_id"};
    return cols;
}

inline void write_estimates(std::ostream& out, std::span<const OccupancyEstimate> estimates)
{
    write_row(out, estimate_columns());
    for (const auto& e : estimates)
        write_row(out, {e.class_id, std::to_string(e.wifi_count), std::to_string(e.enrolled_wifi_count),
                        std::to_string(e.lda_count), format_double(e.calibrated_count),
                        e.ground_truth ? format_double(*e.ground_truth) : std::string(), e.room_id});
}

inline std::vector<OccupancyEstimate> read_estimates(std::istream& in)
{
    RowReader reader(in, ',');
    read_header(reader, std::span(estimate_columns()).first(6), "estimates");
    std::vector<OccupancyEstimate> out;
    std::vector<std::string> f;
    while (reader.next(f)) {
        const auto where = "estimates line " + std::to_string(reader.line()) + ": ";
        if (f.size() < 5) throw validation_error(where + "expected at least 5 columns");
        OccupancyEstimate e;
        e.class_id = f[0];
        auto count = [&](const std::string& s) {
            const auto v = parse_int(s);
            if (!v || *v < 0) throw validation_error(where + "bad count '" + s + "'");
            return static_cast<std::size_t>(*v);
        };
        e.wifi_count = count(f[1]);
        e.enrolled_wifi_count = count(f[2]);
        e.lda_count = count(f[3]);
        const auto cal = parse_double(f[4]);
        if (!cal) throw validation_error(where + "bad calibrated_count '" + f[4] + "'");
        e.calibrated_count = *cal;
        if (f.size() > 5 && !f[5].empty()) {
            e.ground_truth = parse_double(f[5]);
            if (!e.ground_truth) throw validation_error(where + "bad ground_truth '" + f[5] + "'");
        }
        if (f.size() > 6) e.room_id = f[6];
        out.push_back(std::move(e));
    }
    return out;
}

inline TruthCounts read_truth_counts(std::istream& in)
{
    RowReader reader(in, ',');
    read_header(reader, std::vector<std::string>{"class_id", "true_count"}, "ground-truth counts");
    TruthCounts t;
    std::vector<std::string> f;
    while (reader.next(f)) {
        const auto v = f.size() >= 2 ? parse_double(f[1]) : std::nullopt;
        if (!v || *v < 0)
            throw validation_error("ground-truth counts line " + std::to_string(reader.line()) + ": bad true_count");
        t[f[0]] = *v;
    }
    return t;
}

inline TruthCounts read_truth_counts(const std::filesystem::path& path)
{
    auto in = detail::open_input(path, "ground-truth counts");
    return read_truth_counts(in);
}

} // namespace wocc
