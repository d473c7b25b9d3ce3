#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wocc/error.hpp"
#include "wocc/interval.hpp"
#include "wocc/session_store.hpp"

namespace wocc {

/// Minutes dropped at each end of a class before sampling features, to skip
/// the entry and exit flux.
inline constexpr std::int64_t kFeatureTrimMinutes = 10;

struct FeatureSample {
    Timestamp t;
    double frac_class = 0; // share of all enrolled connections held by this AP, percent
    double class_frac = 0; // share of this AP's connections that are enrolled, percent
};

struct ApFeatureSeries {
    std::string ap_name;
    std::int64_t resolution = 10;
    std::vector<FeatureSample> samples;
};

/// Sample instants: start+10, stepping by `resolution`, through end-10 inclusive.
inline std::vector<Timestamp> feature_sample_times(const ClassEvent& cls, std::int64_t resolution)
{
    if (resolution <= 0) throw usage_error("feature resolution must be positive");
    const Timestamp first = cls.start + kFeatureTrimMinutes;
    const Timestamp last = cls.end - kFeatureTrimMinutes;
    if (last <= first) throw validation_error("class '" + cls.class_id + "' is too short for feature extraction");
    std::vector<Timestamp> times;
    for (Timestamp t = first; t <= last; t += resolution) times.push_back(t);
    return times;
}

/// Per-AP fracClass / classFrac series over the trimmed class window. APs
/// with no enrolled connection at any sample are left out.
inline std::vector<ApFeatureSeries> compute_ap_features(const SessionStore& store, const ClassEvent& cls,
                                                        const Roster& roster, std::int64_t resolution)
{
    const auto times = feature_sample_times(cls, resolution);
    const Interval window{times.front(), times.back() + 1};

    // ap -> user -> merged coverage
    std::map<std::string, std::map<std::string, std::vector<Interval>>> coverage;
    for (const auto* r : store.overlapping(window)) coverage[r->ap_name][r->user_id].push_back(r->span());
    for (auto& [ap, users] : coverage)
        for (auto& [user, ivs] : users) ivs = merge_intervals(std::move(ivs));

    struct Counts {
        std::vector<int> enrolled, total;
    };
    std::map<std::string, Counts> counts;
    std::vector<int> enrolled_sum(times.size(), 0);
    for (const auto& [ap, users] : coverage) {
        Counts c{std::vector<int>(times.size(), 0), std::vector<int>(times.size(), 0)};
        bool any_enrolled = false;
        for (const auto& [user, ivs] : users) {
            const bool is_enrolled = roster.contains(user);
            for (std::size_t s = 0; s < times.size(); ++s) {
                if (!covers(ivs, times[s])) continue;
                ++c.total[s];
                if (is_enrolled) {
                    ++c.enrolled[s];
                    ++enrolled_sum[s];
                    any_enrolled = true;
                }
            }
        }
        if (any_enrolled) counts.emplace(ap, std::move(c));
    }

    std::vector<ApFeatureSeries> out;
    for (const auto& [ap, c] : counts) {
        ApFeatureSeries series{ap, resolution, {}};
        series.samples.reserve(times.size());
        for (std::size_t s = 0; s < times.size(); ++s) {
            FeatureSample fs{times[s], 0.0, 0.0};
            if (enrolled_sum[s] > 0) {
                fs.frac_class = 100.0 * c.enrolled[s] / enrolled_sum[s];
                fs.class_frac = c.total[s] > 0 ? 100.0 * c.enrolled[s] / c.total[s] : 0.0;
            }
            series.samples.push_back(fs);
        }
        out.push_back(std::move(series));
    }
    return out;
}

/// Linear interpolation over the normalized index [0, 1].
inline std::vector<double> resample_series(std::span<const double> series, std::size_t target_len)
{
    if (series.empty()) throw usage_error("resample_series: empty input");
    std::vector<double> out(target_len);
    if (target_len == 0) return out;
    const std::size_t n = series.size();
    for (std::size_t i = 0; i < target_len; ++i) {
        if (n == 1 || target_len == 1) {
            out[i] = series[0];
            continue;
        }
        const double pos = static_cast<double>(i) * static_cast<double>(n - 1) / static_cast<double>(target_len - 1);
        const auto lo = static_cast<std::size_t>(pos);
        if (lo + 1 >= n) {
            out[i] = series[n - 1];
            continue;
        }
        const double frac = pos - static_cast<double>(lo);
        out[i] = series[lo] + (series[lo + 1] - series[lo]) * frac;
    }
    return out;
}

/// One row per AP: fracClass resampled to L, then classFrac resampled to L.
struct FeatureMatrix {
    std::vector<std::string> ap_names;
    Eigen::MatrixXd values;
    std::size_t series_len = 0;

    Eigen::Index rows() const { return values.rows(); }
};

inline FeatureMatrix build_feature_matrix(std::span<const ApFeatureSeries> series, std::size_t series_len)
{
    if (series_len == 0) throw usage_error("resample length must be positive");
    FeatureMatrix m;
    m.series_len = series_len;
    m.values.resize(static_cast<Eigen::Index>(series.size()), static_cast<Eigen::Index>(2 * series_len));
    std::vector<double> frac, cls;
    for (std::size_t r = 0; r < series.size(); ++r) {
        frac.clear();
        cls.clear();
        for (const auto& s : series[r].samples) {
            frac.push_back(s.frac_class);
            cls.push_back(s.class_frac);
        }
        const auto a = resample_series(frac, series_len);
        const auto b = resample_series(cls, series_len);
        for (std::size_t j = 0; j < series_len; ++j) {
            m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = a[j];
            m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(series_len + j)) = b[j];
        }
        m.ap_names.push_back(series[r].ap_name);
    }
    return m;
}

} // namespace wocc
