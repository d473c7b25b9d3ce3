#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wocc/ap_features.hpp"
#include "wocc/clustering.hpp"
#include "wocc/parallel.hpp"
#include "wocc/session_store.hpp"

namespace wocc {

enum class Algorithm { KMeans, Hierarchical, EmGmm };

inline std::string_view to_string(Algorithm a)
{
    switch (a) {
    case Algorithm::KMeans: return "kmeans";
    case Algorithm::Hierarchical: return "hierarchical";
    case Algorithm::EmGmm: return "em-gmm";
    }
    return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view s)
{
    if (s == "kmeans" || s == "k-means") return Algorithm::KMeans;
    if (s == "hierarchical" || s == "hc" || s == "ward") return Algorithm::Hierarchical;
    if (s == "em-gmm" || s == "gmm" || s == "em_gmm") return Algorithm::EmGmm;
    return std::nullopt;
}

/// Per-class split of the featured APs into the room's cluster and the rest.
struct MappingResult {
    std::string class_id;
    std::string room_id;
    Algorithm algorithm = Algorithm::KMeans;
    std::set<std::string> mapped;
    std::set<std::string> not_mapped;
    /// Centroid distance margin (k-means, HC) or mapped-component posterior
    /// (EM-GMM); larger means more confidently mapped.
    std::map<std::string, double> score;

    bool is_mapped(const std::string& ap) const { return mapped.contains(ap); }
    bool is_featured(const std::string& ap) const { return mapped.contains(ap) || not_mapped.contains(ap); }
};

/// Which of two cluster labels is the room's cluster: larger mean fracClass
/// centroid, then larger mean classFrac, then the smaller cluster.
inline int mapped_cluster(std::span<const int> assignment, const FeatureMatrix& m)
{
    const auto L = static_cast<Eigen::Index>(m.series_len);
    double frac[2] = {0, 0}, cls[2] = {0, 0};
    std::size_t count[2] = {0, 0};
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        const int c = assignment[i];
        if (c != 0 && c != 1) throw usage_error("label_clusters: expected exactly two clusters");
        frac[c] += m.values.row(static_cast<Eigen::Index>(i)).head(L).mean();
        cls[c] += m.values.row(static_cast<Eigen::Index>(i)).tail(L).mean();
        ++count[c];
    }
    if (count[0] == 0 || count[1] == 0) throw usage_error("label_clusters: expected exactly two clusters");
    for (int c = 0; c < 2; ++c) {
        frac[c] /= static_cast<double>(count[c]);
        cls[c] /= static_cast<double>(count[c]);
    }
    if (frac[0] != frac[1]) return frac[0] > frac[1] ? 0 : 1;
    if (cls[0] != cls[1]) return cls[0] > cls[1] ? 0 : 1;
    return count[1] < count[0] ? 1 : 0;
}

inline MappingResult label_clusters(std::span<const int> assignment, const FeatureMatrix& m)
{
    const int mc = mapped_cluster(assignment, m);
    Eigen::MatrixXd centroid = Eigen::MatrixXd::Zero(2, m.values.cols());
    std::size_t count[2] = {0, 0};
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        centroid.row(assignment[i]) += m.values.row(static_cast<Eigen::Index>(i));
        ++count[assignment[i]];
    }
    for (int c = 0; c < 2; ++c) centroid.row(c) /= static_cast<double>(count[c]);

    MappingResult r;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        const auto& ap = m.ap_names[i];
        const auto row = m.values.row(static_cast<Eigen::Index>(i));
        r.score[ap] = (row - centroid.row(1 - mc)).norm() - (row - centroid.row(mc)).norm();
        (assignment[i] == mc ? r.mapped : r.not_mapped).insert(ap);
    }
    return r;
}

struct MappingOptions {
    std::int64_t resolution = 10;
    std::size_t resample_len = 8;
    Algorithm algorithm = Algorithm::KMeans;
    std::uint64_t seed = 42;
};

struct ClassMapping {
    MappingResult result;
    FeatureMatrix matrix;
};

/// Clusters the APs featured for one class. With fewer than two distinct
/// feature rows there is nothing to separate and every featured AP is mapped.
inline ClassMapping cluster_feature_matrix(FeatureMatrix matrix, const ClassEvent& cls, const MappingOptions& opts)
{
    ClassMapping out;
    if (count_distinct_rows(matrix.values, 2) < 2) {
        for (const auto& ap : matrix.ap_names) {
            out.result.mapped.insert(ap);
            out.result.score[ap] = 0.0;
        }
    } else {
        switch (opts.algorithm) {
        case Algorithm::KMeans: {
            const auto km = kmeans(matrix.values, KMeansOptions{2, opts.seed, 300, 10});
            out.result = label_clusters(km.labels, matrix);
            break;
        }
        case Algorithm::Hierarchical: {
            const auto labels = hierarchical_ward(matrix.values, 2);
            out.result = label_clusters(labels, matrix);
            break;
        }
        case Algorithm::EmGmm: {
            const auto gmm = em_gmm(matrix.values, GmmOptions{2, opts.seed, 200, 1e-6, 1e-6});
            if (std::set<int>(gmm.labels.begin(), gmm.labels.end()).size() < 2) {
                // One component absorbed every row; fall back to its k-means start.
                const auto km = kmeans(matrix.values, KMeansOptions{2, opts.seed, 300, 10});
                out.result = label_clusters(km.labels, matrix);
                break;
            }
            out.result = label_clusters(gmm.labels, matrix);
            const int mc = mapped_cluster(gmm.labels, matrix);
            for (std::size_t i = 0; i < matrix.ap_names.size(); ++i)
                out.result.score[matrix.ap_names[i]] = gmm.posteriors(static_cast<Eigen::Index>(i), mc);
            break;
        }
        }
    }
    out.result.class_id = cls.class_id;
    out.result.room_id = cls.room_id;
    out.result.algorithm = opts.algorithm;
    out.matrix = std::move(matrix);
    return out;
}

inline ClassMapping map_class(const SessionStore& store, const ClassEvent& cls, const Roster& roster,
                              const MappingOptions& opts = {})
{
    const auto series = compute_ap_features(store, cls, roster, opts.resolution);
    return cluster_feature_matrix(build_feature_matrix(series, opts.resample_len), cls, opts);
}

/// Maps every class that has a roster, in timetable order.
inline std::vector<ClassMapping> map_classes(const SessionStore& store, std::span<const ClassEvent> classes,
                                             const RosterMap& rosters, const MappingOptions& opts, unsigned jobs = 1)
{
    std::vector<std::optional<ClassMapping>> slots(classes.size());
    parallel_for(classes.size(), jobs, [&](std::size_t i) {
        const auto r = rosters.find(classes[i].class_id);
        if (r == rosters.end()) return;
        slots[i] = map_class(store, classes[i], r->second, opts);
    });
    std::vector<ClassMapping> out;
    for (auto& s : slots)
        if (s) out.push_back(std::move(*s));
    return out;
}

// ---------------------------------------------------------------------------
// PCA (plot data only)
// ---------------------------------------------------------------------------

struct PcaProjection {
    Eigen::MatrixXd coords;      // rows x components
    Eigen::VectorXd eigenvalues; // covariance spectrum, descending
    double explained = 0;        // variance share captured by the kept components
};

inline PcaProjection pca_project(const Eigen::MatrixXd& x, int components = 2)
{
    if (x.rows() < 2) throw validation_error("pca: need at least 2 rows");
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success) throw numerical_error("pca: eigendecomposition failed");

    const Eigen::Index d = x.cols();
    const Eigen::Index kept = std::min<Eigen::Index>(components, d);
    PcaProjection p;
    p.eigenvalues = es.eigenvalues().reverse();
    Eigen::MatrixXd basis(d, kept);
    for (Eigen::Index c = 0; c < kept; ++c) {
        Eigen::VectorXd v = es.eigenvectors().col(d - 1 - c);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0) v = -v;
        basis.col(c) = v;
    }
    p.coords = Eigen::MatrixXd::Zero(x.rows(), components);
    p.coords.leftCols(kept) = centered * basis;
    const double total = p.eigenvalues.sum();
    p.explained = total > 0 ? p.eigenvalues.head(kept).sum() / total : 0.0;
    return p;
}

// ---------------------------------------------------------------------------
// Evaluation against the AP inventory
// ---------------------------------------------------------------------------

struct Confusion {
    std::size_t tp = 0, fn = 0, fp = 0, tn = 0;

    double tp_rate() const { return tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : std::nan(""); }
    double tn_rate() const { return tn + fp ? static_cast<double>(tn) / static_cast<double>(tn + fp) : std::nan(""); }

    void add(bool truth, bool mapped)
    {
        if (truth) ++(mapped ? tp : fn);
        else ++(mapped ? fp : tn);
    }
    Confusion& operator+=(const Confusion& o)
    {
        tp += o.tp, fn += o.fn, fp += o.fp, tn += o.tn;
        return *this;
    }
};

/// Decides which inventory APs count as belonging to a room: its own APs,
/// plus (with `adjacency`) corridor APs on a floor the room occupies.
class RoomTruth {
public:
    RoomTruth(const ApInventory& inventory, bool adjacency) : inventory_(inventory), adjacency_(adjacency)
    {
        for (const auto& [ap, loc] : inventory)
            if (!loc.is_corridor()) floors_[loc.location].insert({loc.building, loc.floor});
    }

    bool is_positive(const std::string& ap, const std::string& room) const
    {
        const auto it = inventory_.find(ap);
        if (it == inventory_.end()) return false;
        const auto& loc = it->second;
        if (loc.location == room) return true;
        if (!adjacency_ || !loc.is_corridor()) return false;
        const auto f = floors_.find(room);
        return f != floors_.end() && f->second.contains({loc.building, loc.floor});
    }

    const ApInventory& inventory() const { return inventory_; }

private:
    const ApInventory& inventory_;
    bool adjacency_;
    std::map<std::string, std::set<std::pair<std::string, std::string>>> floors_;
};

struct ApDecision {
    std::string class_id;
    std::string room_id;
    std::string ap_name;
    bool mapped = false;
    bool truth = false;
};

struct MappingEvaluation {
    Confusion overall;
    std::map<std::string, Confusion> per_room;
    std::vector<ApDecision> decisions;
    std::vector<std::pair<std::string, std::string>> unevaluable; // (class_id, ap_name)
};

/// Scores each class over the whole inventory: unfeatured APs count as not
/// mapped. Featured APs missing from the inventory are listed, not scored.
inline MappingEvaluation evaluate_mapping(std::span<const MappingResult> results, const ApInventory& inventory,
                                          bool adjacency = true)
{
    const RoomTruth truth(inventory, adjacency);
    MappingEvaluation ev;
    for (const auto& r : results) {
        Confusion c;
        for (const auto& [ap, loc] : inventory) {
            const bool t = truth.is_positive(ap, r.room_id);
            const bool m = r.is_mapped(ap);
            c.add(t, m);
            ev.decisions.push_back({r.class_id, r.room_id, ap, m, t});
        }
        for (const auto* set : {&r.mapped, &r.not_mapped})
            for (const auto& ap : *set)
                if (!inventory.contains(ap)) ev.unevaluable.emplace_back(r.class_id, ap);
        ev.overall += c;
        ev.per_room[r.room_id] += c;
    }
    return ev;
}

// ---------------------------------------------------------------------------
// Consistency across repeated classes
// ---------------------------------------------------------------------------

struct ConsistencyReport {
    std::map<std::string, double> consistency;          // ap -> fraction of featured classes mapped correctly
    std::map<std::string, std::size_t> featured_classes; // ap -> classes in which it was featured
};

inline ConsistencyReport consistency(std::span<const MappingResult> results, const ApInventory& inventory,
                                     bool adjacency = true, std::size_t min_classes = 2)
{
    const RoomTruth truth(inventory, adjacency);
    std::map<std::string, std::size_t> correct, seen;
    for (const auto& r : results) {
        for (const auto* set : {&r.mapped, &r.not_mapped}) {
            for (const auto& ap : *set) {
                if (!inventory.contains(ap)) continue;
                ++seen[ap];
                if (r.is_mapped(ap) == truth.is_positive(ap, r.room_id)) ++correct[ap];
            }
        }
    }
    ConsistencyReport rep;
    for (const auto& [ap, n] : seen) {
        if (n < min_classes) continue;
        rep.featured_classes[ap] = n;
        rep.consistency[ap] = static_cast<double>(correct[ap]) / static_cast<double>(n);
    }
    return rep;
}

/// (threshold, fraction of APs with consistency >= threshold) pairs.
inline std::vector<std::pair<double, double>> consistency_ccdf(const ConsistencyReport& rep, std::span<const double> thresholds)
{
    std::vector<std::pair<double, double>> out;
    for (double t : thresholds) {
        std::size_t above = 0;
        for (const auto& [ap, c] : rep.consistency)
            if (c >= t) ++above;
        out.emplace_back(t, rep.consistency.empty() ? 0.0 : static_cast<double>(above) / static_cast<double>(rep.consistency.size()));
    }
    return out;
}

inline std::vector<double> default_ccdf_thresholds()
{
    std::vector<double> t;
    for (int i = 0; i <= 20; ++i) t.push_back(i * 0.05);
    return t;
}

// ---------------------------------------------------------------------------
// Resolution sweep
// ---------------------------------------------------------------------------

inline const std::vector<std::int64_t>& default_sweep_resolutions()
{
    static const std::vector<std::int64_t> r{1, 2, 5, 10, 15, 30, 45, 60};
    return r;
}

struct SweepRow {
    std::int64_t resolution = 0;
    std::size_t classes = 0; // classes yielding at least two samples
    Confusion confusion;
    bool skipped = false;
};

inline std::vector<SweepRow> resolution_sweep(const SessionStore& store, std::span<const ClassEvent> classes,
                                              const RosterMap& rosters, const ApInventory& inventory,
                                              std::span<const std::int64_t> resolutions, MappingOptions opts,
                                              bool adjacency = true, unsigned jobs = 1)
{
    std::vector<SweepRow> rows;
    for (const auto res : resolutions) {
        opts.resolution = res;
        std::vector<std::optional<MappingResult>> slots(classes.size());
        parallel_for(classes.size(), jobs, [&](std::size_t i) {
            const auto& cls = classes[i];
            const auto r = rosters.find(cls.class_id);
            if (r == rosters.end() || cls.duration() <= 2 * kFeatureTrimMinutes) return;
            if (feature_sample_times(cls, res).size() < 2) return;
            slots[i] = map_class(store, cls, r->second, opts).result;
        });
        std::vector<MappingResult> results;
        for (auto& s : slots)
            if (s) results.push_back(std::move(*s));
        SweepRow row;
        row.resolution = res;
        row.classes = results.size();
        row.skipped = results.empty();
        if (!row.skipped) row.confusion = evaluate_mapping(results, inventory, adjacency).overall;
        rows.push_back(row);
    }
    return rows;
}

} // namespace wocc
