#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "wocc/ap_mapper.hpp"
#include "wocc/rng.hpp"

using namespace wocc;

namespace {

// Cyclic Jacobi rotations on a symmetric matrix; eigenvalues land on the diagonal.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a)
{
    const Eigen::Index n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-24) break;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1), s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev;
    for (Eigen::Index i = 0; i < n; ++i) ev.push_back(a(i, i));
    std::sort(ev.rbegin(), ev.rend());
    return ev;
}

FeatureMatrix matrix_of(std::vector<std::string> names, const Eigen::MatrixXd& v, std::size_t len)
{
    FeatureMatrix m;
    m.ap_names = std::move(names);
    m.values = v;
    m.series_len = len;
    return m;
}

ApInventory small_inventory()
{
    return {
        {"r1-ap1", {"r1", "b", "1"}},   {"r1-ap2", {"r1", "b", "1"}}, {"r2-ap1", {"r2", "b", "1"}},
        {"b-f1-cor01", {"corridor", "b", "1"}}, {"far-cor01", {"corridor", "far", "0"}},
    };
}

MappingResult result(std::string cls, std::string room, std::set<std::string> mapped, std::set<std::string> not_mapped)
{
    MappingResult r;
    r.class_id = std::move(cls);
    r.room_id = std::move(room);
    r.mapped = std::move(mapped);
    r.not_mapped = std::move(not_mapped);
    return r;
}

} // namespace

TEST(Pca, SpectrumMatchesJacobi)
{
    Rng rng(11);
    Eigen::MatrixXd x(30, 5);
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 5; ++j) x(i, j) = rng.normal(0, 1 + j) + (j == 1 ? 0.8 * x(i, 0) : 0.0);
    const auto p = pca_project(x, 2);

    const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
    const Eigen::MatrixXd cov = c.transpose() * c / 29.0;
    const auto ev = jacobi_eigenvalues(cov);
    ASSERT_EQ(p.eigenvalues.size(), 5);
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(p.eigenvalues(i), ev[static_cast<std::size_t>(i)], 1e-8);
    // projected variance along each kept axis equals its eigenvalue
    for (int k = 0; k < 2; ++k) {
        const double var = p.coords.col(k).squaredNorm() / 29.0;
        EXPECT_NEAR(var, ev[static_cast<std::size_t>(k)], 1e-8);
    }
    EXPECT_NEAR(p.explained, (ev[0] + ev[1]) / (ev[0] + ev[1] + ev[2] + ev[3] + ev[4]), 1e-10);
}

TEST(Mapper, MappedClusterHasLargerFracClass)
{
    Eigen::MatrixXd v(3, 4);
    v << 5, 5, 90, 90,  //
        40, 40, 80, 80, //
        45, 45, 60, 60;
    const auto m = matrix_of({"a", "b", "c"}, v, 2);
    const std::vector<int> labels{0, 1, 1};
    EXPECT_EQ(mapped_cluster(labels, m), 1);
    const auto r = label_clusters(labels, m);
    EXPECT_EQ(r.mapped, (std::set<std::string>{"b", "c"}));
    EXPECT_EQ(r.not_mapped, (std::set<std::string>{"a"}));
    EXPECT_GT(r.score.at("b"), 0);
    EXPECT_LT(r.score.at("a"), 0);
}

TEST(Mapper, IdenticalRowsAreAllMapped)
{
    const auto m = matrix_of({"a", "b"}, Eigen::MatrixXd::Constant(2, 4, 3.0), 2);
    const auto r = cluster_feature_matrix(m, fx::klass("c", "r1", fx::at(9, 0), fx::at(10, 0)), {}).result;
    EXPECT_EQ(r.mapped.size(), 2u);
    EXPECT_TRUE(r.not_mapped.empty());
}

TEST(Mapper, AllAlgorithmsSplitObviousClass)
{
    Eigen::MatrixXd v(6, 4);
    v << 40, 42, 90, 92, //
        38, 41, 88, 95,  //
        20, 18, 70, 75,  //
        0.5, 1, 10, 5,   //
        1, 0.5, 8, 12,   //
        0.5, 0.2, 3, 4;
    const auto cls = fx::klass("c", "r1", fx::at(9, 0), fx::at(10, 0));
    for (auto alg : {Algorithm::KMeans, Algorithm::Hierarchical, Algorithm::EmGmm}) {
        MappingOptions o;
        o.algorithm = alg;
        const auto r = cluster_feature_matrix(matrix_of({"a", "b", "c", "x", "y", "z"}, v, 2), cls, o).result;
        EXPECT_EQ(r.mapped, (std::set<std::string>{"a", "b", "c"})) << to_string(alg);
    }
}

TEST(Evaluate, ScoresWholeInventoryWithAdjacency)
{
    const auto inv = small_inventory();
    const std::vector<MappingResult> rs{result("c1", "r1", {"r1-ap1", "b-f1-cor01", "far-cor01"}, {"r1-ap2"})};
    const auto with = evaluate_mapping(rs, inv, true);
    // positives: r1-ap1, r1-ap2, b-f1-cor01
    EXPECT_EQ(with.overall.tp, 2u);
    EXPECT_EQ(with.overall.fn, 1u);
    EXPECT_EQ(with.overall.fp, 1u);
    EXPECT_EQ(with.overall.tn, 1u);
    const auto without = evaluate_mapping(rs, inv, false);
    EXPECT_EQ(without.overall.tp, 1u);
    EXPECT_EQ(without.overall.fp, 2u);
    EXPECT_EQ(without.overall.tn, 1u);
}

TEST(Evaluate, UnknownApIsListedNotScored)
{
    const std::vector<MappingResult> rs{result("c1", "r1", {"ghost"}, {})};
    const auto ev = evaluate_mapping(rs, small_inventory());
    ASSERT_EQ(ev.unevaluable.size(), 1u);
    EXPECT_EQ(ev.overall.tp + ev.overall.fn + ev.overall.fp + ev.overall.tn, 5u);
}

TEST(Consistency, FractionOfCorrectDecisions)
{
    const auto inv = small_inventory();
    const std::vector<MappingResult> rs{
        result("c1", "r1", {"r1-ap1"}, {"far-cor01"}),
        result("c2", "r1", {"r1-ap1", "far-cor01"}, {}),
        result("c3", "r1", {}, {"r1-ap1", "far-cor01"}),
        result("c4", "r1", {"r1-ap1"}, {"far-cor01", "r2-ap1"}),
    };
    const auto rep = consistency(rs, inv);
    EXPECT_DOUBLE_EQ(rep.consistency.at("r1-ap1"), 0.75);
    EXPECT_DOUBLE_EQ(rep.consistency.at("far-cor01"), 0.75);
    EXPECT_FALSE(rep.consistency.contains("r2-ap1")); // featured once only

    const std::vector<double> t{0.0, 0.5, 0.75, 0.8, 1.0};
    const auto ccdf = consistency_ccdf(rep, t);
    EXPECT_DOUBLE_EQ(ccdf[0].second, 1.0);
    EXPECT_DOUBLE_EQ(ccdf[2].second, 1.0);
    EXPECT_DOUBLE_EQ(ccdf[3].second, 0.0);
}

TEST(Consistency, CcdfMonotone)
{
    ConsistencyReport rep;
    Rng rng(4);
    for (int i = 0; i < 50; ++i) rep.consistency["ap" + std::to_string(i)] = rng.uniform();
    const auto ccdf = consistency_ccdf(rep, default_ccdf_thresholds());
    for (std::size_t i = 1; i < ccdf.size(); ++i) EXPECT_LE(ccdf[i].second, ccdf[i - 1].second);
}
