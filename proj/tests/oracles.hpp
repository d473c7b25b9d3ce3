#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance binary.

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "wocc/clustering.hpp"
#include "wocc/lda.hpp"
#include "wocc/rng.hpp"

namespace oracle {

using namespace wocc;


inline Eigen::MatrixXd random_points(Rng& rng, int n, int d, double spread = 1.0)
{
    Eigen::MatrixXd x(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) x(i, j) = rng.normal(0, spread);
    return x;
}

inline Eigen::MatrixXd two_blobs(Rng& rng, int n_a, int n_b, int d, double gap)
{
    Eigen::MatrixXd x(n_a + n_b, d);
    for (int i = 0; i < n_a + n_b; ++i)
        for (int j = 0; j < d; ++j) x(i, j) = rng.normal(i < n_a ? 0.0 : (j == 0 ? gap : 0.0), 1.0);
    return x;
}

inline double sse_of_mask(const Eigen::MatrixXd& x, unsigned mask)
{
    double total = 0;
    for (int side = 0; side < 2; ++side) {
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(x.cols());
        int n = 0;
        for (int i = 0; i < x.rows(); ++i)
            if (((mask >> i) & 1u) == static_cast<unsigned>(side)) {
                mean += x.row(i);
                ++n;
            }
        mean /= n;
        for (int i = 0; i < x.rows(); ++i)
            if (((mask >> i) & 1u) == static_cast<unsigned>(side)) total += (x.row(i) - mean).squaredNorm();
    }
    return total;
}

// Exhaustive over every split into two non-empty groups.
inline double brute_force_sse(const Eigen::MatrixXd& x)
{
    const auto n = static_cast<unsigned>(x.rows());
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < (1u << n) - 1; ++mask)
        if (!(mask & 1u)) continue;
        else best = std::min(best, sse_of_mask(x, mask));
    return best;
}

inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b)
{
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    return true;
}

// Naive Ward: recompute every cluster pair's SSE increase from centroids.
inline std::vector<int> ward_oracle(const Eigen::MatrixXd& x, int k)
{
    std::vector<std::vector<int>> clusters;
    for (int i = 0; i < x.rows(); ++i) clusters.push_back({i});
    auto centroid = [&](const std::vector<int>& c) {
        Eigen::RowVectorXd m = Eigen::RowVectorXd::Zero(x.cols());
        for (int i : c) m += x.row(i);
        return Eigen::RowVectorXd(m / static_cast<double>(c.size()));
    };
    while (static_cast<int>(clusters.size()) > k) {
        std::size_t bi = 0, bj = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < clusters.size(); ++i)
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                const double na = static_cast<double>(clusters[i].size()), nb = static_cast<double>(clusters[j].size());
                const double cost = na * nb / (na + nb) * (centroid(clusters[i]) - centroid(clusters[j])).squaredNorm();
                if (cost < best) {
                    best = cost;
                    bi = i;
                    bj = j;
                }
            }
        clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    }
    std::vector<int> labels(static_cast<std::size_t>(x.rows()));
    for (std::size_t c = 0; c < clusters.size(); ++c)
        for (int i : clusters[c]) labels[static_cast<std::size_t>(i)] = static_cast<int>(c);
    return labels;
}



// 12 samples, 2 features; first 7 occupants.
struct LdaFixture {
    Eigen::MatrixXd x{12, 2};
    std::vector<UserLabel> labels;

    LdaFixture()
    {
        x << 80, 2,  //
            95, 1,   //
            70, 6,   //
            88, 3,   //
            60, 4,   //
            99, 0.5, //
            40, 9,   //
            10, 12,  //
            25, 30,  //
            5, 8,    //
            50, 20,  //
            15, 3;
        for (int i = 0; i < 12; ++i) labels.push_back(i < 7 ? UserLabel::Occupant : UserLabel::Bystander);
    }
};

struct Direct {
    double occ, bys;
};

// The discriminant written out by hand for two features.
inline Direct direct_scores(const LdaFixture& f, double px, double py)
{
    double m[2][2] = {{0, 0}, {0, 0}}, n[2] = {0, 0};
    for (int i = 0; i < 12; ++i) {
        const int g = f.labels[static_cast<std::size_t>(i)] == UserLabel::Occupant ? 0 : 1;
        m[g][0] += f.x(i, 0);
        m[g][1] += f.x(i, 1);
        n[g] += 1;
    }
    for (int g = 0; g < 2; ++g) m[g][0] /= n[g], m[g][1] /= n[g];
    double s00 = 0, s01 = 0, s11 = 0;
    for (int i = 0; i < 12; ++i) {
        const int g = f.labels[static_cast<std::size_t>(i)] == UserLabel::Occupant ? 0 : 1;
        const double a = f.x(i, 0) - m[g][0], b = f.x(i, 1) - m[g][1];
        s00 += a * a;
        s01 += a * b;
        s11 += b * b;
    }
    s00 /= 10, s01 /= 10, s11 /= 10;
    const double ridge = 1e-6 * (s00 + s11) / 2;
    s00 += ridge, s11 += ridge;
    const double det = s00 * s11 - s01 * s01;
    const double i00 = s11 / det, i01 = -s01 / det, i11 = s00 / det;
    auto delta = [&](int g) {
        const double w0 = i00 * m[g][0] + i01 * m[g][1];
        const double w1 = i01 * m[g][0] + i11 * m[g][1];
        return px * w0 + py * w1 - 0.5 * (m[g][0] * w0 + m[g][1] * w1) + std::log(n[g] / 12.0);
    };
    return {delta(0), delta(1)};
}


} // namespace oracle
