#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "wocc/error.hpp"
#include "wocc/rng.hpp"

namespace wocc {

/// Number of distinct rows, counting stops at `limit`.
inline std::size_t count_distinct_rows(const Eigen::MatrixXd& x, std::size_t limit = std::numeric_limits<std::size_t>::max())
{
    std::vector<Eigen::Index> reps;
    for (Eigen::Index i = 0; i < x.rows() && reps.size() < limit; ++i) {
        const bool seen = std::any_of(reps.begin(), reps.end(), [&](Eigen::Index r) { return x.row(r) == x.row(i); });
        if (!seen) reps.push_back(i);
    }
    return reps.size();
}

// ---------------------------------------------------------------------------
// K-means
// ---------------------------------------------------------------------------

struct KMeansOptions {
    int k = 2;
    std::uint64_t seed = 0;
    int max_iterations = 300;
    int restarts = 10; // independent k-means++ starts; lowest SSE wins
};

struct KMeansResult {
    std::vector<int> labels;
    Eigen::MatrixXd centroids;
    double sse = 0;
    int iterations = 0;
    std::vector<double> sse_trace; // after each centroid update of the winning run
};

namespace detail {

inline std::vector<int> assign_nearest(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centroids)
{
    std::vector<int> labels(static_cast<std::size_t>(x.rows()), 0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
            const double d = (x.row(i) - centroids.row(c)).squaredNorm();
            if (d < best) { // strict: ties stay with the lower index
                best = d;
                labels[static_cast<std::size_t>(i)] = static_cast<int>(c);
            }
        }
    }
    return labels;
}

inline double sum_squared_error(const Eigen::MatrixXd& x, const std::vector<int>& labels, const Eigen::MatrixXd& centroids)
{
    double sse = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) sse += (x.row(i) - centroids.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
    return sse;
}

inline Eigen::MatrixXd kmeans_plus_plus(const Eigen::MatrixXd& x, int k, Rng& rng)
{
    const auto n = static_cast<std::size_t>(x.rows());
    Eigen::MatrixXd centroids(k, x.cols());
    centroids.row(0) = x.row(static_cast<Eigen::Index>(rng.index(n)));
    std::vector<double> d2(n);
    for (int c = 1; c < k; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int j = 0; j < c; ++j) best = std::min(best, (x.row(static_cast<Eigen::Index>(i)) - centroids.row(j)).squaredNorm());
            d2[i] = best;
        }
        centroids.row(c) = x.row(static_cast<Eigen::Index>(rng.weighted(d2)));
    }
    return centroids;
}

// Centroid update; an emptied cluster takes over the point lying farthest from
// its current centroid.
inline Eigen::MatrixXd update_centroids(const Eigen::MatrixXd& x, std::vector<int>& labels, int k)
{
    Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(k, x.cols());
    for (int c = 0; c < k; ++c) {
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (int l : labels) ++counts[static_cast<std::size_t>(l)];
        if (counts[static_cast<std::size_t>(c)] > 0) continue;
        // recompute current centroids for distance measurement
        Eigen::MatrixXd cur = Eigen::MatrixXd::Zero(k, x.cols());
        for (Eigen::Index i = 0; i < x.rows(); ++i) cur.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
        for (int j = 0; j < k; ++j)
            if (counts[static_cast<std::size_t>(j)] > 0) cur.row(j) /= counts[static_cast<std::size_t>(j)];
        Eigen::Index far = -1;
        double far_d = -1;
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const int l = labels[static_cast<std::size_t>(i)];
            if (counts[static_cast<std::size_t>(l)] <= 1) continue;
            const double d = (x.row(i) - cur.row(l)).squaredNorm();
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        if (far >= 0) labels[static_cast<std::size_t>(far)] = c;
    }
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        centroids.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
        ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c)
        if (counts[static_cast<std::size_t>(c)] > 0) centroids.row(c) /= counts[static_cast<std::size_t>(c)];
    return centroids;
}

inline KMeansResult lloyd(const Eigen::MatrixXd& x, Eigen::MatrixXd centroids, int k, int max_iterations)
{
    KMeansResult r;
    r.labels = assign_nearest(x, centroids);
    for (int it = 0; it < max_iterations; ++it) {
        r.iterations = it + 1;
        centroids = update_centroids(x, r.labels, k);
        r.sse_trace.push_back(sum_squared_error(x, r.labels, centroids));
        auto next = assign_nearest(x, centroids);
        if (next == r.labels) break;
        r.labels = std::move(next);
    }
    r.centroids = std::move(centroids);
    r.sse = sum_squared_error(x, r.labels, r.centroids);
    return r;
}

} // namespace detail

/// Lloyd iterations from seeded k-means++ starts.
inline KMeansResult kmeans(const Eigen::MatrixXd& x, const KMeansOptions& opts = {})
{
    if (opts.k < 1) throw usage_error("kmeans: k must be positive");
    if (count_distinct_rows(x, static_cast<std::size_t>(opts.k)) < static_cast<std::size_t>(opts.k))
        throw validation_error("kmeans: fewer distinct rows than clusters");
    Rng rng(opts.seed);
    KMeansResult best;
    bool have = false;
    for (int run = 0; run < std::max(1, opts.restarts); ++run) {
        auto r = detail::lloyd(x, detail::kmeans_plus_plus(x, opts.k, rng), opts.k, opts.max_iterations);
        if (!have || r.sse < best.sse) {
            best = std::move(r);
            have = true;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Agglomerative clustering, Ward linkage
// ---------------------------------------------------------------------------

/// Merges until `k` clusters remain. Ward distances are maintained with the
/// Lance-Williams recurrence on squared Euclidean distances; equal-cost merges
/// go to the lexicographically smallest (i, j) pair. Labels are numbered in
/// order of first appearance.
inline std::vector<int> hierarchical_ward(const Eigen::MatrixXd& x, int k = 2)
{
    const auto n = static_cast<std::size_t>(x.rows());
    if (n < 2) throw validation_error("hierarchical: need at least 2 rows");
    if (k < 1 || static_cast<std::size_t>(k) > n) throw usage_error("hierarchical: invalid cluster count");

    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            d[i][j] = d[j][i] = (x.row(static_cast<Eigen::Index>(i)) - x.row(static_cast<Eigen::Index>(j))).squaredNorm();

    std::vector<std::size_t> size(n, 1);
    std::vector<bool> active(n, true);
    std::vector<std::size_t> owner(n);
    for (std::size_t i = 0; i < n; ++i) owner[i] = i;

    for (std::size_t clusters = n; clusters > static_cast<std::size_t>(k); --clusters) {
        std::size_t bi = 0, bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (active[j] && d[i][j] < best) {
                    best = d[i][j];
                    bi = i;
                    bj = j;
                }
            }
        }
        const double ni = static_cast<double>(size[bi]), nj = static_cast<double>(size[bj]);
        for (std::size_t m = 0; m < n; ++m) {
            if (!active[m] || m == bi || m == bj) continue;
            const double nm = static_cast<double>(size[m]);
            const double v = ((ni + nm) * d[m][bi] + (nj + nm) * d[m][bj] - nm * d[bi][bj]) / (ni + nj + nm);
            d[m][bi] = d[bi][m] = v;
        }
        size[bi] += size[bj];
        active[bj] = false;
        for (auto& o : owner)
            if (o == bj) o = bi;
    }

    std::vector<int> labels(n, -1);
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i) {
        auto it = std::find(order.begin(), order.end(), owner[i]);
        if (it == order.end()) {
            order.push_back(owner[i]);
            it = order.end() - 1;
        }
        labels[i] = static_cast<int>(it - order.begin());
    }
    return labels;
}

// ---------------------------------------------------------------------------
// Gaussian mixture via EM
// ---------------------------------------------------------------------------

struct GmmOptions {
    int k = 2;
    std::uint64_t seed = 0;
    int max_iterations = 200;
    double tolerance = 1e-6;  // stop when the log-likelihood gain drops below this
    double reg_covar = 1e-6;  // added to every covariance diagonal in each M-step
};

struct GmmResult {
    std::vector<int> labels;
    Eigen::MatrixXd posteriors; // rows x k
    std::vector<double> log_likelihood;
    std::vector<double> weights;
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covariances;
};

namespace detail {

struct GmmParams {
    std::vector<double> weights;
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covariances;
};

inline GmmParams gmm_m_step(const Eigen::MatrixXd& x, const Eigen::MatrixXd& resp, double reg)
{
    const Eigen::Index n = x.rows(), d = x.cols(), k = resp.cols();
    GmmParams p;
    for (Eigen::Index c = 0; c < k; ++c) {
        const double nk = resp.col(c).sum();
        p.weights.push_back(nk / static_cast<double>(n));
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
        if (nk > 0) mu = (x.transpose() * resp.col(c)) / nk;
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
        if (nk > 0) {
            const Eigen::MatrixXd centered = x.rowwise() - mu.transpose();
            cov = (centered.transpose() * resp.col(c).asDiagonal() * centered) / nk;
        }
        cov.diagonal().array() += reg;
        p.means.push_back(std::move(mu));
        p.covariances.push_back(std::move(cov));
    }
    return p;
}

// Returns the total log-likelihood and fills the posterior matrix.
inline double gmm_e_step(const Eigen::MatrixXd& x, const GmmParams& p, Eigen::MatrixXd& resp)
{
    const Eigen::Index n = x.rows(), d = x.cols();
    const auto k = static_cast<Eigen::Index>(p.weights.size());
    Eigen::MatrixXd logp(n, k);
    for (Eigen::Index c = 0; c < k; ++c) {
        const Eigen::LLT<Eigen::MatrixXd> llt(p.covariances[static_cast<std::size_t>(c)]);
        if (llt.info() != Eigen::Success) throw numerical_error("em_gmm: covariance not positive definite");
        const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        const double log_w = p.weights[static_cast<std::size_t>(c)] > 0 ? std::log(p.weights[static_cast<std::size_t>(c)])
                                                                         : -std::numeric_limits<double>::infinity();
        const Eigen::MatrixXd centered = (x.rowwise() - p.means[static_cast<std::size_t>(c)].transpose()).transpose();
        const Eigen::MatrixXd z = llt.matrixL().solve(centered);
        for (Eigen::Index i = 0; i < n; ++i)
            logp(i, c) = log_w - 0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + log_det + z.col(i).squaredNorm());
    }
    resp.resize(n, k);
    double ll = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double m = logp.row(i).maxCoeff();
        const double lse = m + std::log((logp.row(i).array() - m).exp().sum());
        ll += lse;
        resp.row(i) = (logp.row(i).array() - lse).exp();
    }
    return ll;
}

} // namespace detail

/// Full-covariance mixture initialized from the seeded k-means partition.
inline GmmResult em_gmm(const Eigen::MatrixXd& x, const GmmOptions& opts = {})
{
    if (count_distinct_rows(x, 2) < 2) throw validation_error("em_gmm: degenerate input (fewer than 2 distinct rows)");
    const auto km = kmeans(x, KMeansOptions{opts.k, opts.seed, 300, 10});

    Eigen::MatrixXd resp = Eigen::MatrixXd::Zero(x.rows(), opts.k);
    for (Eigen::Index i = 0; i < x.rows(); ++i) resp(i, km.labels[static_cast<std::size_t>(i)]) = 1.0;
    auto params = detail::gmm_m_step(x, resp, opts.reg_covar);

    GmmResult out;
    for (int it = 0; it < opts.max_iterations; ++it) {
        const double ll = detail::gmm_e_step(x, params, resp);
        out.log_likelihood.push_back(ll);
        const bool converged = it > 0 && ll - out.log_likelihood[out.log_likelihood.size() - 2] < opts.tolerance;
        if (converged || it + 1 == opts.max_iterations) break;
        params = detail::gmm_m_step(x, resp, opts.reg_covar);
    }

    out.posteriors = resp;
    out.labels.resize(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        int best = 0;
        for (int c = 1; c < opts.k; ++c)
            if (resp(i, c) > resp(i, best)) best = c;
        out.labels[static_cast<std::size_t>(i)] = best;
    }
    out.weights = std::move(params.weights);
    out.means = std::move(params.means);
    out.covariances = std::move(params.covariances);
    return out;
}

} // namespace wocc
