#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wocc/error.hpp"
#include "wocc/user_features.hpp"

namespace wocc {

struct FeatureScore {
    std::size_t index = 0;
    std::string name;
    double f = 0; // +inf when the groups separate perfectly with zero spread
};

namespace detail {

inline std::string feature_name(std::size_t j, std::span<const std::string_view> names)
{
    return j < names.size() ? std::string(names[j]) : "feature " + std::to_string(j);
}

inline void require_both_labels(std::span<const UserLabel> labels, std::size_t min_each, const char* what)
{
    const auto occ = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), UserLabel::Occupant));
    const auto bys = labels.size() - occ;
    if (occ < min_each || bys < min_each)
        throw validation_error(std::string(what) + ": need at least " + std::to_string(min_each) +
                               " samples of each label (occupants " + std::to_string(occ) + ", bystanders " +
                               std::to_string(bys) + ")");
}

inline Eigen::MatrixXd stack(std::span<const UserFeatureVector> vectors, std::vector<UserLabel>& labels)
{
    Eigen::MatrixXd x(static_cast<Eigen::Index>(vectors.size()), static_cast<Eigen::Index>(kUserFeatureCount));
    labels.clear();
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (!vectors[i].label) throw usage_error("unlabeled feature vector for user '" + vectors[i].user_id + "'");
        x.row(static_cast<Eigen::Index>(i)) = vectors[i].values().transpose();
        labels.push_back(*vectors[i].label);
    }
    return x;
}

} // namespace detail

/// One-way ANOVA F statistic per column (two groups), highest first.
inline std::vector<FeatureScore> rank_features(const Eigen::MatrixXd& x, std::span<const UserLabel> labels,
                                               std::span<const std::string_view> names = kUserFeatureNames)
{
    detail::require_both_labels(labels, 2, "rank_features");
    const auto n = static_cast<double>(x.rows());
    std::vector<FeatureScore> scores;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        double sum[2] = {0, 0}, cnt[2] = {0, 0};
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const int g = labels[static_cast<std::size_t>(i)] == UserLabel::Occupant ? 0 : 1;
            sum[g] += x(i, j);
            cnt[g] += 1;
        }
        const double grand = (sum[0] + sum[1]) / n;
        const double mean[2] = {sum[0] / cnt[0], sum[1] / cnt[1]};
        double between = 0, within = 0;
        for (int g = 0; g < 2; ++g) between += cnt[g] * (mean[g] - grand) * (mean[g] - grand);
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const int g = labels[static_cast<std::size_t>(i)] == UserLabel::Occupant ? 0 : 1;
            within += (x(i, j) - mean[g]) * (x(i, j) - mean[g]);
        }
        double f = 0;
        if (within > 0) f = (between / 1.0) / (within / (n - 2.0));
        else if (between > 0) f = std::numeric_limits<double>::infinity();
        scores.push_back({static_cast<std::size_t>(j), detail::feature_name(static_cast<std::size_t>(j), names), f});
    }
    std::stable_sort(scores.begin(), scores.end(), [](const FeatureScore& a, const FeatureScore& b) { return a.f > b.f; });
    return scores;
}

inline std::vector<FeatureScore> rank_features(std::span<const UserFeatureVector> vectors)
{
    std::vector<UserLabel> labels;
    const auto x = detail::stack(vectors, labels);
    return rank_features(x, labels);
}

struct LdaPrediction {
    UserLabel label = UserLabel::Bystander;
    double occupant_score = 0;
    double bystander_score = 0;

    double margin() const { return occupant_score - bystander_score; }
};

/// Two-class linear discriminant with a shared covariance. Immutable once
/// built; prediction is safe from many threads.
class LdaModel {
public:
    LdaModel() = default;

    LdaModel(Eigen::VectorXd mean_occupant, Eigen::VectorXd mean_bystander, Eigen::MatrixXd covariance, double prior_occupant)
        : mean_occ_(std::move(mean_occupant)), mean_bys_(std::move(mean_bystander)), cov_(std::move(covariance)),
          prior_occ_(prior_occupant)
    {
        const Eigen::LLT<Eigen::MatrixXd> llt(cov_);
        if (llt.info() != Eigen::Success) throw numerical_error("lda: covariance is not positive definite");
        w_occ_ = llt.solve(mean_occ_);
        w_bys_ = llt.solve(mean_bys_);
        c_occ_ = -0.5 * mean_occ_.dot(w_occ_) + std::log(prior_occ_);
        c_bys_ = -0.5 * mean_bys_.dot(w_bys_) + std::log(1.0 - prior_occ_);
    }

    const Eigen::VectorXd& mean_occupant() const { return mean_occ_; }
    const Eigen::VectorXd& mean_bystander() const { return mean_bys_; }
    const Eigen::MatrixXd& covariance() const { return cov_; }
    double prior_occupant() const { return prior_occ_; }
    double prior_bystander() const { return 1.0 - prior_occ_; }
    Eigen::Index dimension() const { return mean_occ_.size(); }

    /// delta_k(x) = x' S^-1 mu_k - mu_k' S^-1 mu_k / 2 + ln pi_k; exact ties
    /// resolve to Bystander.
    LdaPrediction predict(const Eigen::VectorXd& x) const
    {
        LdaPrediction p;
        p.occupant_score = x.dot(w_occ_) + c_occ_;
        p.bystander_score = x.dot(w_bys_) + c_bys_;
        p.label = p.occupant_score > p.bystander_score ? UserLabel::Occupant : UserLabel::Bystander;
        return p;
    }

private:
    Eigen::VectorXd mean_occ_, mean_bys_;
    Eigen::MatrixXd cov_;
    double prior_occ_ = 0.5;
    Eigen::VectorXd w_occ_, w_bys_;
    double c_occ_ = 0, c_bys_ = 0;
};

/// Class means, pooled within-class covariance over n-2 with a ridge of
/// 1e-6 times the mean variance, and empirical priors.
inline LdaModel train_lda(const Eigen::MatrixXd& x, std::span<const UserLabel> labels,
                          std::span<const std::string_view> names = kUserFeatureNames)
{
    if (static_cast<std::size_t>(x.rows()) != labels.size()) throw usage_error("train_lda: label count mismatch");
    detail::require_both_labels(labels, 2, "train_lda");
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        if (!x.col(j).allFinite())
            throw numerical_error("train_lda: non-finite values in " + detail::feature_name(static_cast<std::size_t>(j), names));

    const Eigen::Index d = x.cols();
    Eigen::VectorXd mean[2] = {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
    double cnt[2] = {0, 0};
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const int g = labels[static_cast<std::size_t>(i)] == UserLabel::Occupant ? 0 : 1;
        mean[g] += x.row(i).transpose();
        cnt[g] += 1;
    }
    mean[0] /= cnt[0];
    mean[1] /= cnt[1];

    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const int g = labels[static_cast<std::size_t>(i)] == UserLabel::Occupant ? 0 : 1;
        const Eigen::VectorXd c = x.row(i).transpose() - mean[g];
        scatter += c * c.transpose();
    }
    Eigen::MatrixXd cov = scatter / (static_cast<double>(x.rows()) - 2.0);
    const double ridge = 1e-6 * cov.diagonal().mean();
    cov.diagonal().array() += ridge;
    for (Eigen::Index j = 0; j < d; ++j)
        if (!(cov(j, j) > 0))
            throw numerical_error("train_lda: covariance singular; " + detail::feature_name(static_cast<std::size_t>(j), names) +
                                  " has no within-class variance");
    return LdaModel(mean[0], mean[1], cov, cnt[0] / static_cast<double>(x.rows()));
}

inline LdaModel train_lda(std::span<const UserFeatureVector> vectors)
{
    std::vector<UserLabel> labels;
    const auto x = detail::stack(vectors, labels);
    return train_lda(x, labels);
}

inline LdaPrediction predict_lda(const LdaModel& model, const Eigen::VectorXd& x) { return model.predict(x); }

inline LdaPrediction predict_lda(const LdaModel& model, const UserFeatureVector& v) { return model.predict(v.values()); }

} // namespace wocc
