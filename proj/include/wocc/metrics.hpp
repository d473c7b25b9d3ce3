#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>

#include "wocc/error.hpp"

namespace wocc {

/// Symmetric mean absolute percentage error, in percent. A (0, 0) pair
/// contributes 0.
inline double smape(std::span<const double> forecasts, std::span<const double> actuals)
{
    if (forecasts.size() != actuals.size()) throw usage_error("smape: length mismatch");
    if (forecasts.empty()) throw usage_error("smape: empty input");
    double sum = 0;
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        const double denom = std::abs(forecasts[i]) + std::abs(actuals[i]);
        if (denom > 0) sum += std::abs(forecasts[i] - actuals[i]) / denom;
    }
    return 100.0 * sum / static_cast<double>(forecasts.size());
}

/// Sample Pearson correlation.
inline double pearson(std::span<const double> xs, std::span<const double> ys)
{
    if (xs.size() != ys.size()) throw usage_error("pearson: length mismatch");
    if (xs.size() < 2) throw usage_error("pearson: need at least 2 points");
    const auto n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0 || syy == 0) throw numerical_error("pearson: constant series");
    return sxy / std::sqrt(sxx * syy);
}

/// Univariate least-squares correction from a raw count to persons.
struct CalibrationModel {
    double slope = 1.0;
    double intercept = 0.0;

    double raw(double x) const { return slope * x + intercept; }

    /// Rounded half-up to whole persons and clamped at zero.
    double predict(double x) const { return std::max(0.0, std::floor(raw(x) + 0.5)); }
};

inline CalibrationModel fit_calibration(std::span<const std::pair<double, double>> pairs)
{
    if (pairs.size() < 2) throw validation_error("calibration: need at least 2 pairs");
    const auto n = static_cast<double>(pairs.size());
    double mx = 0, my = 0;
    for (const auto& [x, y] : pairs) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (const auto& [x, y] : pairs) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0) throw numerical_error("calibration: all inputs identical, slope not identifiable");
    CalibrationModel m;
    m.slope = sxy / sxx;
    m.intercept = my - m.slope * mx;
    return m;
}

} // namespace wocc
