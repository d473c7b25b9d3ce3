#include <cmath>

#include <gtest/gtest.h>

#include "wocc/metrics.hpp"
#include "wocc/rng.hpp"

using namespace wocc;

TEST(Smape, ZeroWhenEqual)
{
    const std::vector<double> a{1, 5, 40, 0};
    EXPECT_DOUBLE_EQ(smape(a, a), 0.0);
}

TEST(Smape, OneAgainstThree)
{
    const std::vector<double> f{1}, a{3};
    EXPECT_DOUBLE_EQ(smape(f, a), 50.0);
}

TEST(Smape, DoubleForecast)
{
    const std::vector<double> a{1, 7, 30, 250};
    std::vector<double> f;
    for (double v : a) f.push_back(2 * v);
    EXPECT_NEAR(smape(f, a), 100.0 / 3, 0.01);
}

TEST(Smape, BoundedAndRejectsBadInput)
{
    const std::vector<double> f{0, 10}, a{5, 0};
    EXPECT_DOUBLE_EQ(smape(f, a), 100.0);
    EXPECT_THROW(smape(std::vector<double>{1}, std::vector<double>{1, 2}), Error);
    EXPECT_THROW(smape(std::vector<double>{}, std::vector<double>{}), Error);
}

TEST(Calibration, NormalEquationResiduals)
{
    Rng rng(21);
    std::vector<std::pair<double, double>> pairs;
    for (int i = 0; i < 40; ++i) {
        const double x = rng.uniform(0, 100);
        pairs.emplace_back(x, 3 + 0.7 * x + rng.normal(0, 5));
    }
    const auto m = fit_calibration(pairs);
    double r_sum = 0, rx_sum = 0, scale = 0;
    for (const auto& [x, y] : pairs) {
        const double r = y - m.raw(x);
        r_sum += r;
        rx_sum += r * x;
        scale += std::abs(y * x);
    }
    EXPECT_NEAR(r_sum, 0.0, 1e-9 * scale);
    EXPECT_NEAR(rx_sum, 0.0, 1e-9 * scale);
}

TEST(Calibration, RecoversPlantedSlope)
{
    Rng rng(2024);
    std::vector<std::pair<double, double>> pairs;
    for (int i = 0; i < 50; ++i) {
        const double x = rng.uniform(5, 120);
        pairs.emplace_back(x, 1.22 * x + rng.normal(0, 3));
    }
    const auto m = fit_calibration(pairs);
    EXPECT_NEAR(m.slope, 1.22, 0.1);
}

TEST(Calibration, PredictRoundsHalfUpAndClamps)
{
    CalibrationModel m{1.0, -0.5};
    EXPECT_DOUBLE_EQ(m.predict(3.0), 3.0); // 2.5 -> 3
    EXPECT_DOUBLE_EQ(m.predict(2.9), 2.0);
    const CalibrationModel low{1.0, -10};
    EXPECT_DOUBLE_EQ(low.predict(3), 0.0);
}

TEST(Calibration, RejectsDegenerate)
{
    const std::vector<std::pair<double, double>> same{{2, 1}, {2, 5}};
    EXPECT_THROW(fit_calibration(same), Error);
    const std::vector<std::pair<double, double>> one{{2, 1}};
    EXPECT_THROW(fit_calibration(one), Error);
}

TEST(Pearson, KnownValues)
{
    const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8}, z{8, 6, 4, 2};
    EXPECT_NEAR(pearson(x, y), 1.0, 1e-12);
    EXPECT_NEAR(pearson(x, z), -1.0, 1e-12);
}
