#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "wocc/ap_features.hpp"

using namespace wocc;
using fx::at;
using fx::session;

namespace {

struct Fixture {
    ClassEvent cls = fx::klass("c", "r", at(9, 0), at(10, 0));
    Roster roster{"c", {"e1", "e2", "e3"}};
    SessionStore store{{
        session("e1", "m1", "in", at(9, 0), at(10, 0)),
        session("e2", "m2", "in", at(9, 0), at(10, 0)),
        session("x1", "m3", "in", at(9, 0), at(9, 30)),
        session("e3", "m4", "out", at(9, 0), at(10, 0)),
        session("x2", "m5", "out", at(9, 0), at(10, 0)),
        session("x3", "m6", "out", at(9, 0), at(10, 0)),
        session("x4", "m7", "noise", at(9, 0), at(10, 0)),
    }};
};

} // namespace

TEST(ApFeatures, SampleTimesAreTrimmed)
{
    const auto t = feature_sample_times(fx::klass("c", "r", at(9, 0), at(10, 0)), 10);
    ASSERT_EQ(t.size(), 5u);
    EXPECT_EQ(t.front(), at(9, 10));
    EXPECT_EQ(t.back(), at(9, 50));
    EXPECT_EQ(feature_sample_times(fx::klass("c", "r", at(9, 0), at(10, 0)), 60).size(), 1u);
    EXPECT_THROW(feature_sample_times(fx::klass("c", "r", at(9, 0), at(9, 20)), 10), Error);
    EXPECT_THROW(feature_sample_times(fx::klass("c", "r", at(9, 0), at(10, 0)), 0), Error);
}

TEST(ApFeatures, HandComputedFractions)
{
    Fixture f;
    const auto s = compute_ap_features(f.store, f.cls, f.roster, 10);
    ASSERT_EQ(s.size(), 2u); // "noise" never sees an enrolled user
    EXPECT_EQ(s[0].ap_name, "in");
    EXPECT_EQ(s[1].ap_name, "out");

    // 09:10: in has e1,e2,x1; out has e3,x2,x3
    EXPECT_NEAR(s[0].samples[0].frac_class, 200.0 / 3, 1e-9);
    EXPECT_NEAR(s[0].samples[0].class_frac, 200.0 / 3, 1e-9);
    EXPECT_NEAR(s[1].samples[0].frac_class, 100.0 / 3, 1e-9);
    EXPECT_NEAR(s[1].samples[0].class_frac, 100.0 / 3, 1e-9);
    // 09:30: x1 has left (half-open end)
    EXPECT_NEAR(s[0].samples[2].class_frac, 100.0, 1e-9);
    EXPECT_NEAR(s[0].samples[2].frac_class, 200.0 / 3, 1e-9);

    for (std::size_t k = 0; k < s[0].samples.size(); ++k)
        EXPECT_NEAR(s[0].samples[k].frac_class + s[1].samples[k].frac_class, 100.0, 1e-9);
}

TEST(ApFeatures, ResampleLinear)
{
    const std::vector<double> v{0, 10, 20};
    EXPECT_EQ(resample_series(v, 5), (std::vector<double>{0, 5, 10, 15, 20}));
    EXPECT_EQ(resample_series(v, 3), v);
    EXPECT_EQ(resample_series(std::vector<double>{7}, 4), (std::vector<double>{7, 7, 7, 7}));
    EXPECT_EQ(resample_series(v, 2), (std::vector<double>{0, 20}));
}

TEST(ApFeatures, MatrixLayout)
{
    Fixture f;
    const auto m = build_feature_matrix(compute_ap_features(f.store, f.cls, f.roster, 10), 8);
    ASSERT_EQ(m.values.rows(), 2);
    ASSERT_EQ(m.values.cols(), 16);
    EXPECT_NEAR(m.values(0, 0), 200.0 / 3, 1e-9);
    EXPECT_NEAR(m.values(0, 15), 100.0, 1e-9);
    EXPECT_EQ(m.ap_names, (std::vector<std::string>{"in", "out"}));
}
