#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace wocc;

using namespace oracle;

TEST(Lda, MatchesDirectDiscriminant)
{
    const LdaFixture f;
    const auto model = train_lda(f.x, f.labels);
    EXPECT_NEAR(model.prior_occupant(), 7.0 / 12, 1e-12);
    for (int i = 0; i < 12; ++i) {
        const auto p = model.predict(f.x.row(i).transpose());
        const auto d = direct_scores(f, f.x(i, 0), f.x(i, 1));
        EXPECT_NEAR(p.occupant_score, d.occ, 1e-7 * (1 + std::abs(d.occ)));
        EXPECT_NEAR(p.bystander_score, d.bys, 1e-7 * (1 + std::abs(d.bys)));
        EXPECT_EQ(p.label, d.occ > d.bys ? UserLabel::Occupant : UserLabel::Bystander) << i;
    }
}

TEST(Lda, AffineInvariantLabels)
{
    const LdaFixture f;
    Eigen::Matrix2d a;
    a << 2.0, 0.5, -1.0, 3.0;
    const Eigen::Vector2d b(7.0, -4.0);
    const Eigen::MatrixXd xt = (f.x * a.transpose()).rowwise() + b.transpose();
    const auto m1 = train_lda(f.x, f.labels);
    const auto m2 = train_lda(xt, f.labels);

    int checked = 0;
    for (double px = 0; px <= 100; px += 5)
        for (double py = 0; py <= 30; py += 2.5) {
            const Eigen::Vector2d p(px, py);
            const auto r1 = m1.predict(p);
            const auto r2 = m2.predict(a * p + b);
            if (std::abs(r1.occupant_score - r1.bystander_score) <= 1e-8) continue;
            EXPECT_EQ(r1.label, r2.label) << px << "," << py;
            EXPECT_NEAR(r1.occupant_score - r1.bystander_score, r2.occupant_score - r2.bystander_score, 1e-4);
            ++checked;
        }
    EXPECT_GT(checked, 200);
}

TEST(Lda, NeedsBothLabels)
{
    const LdaFixture f;
    std::vector<UserLabel> all(12, UserLabel::Occupant);
    EXPECT_THROW(train_lda(f.x, all), Error);
}

TEST(Lda, ConstantColumnSurvivesRidge)
{
    LdaFixture f;
    f.x.col(1).setConstant(5);
    const auto m = train_lda(f.x, f.labels);
    EXPECT_EQ(m.predict(f.x.row(0).transpose()).label, UserLabel::Occupant);
}

TEST(Lda, SingularAfterRidgeIsError)
{
    LdaFixture f;
    for (int i = 0; i < 12; ++i) f.x.row(i) = i < 7 ? Eigen::RowVector2d(80, 2) : Eigen::RowVector2d(10, 12);
    EXPECT_THROW(train_lda(f.x, f.labels), Error);
}

TEST(Lda, NonFiniteInputIsError)
{
    LdaFixture f;
    f.x(0, 0) = std::nan("");
    EXPECT_THROW(train_lda(f.x, f.labels), Error);
}

TEST(Lda, RankFeaturesByF)
{
    const LdaFixture f;
    const std::array<std::string_view, 2> names{"strong", "weak"};
    const auto r = rank_features(f.x, f.labels, names);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0].name, "strong");
    EXPECT_GT(r[0].f, r[1].f);
}
