#include "ptab/pseudo/iid.hpp"
#include "ptab/sim/iid_dgp.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ptab;

namespace {

// Outcome model with fixed, user-chosen arm means (m0 = c0, m1 = c1 everywhere).
OutcomeModel constant_outcome(double c0, double c1) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, 1);
    Eigen::VectorXd y(4);
    y << c0, c0, c1, c1;
    const IidDataset d(x, {0, 0, 1, 1}, y);
    return OutcomeModel::fit(d, FeatureMap::linear(), 0.0);
}

}  // namespace

TEST(Ipw, HandValues) {
    EXPECT_DOUBLE_EQ(ipw_value(1, 2.0, 0.5), 4.0);
    EXPECT_DOUBLE_EQ(ipw_value(0, 2.0, 0.5), -4.0);
    const IidRecord rec{{0.3}, 1, 2.0};
    EXPECT_DOUBLE_EQ(ipw_pseudo(rec, PropensityModel::known(0.5)), 4.0);
}

TEST(Aipw, HandValues) {
    // m1 - m0 = 1 and the treated residual 0.5 is weighted by 1 / 0.5.
    EXPECT_DOUBLE_EQ(aipw_value(1, 1.5, 0.0, 1.0, 0.5), 2.0);
    // Control record: 1 - (0.5 - 0) / 0.5.
    EXPECT_DOUBLE_EQ(aipw_value(0, 0.5, 0.0, 1.0, 0.5), 0.0);
    const IidRecord rec{{0.0}, 1, 1.5};
    EXPECT_NEAR(aipw_pseudo(rec, constant_outcome(0.0, 1.0), PropensityModel::known(0.5)), 2.0, 1e-12);
}

TEST(Aipw, ZeroOutcomeModelReducesToIpwProperty) {
    RngStream rng(300);
    for (int rep = 0; rep < 2000; ++rep) {
        const int a = rng.bernoulli(0.5) ? 1 : 0;
        const double y = rng.normal() * 5.0;
        const double b = rng.uniform(0.01, 0.99);
        ASSERT_NEAR(aipw_value(a, y, 0.0, 0.0, b), ipw_value(a, y, b), 1e-12 * (1.0 + std::abs(y) / b));
    }
}

TEST(Aipw, BoundedByClipProperty) {
    // |mu| <= |m1 - m0| + |y - m_a| / clip once the propensity is clipped.
    RngStream rng(301);
    const double clip = 0.05;
    for (int rep = 0; rep < 2000; ++rep) {
        const int a = rng.bernoulli(0.5) ? 1 : 0;
        const double y = rng.normal() * 3.0;
        const double m0 = rng.normal();
        const double m1 = rng.normal();
        const double b = std::clamp(rng.uniform(), clip, 1.0 - clip);
        const double bound = std::abs(m1 - m0) + std::abs(y - (a == 1 ? m1 : m0)) / clip;
        ASSERT_LE(std::abs(aipw_value(a, y, m0, m1, b)), bound + 1e-12);
    }
}

TEST(Aipw, DoublyRobustUnderOneWrongNuisance) {
    // X ~ N(0, 1), P(A = 1 | X) = expit(X), Y = X + A (1 + X) + N(0, 1), so the ATE is 1.
    // A zero outcome model with the true propensity, or the true outcome model with a
    // constant 0.5 propensity, should both average to 1.
    RngStream rng(302);
    const int n = 200000;
    double wrong_m = 0.0;
    double wrong_b = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        const double b = 1.0 / (1.0 + std::exp(-x));
        const int a = rng.bernoulli(b) ? 1 : 0;
        const double y = x + a * (1.0 + x) + rng.normal();
        wrong_m += aipw_value(a, y, 0.0, 0.0, b);
        wrong_b += aipw_value(a, y, x, 1.0 + 2.0 * x, 0.5);
    }
    EXPECT_NEAR(wrong_m / n, 1.0, 0.05);
    EXPECT_NEAR(wrong_b / n, 1.0, 0.03);
}

TEST(Aipw, VarianceNotAboveIpwWithGoodOutcomeModel) {
    IidDgpSpec spec;
    spec.hypothesis = "H1_3";
    spec.n = 20000;
    RngStream rng(303);
    const IidSample s = gen_iid(spec, rng);
    const IidTruth truth{spec};
    const auto& d = s.data;
    Eigen::VectorXd ipw(static_cast<Eigen::Index>(d.size()));
    Eigen::VectorXd aipw(static_cast<Eigen::Index>(d.size()));
    std::vector<double> row(d.dim());
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < d.dim(); ++j) row[j] = d.x()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        const auto r = static_cast<Eigen::Index>(i);
        ipw[r] = ipw_value(d.a()[i], d.y()[r], spec.p_a);
        aipw[r] = aipw_value(d.a()[i], d.y()[r], truth.mean_outcome(0, row), truth.mean_outcome(1, row), spec.p_a);
    }
    EXPECT_LE(mean_sd(aipw).sd, mean_sd(ipw).sd);
}

TEST(BuildPseudo, CrossFittedAipwOnRandomizedData) {
    IidDgpSpec spec;
    spec.hypothesis = "H1_3";
    spec.n = 4000;
    RngStream rng(304);
    const IidSample s = gen_iid(spec, rng);
    RngStream cf(5);
    NuisancePredictions diag;
    const PseudoOutcomes p = build_pseudo(s.data, 5, LearnerConfig{}, cf, 1, &diag);
    ASSERT_EQ(p.size(), s.data.size());
    EXPECT_NEAR(p.mu_bar(), s.true_ate, 4.0 * p.sigma_hat() / std::sqrt(4000.0));
    EXPECT_TRUE(diag.propensity_converged);
    const PseudoOutcomes direct = pseudo_from_predictions(s.data, diag);
    EXPECT_TRUE((direct.mu_hat().array() == p.mu_hat().array()).all());
}

TEST(BuildPseudo, FromModelsMatchesRecordwise) {
    IidDgpSpec spec;
    spec.n = 50;
    RngStream rng(305);
    const IidSample s = gen_iid(spec, rng);
    const OutcomeModel m = OutcomeModel::fit(s.data, FeatureMap::linear(), 0.1);
    const PropensityModel b = PropensityModel::fit(s.data, FeatureMap::linear(), 0.01);
    const PseudoOutcomes p = build_pseudo_from_models(s.data, m, b);
    for (std::size_t i = 0; i < s.data.size(); ++i) {
        ASSERT_NEAR(p.mu_hat()[static_cast<Eigen::Index>(i)], aipw_pseudo(s.data.record(i), m, b), 1e-12);
    }
}

TEST(PseudoOutcomes, SampleStatistics) {
    Eigen::VectorXd v(4);
    v << 1.0, 2.0, 3.0, 6.0;
    const auto p = PseudoOutcomes::from_values(v);
    EXPECT_DOUBLE_EQ(p.mu_bar(), 3.0);
    EXPECT_DOUBLE_EQ(p.sigma_hat(), std::sqrt(14.0 / 3.0));
    Eigen::VectorXd bad(2);
    bad << 1.0, std::nan("");
    EXPECT_THROW((void)PseudoOutcomes::from_values(bad), std::invalid_argument);
}
