#include "ptab/core/error.hpp"
#include "ptab/dist/normal.hpp"
#include "ptab/tab/tab.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

using namespace ptab;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

// Walk written from the sign rule, kept separate from the library loop.
double reference_walk(const std::vector<double>& r, int theta1) {
    double s = 0.0;
    for (std::size_t t = 0; t < r.size(); ++t) {
        const int theta = t == 0 ? theta1 : (s > 0.0 ? 0 : 1);
        s += theta == 0 ? r[t] : -r[t];
    }
    return s;
}

std::vector<double> random_rewards(RngStream& rng, std::size_t n) {
    std::vector<double> r(n);
    for (auto& v : r) {
        // Mix of continuous values and exact zeros so ties at S = 0 occur.
        v = rng.below(5) == 0 ? 0.0 : rng.normal();
    }
    return r;
}

// Kolmogorov distance of a sample from U(0, 1).
double ks_uniform(std::vector<double> u) {
    std::sort(u.begin(), u.end());
    const double n = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - u[i], u[i] - static_cast<double>(i) / n});
    }
    return d;
}

}  // namespace

TEST(Walk, HandExamples) {
    const std::vector<double> r1{1.0, -0.5, 2.0};
    const auto tr = tab_walk(r1, 0);
    EXPECT_EQ(tr.sums, (std::vector<double>{0.0, 1.0, 0.5, 2.5}));
    EXPECT_EQ(tr.theta, (std::vector<int>{0, 0, 0}));
    EXPECT_DOUBLE_EQ(tr.t_n(), 2.5);

    const std::vector<double> r2{-1.0, 0.5};
    const auto tr2 = tab_walk(r2, 0);
    EXPECT_EQ(tr2.theta, (std::vector<int>{0, 1}));
    EXPECT_DOUBLE_EQ(tr2.t_n(), -1.5);
}

TEST(Walk, ZeroSumBreaksTowardTreatment) {
    const std::vector<double> r{0.0, 2.0};
    const auto tr = tab_walk(r, 0);
    EXPECT_EQ(tr.theta[1], 1);
    EXPECT_DOUBLE_EQ(tr.t_n(), -2.0);
}

TEST(Walk, RejectsBadInput) {
    const std::vector<double> empty;
    EXPECT_THROW((void)tab_walk(empty, 0), std::invalid_argument);
    const std::vector<double> r{1.0};
    EXPECT_THROW((void)tab_walk(r, 2), std::invalid_argument);
}

TEST(Walk, PropertyAgreesWithReferenceAndTrace) {
    RngStream rng(100);
    for (int rep = 0; rep < 500; ++rep) {
        const auto r = random_rewards(rng, 1 + rng.below(60));
        for (int theta1 : {0, 1}) {
            const auto tr = tab_walk(r, theta1);
            ASSERT_EQ(tr.t_n(), reference_walk(r, theta1));
            ASSERT_EQ(tab_walk_end(r, theta1), tr.t_n());
            for (std::size_t t = 1; t < r.size(); ++t) ASSERT_EQ(tr.theta[t], tr.sums[t] > 0.0 ? 0 : 1);
        }
    }
}

TEST(Walk, PropertyScaleEquivariance) {
    RngStream rng(101);
    for (int rep = 0; rep < 300; ++rep) {
        auto r = random_rewards(rng, 1 + rng.below(40));
        const double c = std::ldexp(1.0, static_cast<int>(rng.below(9)) - 4);  // exact power of two
        std::vector<double> scaled(r);
        for (auto& v : scaled) v *= c;
        for (int theta1 : {0, 1}) ASSERT_EQ(tab_walk_end(scaled, theta1), c * tab_walk_end(r, theta1));
    }
}

TEST(Walk, PropertyFirstArmFlipNegatesPath) {
    // Away from S = 0 the sign rule is odd, so switching theta1 mirrors the whole path.
    RngStream rng(102);
    for (int rep = 0; rep < 300; ++rep) {
        std::vector<double> r(1 + rng.below(40));
        for (auto& v : r) v = rng.normal();
        const auto a = tab_walk(r, 0);
        const auto b = tab_walk(r, 1);
        for (std::size_t t = 0; t < a.sums.size(); ++t) ASSERT_EQ(b.sums[t], -a.sums[t]);
        ASSERT_EQ(tab_p_value(a.t_n()), tab_p_value(b.t_n()));
    }
}

TEST(Walk, PValueFormula) {
    EXPECT_DOUBLE_EQ(tab_p_value(0.0), 1.0);
    EXPECT_NEAR(tab_p_value(1.959963984540054), 0.05, 1e-12);
    EXPECT_EQ(tab_p_value(-2.3), tab_p_value(2.3));
}

TEST(Tab, StandardizedRewards) {
    const auto pseudo = PseudoOutcomes::with_sigma(vec({3.0}), 1.0);
    const auto s = tab_test(pseudo, 0);
    EXPECT_DOUBLE_EQ(s.t_n, 3.0);
    EXPECT_NEAR(s.p_value, 0.0026997960632601866, 1e-12);

    const auto p2 = PseudoOutcomes::from_values(vec({1.0, 3.0, -2.0, 5.0}));
    const auto r = standardize_rewards(p2);
    const double sd = std::sqrt((0.75 * 0.75 + 1.25 * 1.25 + 3.75 * 3.75 + 3.25 * 3.25) / 3.0);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(r[i], p2.mu_hat()[static_cast<Eigen::Index>(i)] / (2.0 * sd), 1e-15);
}

TEST(Tab, DegenerateInputFails) {
    const auto pseudo = PseudoOutcomes::from_values(vec({2.0, 2.0, 2.0}));
    EXPECT_TRUE(pseudo.degenerate());
    EXPECT_THROW((void)tab_test(pseudo, 0), DegenerateSampleError);
    EXPECT_THROW((void)z_test(pseudo), DegenerateSampleError);
    EXPECT_THROW((void)p_tab(pseudo, 5, Combiner::cauchy(), RngStream(1)), DegenerateSampleError);
}

TEST(Combine, CauchyIdentities) {
    const std::vector<double> one{0.2};
    EXPECT_NEAR(cauchy_combine(one), 0.2, 1e-14);
    for (double p : {0.001, 0.05, 0.3, 0.5, 0.9}) {
        const std::vector<double> same(17, p);
        EXPECT_NEAR(cauchy_combine(same), p, 1e-12) << p;
    }
    const std::vector<double> extremes{0.0, 1.0};
    const double c = cauchy_combine(extremes);
    EXPECT_TRUE(std::isfinite(c));
    EXPECT_GE(c, 0.0);
    EXPECT_LE(c, 1.0);
}

TEST(Combine, CauchyMonotoneProperty) {
    RngStream rng(103);
    for (int rep = 0; rep < 500; ++rep) {
        std::vector<double> ps(1 + rng.below(30));
        for (auto& p : ps) p = rng.uniform();
        std::vector<double> lower(ps);
        lower[rng.below(lower.size())] *= 0.5;
        ASSERT_LE(cauchy_combine(lower), cauchy_combine(ps) + 1e-15);
        const double c = cauchy_combine(ps);
        ASSERT_GE(c, 0.0);
        ASSERT_LE(c, 1.0);
    }
}

TEST(Combine, QuantileOrderStatistic) {
    const std::vector<double> ps{0.01, 0.02, 0.06, 0.3, 0.9};
    // ceil(0.5 * 5) = 3rd smallest.
    EXPECT_NEAR(quantile_combine(ps, 0.5), 0.12, 1e-15);
    EXPECT_DOUBLE_EQ(quantile_combine(ps, 0.2), 0.05);
    EXPECT_DOUBLE_EQ(quantile_combine(ps, 0.9), 1.0);
    EXPECT_THROW((void)quantile_combine(ps, 0.0), std::invalid_argument);
    EXPECT_THROW((void)quantile_combine(ps, 1.0), std::invalid_argument);
}

TEST(Combine, QuantileProperty) {
    RngStream rng(104);
    for (int rep = 0; rep < 500; ++rep) {
        std::vector<double> ps(1 + rng.below(50));
        for (auto& p : ps) p = rng.uniform();
        const double gamma = rng.uniform(0.05, 0.95);
        std::vector<double> sorted(ps);
        std::sort(sorted.begin(), sorted.end());
        std::size_t k = 0;
        while (static_cast<double>(k) < gamma * static_cast<double>(ps.size())) ++k;
        k = std::max<std::size_t>(k, 1);
        ASSERT_DOUBLE_EQ(quantile_combine(ps, gamma), std::min(1.0, sorted[k - 1] / gamma));
        ASSERT_EQ(combine(ps, Combiner::quantile(gamma)), quantile_combine(ps, gamma));
    }
}

TEST(Permute, AllOrdersEquallyLikely) {
    RngStream rng(105);
    std::map<std::vector<std::size_t>, int> counts;
    const int m = 60000;
    for (int i = 0; i < m; ++i) ++counts[permute(4, rng)];
    ASSERT_EQ(counts.size(), 24u);
    const double e = m / 24.0;
    double chi2 = 0.0;
    for (const auto& [perm, c] : counts) chi2 += (c - e) * (c - e) / e;
    EXPECT_LT(chi2, 49.73);  // chi-square(23) upper 0.1% point
}

TEST(PTab, SinglePermutationIsOneTabRun) {
    RngStream gen(106);
    Eigen::VectorXd mu(40);
    for (auto& v : mu) v = gen.normal();
    const auto pseudo = PseudoOutcomes::from_values(mu);
    const RngStream rng(7, 3);
    const auto res = p_tab(pseudo, 1, Combiner::cauchy(), rng);

    RngStream perm_rng = rng.child(0).child(0);
    RngStream theta_rng = rng.child(0).child(1);
    const auto order = permute(40, perm_rng);
    const auto r = standardize_rewards(pseudo);
    std::vector<double> permuted;
    for (auto i : order) permuted.push_back(r[i]);
    const int theta1 = theta_rng.bernoulli(0.5) ? 1 : 0;
    const double t = reference_walk(permuted, theta1);
    EXPECT_EQ(res.per_perm_theta1[0], theta1);
    EXPECT_DOUBLE_EQ(res.per_perm_t[0], t);
    EXPECT_NEAR(res.combined_p, tab_p_value(t), 1e-14);
}

TEST(PTab, ThreadCountDoesNotChangeResult) {
    RngStream gen(107);
    Eigen::VectorXd mu(200);
    for (auto& v : mu) v = gen.normal() + 0.1;
    const auto pseudo = PseudoOutcomes::from_values(mu);
    const auto a = p_tab(pseudo, 100, Combiner::cauchy(), RngStream(5, 2), 1);
    const auto b = p_tab(pseudo, 100, Combiner::cauchy(), RngStream(5, 2), 8);
    EXPECT_EQ(a.per_perm_p, b.per_perm_p);
    EXPECT_EQ(a.per_perm_theta1, b.per_perm_theta1);
    EXPECT_EQ(a.combined_p, b.combined_p);
    const auto c = p_tab(pseudo, 100, Combiner::cauchy(), RngStream(6, 2), 1);
    EXPECT_NE(a.per_perm_p, c.per_perm_p);
}

TEST(PTab, RejectsBadArguments) {
    const auto pseudo = PseudoOutcomes::from_values(vec({1.0, 2.0, 4.0}));
    EXPECT_THROW((void)p_tab(pseudo, 0, Combiner::cauchy(), RngStream(1)), std::invalid_argument);
    EXPECT_THROW((void)p_tab(pseudo, 3, Combiner::quantile(1.5), RngStream(1)), std::invalid_argument);
}

TEST(ZTest, OneSidedNormalTail) {
    const auto pseudo = PseudoOutcomes::with_sigma(vec({1.0, 1.0, 1.0, -1.0}), 1.0);
    EXPECT_NEAR(z_test(pseudo), 0.15865525393145707, 1e-12);
    const auto neg = PseudoOutcomes::with_sigma(vec({-1.0, -1.0, -1.0, 1.0}), 1.0);
    EXPECT_NEAR(z_test(neg), 1.0 - 0.15865525393145707, 1e-12);
}

TEST(NullCalibration, TabPValuesAreUniform) {
    // Under a zero-mean i.i.d. reward sequence the walk end is close to N(0, 1).
    std::vector<double> ps;
    for (int rep = 0; rep < 4000; ++rep) {
        RngStream rng = RngStream(108).child(static_cast<std::uint64_t>(rep));
        Eigen::VectorXd mu(400);
        for (auto& v : mu) v = rng.normal();
        ps.push_back(tab_test(PseudoOutcomes::from_values(mu), rng).p_value);
    }
    // 1.95 / sqrt(m) is the 0.1% critical value of the KS statistic.
    EXPECT_LT(ks_uniform(ps), 1.95 / std::sqrt(4000.0));
}

TEST(NullCalibration, PTabCauchyIsValid) {
    int rejections = 0;
    const int reps = 1000;
    for (int rep = 0; rep < reps; ++rep) {
        RngStream rng = RngStream(109).child(static_cast<std::uint64_t>(rep));
        Eigen::VectorXd mu(200);
        for (auto& v : mu) v = rng.normal();
        const auto res = p_tab(PseudoOutcomes::from_values(mu), 20, Combiner::cauchy(), rng.child(99));
        if (res.combined_p < 0.05) ++rejections;
    }
    EXPECT_LT(static_cast<double>(rejections) / reps, 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / reps));
}
