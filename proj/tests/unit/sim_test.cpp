#include "ptab/core/error.hpp"
#include "ptab/sim/bootstrap.hpp"
#include "ptab/sim/iid_dgp.hpp"
#include "ptab/sim/mdp.hpp"
#include "ptab/sim/switchback.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace ptab;

namespace {

double phi_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double phi_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

bool same_panel(const PanelDataset& a, const PanelDataset& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.day(i).a != b.day(i).a) return false;
        if (!(a.day(i).x.array() == b.day(i).x.array()).all()) return false;
        if (!(a.day(i).y.array() == b.day(i).y.array()).all()) return false;
    }
    return true;
}

double lag1_corr(const std::vector<std::pair<double, double>>& pairs) {
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (const auto& [x, y] : pairs) {
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    const double n = static_cast<double>(pairs.size());
    const double cov = sxy / n - (sx / n) * (sy / n);
    return cov / std::sqrt((sxx / n - (sx / n) * (sx / n)) * (syy / n - (sy / n) * (sy / n)));
}

MdpDgpSpec mdp_spec(std::size_t n, std::size_t horizon, double delta) {
    MdpDgpSpec s;
    s.n = n;
    s.horizon = horizon;
    s.delta = delta;
    return s;
}

PanelDataset control_panel(std::size_t n, std::size_t horizon, std::uint64_t seed) {
    MdpDgpSpec s = mdp_spec(n, horizon, 0.0);
    s.assignment = MdpAssignment::all_control;
    const auto coef = draw_mdp_coefficients(s);
    RngStream rng(seed);
    return gen_mdp(s, coef, rng);
}

}  // namespace

TEST(IidCatalog, EveryCellValidatesAndRoundTrips) {
    const auto cat = iid_catalog();
    EXPECT_FALSE(cat.empty());
    std::set<std::string> labels;
    for (const auto& spec : cat) {
        EXPECT_NO_THROW(spec.validate());
        const IidDgpSpec back = iid_spec_from_json(to_json(spec));
        EXPECT_EQ(back.label(), spec.label());
        EXPECT_EQ(back.n, spec.n);
        labels.insert(spec.label());
    }
    EXPECT_EQ(labels.size(), cat.size());
}

TEST(IidCatalog, RejectsCellsOutsideTheCatalog) {
    IidDgpSpec s;
    s.hypothesis = "H0_3";
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = IidDgpSpec{};
    s.p_a = 0.4;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = IidDgpSpec{};
    s.family = IidFamily::confounded;
    s.dim = 7;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    EXPECT_THROW((void)iid_spec_from_json(nlohmann::json{{"family", "conf-iid"}}), std::invalid_argument);
}

TEST(IidTruth, RandomizedClosedForms) {
    // tau(x) depends on S = X1 + X2 ~ N(0, 2).
    IidDgpSpec s;
    s.sigma0 = 3.0;
    s.hypothesis = "H1_3";
    auto v = iid_true_ate(s);
    EXPECT_NEAR(v.value, 1.0, 4.0 * v.se);

    s.hypothesis = "H1_2";
    v = iid_true_ate(s);
    EXPECT_NEAR(v.value, 0.8 * 2.0 / std::sqrt(std::numbers::pi), 4.0 * v.se);

    s.hypothesis = "H1_1";
    s.sigma0 = 1.0;
    v = iid_true_ate(s);
    const double r = 1.0 / std::numbers::sqrt2;
    const double e_max = phi_cdf(r) + std::numbers::sqrt2 * phi_pdf(r);
    EXPECT_NEAR(v.value, 0.3 * 0.8 * e_max, 4.0 * v.se);
}

TEST(IidTruth, ConfoundedClosedForms) {
    IidDgpSpec s;
    s.family = IidFamily::confounded;
    s.hypothesis = "H1_2";
    auto v = iid_true_ate(s);
    EXPECT_NEAR(v.value, 0.8 * 0.032, 1e-12);

    s.hypothesis = "H1_1";
    v = iid_true_ate(s);
    EXPECT_NEAR(v.value, 0.8 * 0.48 * 0.5, 4.0 * v.se);
}

TEST(IidTruth, NullCellsHaveZeroEffect) {
    for (const auto& spec : iid_catalog()) {
        if (!spec.is_null()) continue;
        const auto v = iid_true_ate(spec);
        EXPECT_NEAR(v.value, 0.0, 3.0 * v.se + 1e-12) << spec.label();
    }
}

TEST(IidTruth, SampleMeansMatchConditionalMeans) {
    // Regressing Y on the true conditional mean should give slope 1 and intercept 0.
    for (const char* h : {"H1_1", "H1_3", "H0_2"}) {
        IidDgpSpec s;
        s.family = IidFamily::confounded;
        s.hypothesis = h;
        s.n = 100000;
        RngStream rng(500);
        const auto sample = gen_iid(s, rng);
        const IidTruth truth{s};
        double resid = 0.0;
        std::vector<double> row(sample.data.dim());
        for (std::size_t i = 0; i < sample.data.size(); ++i) {
            for (std::size_t j = 0; j < row.size(); ++j) row[j] = sample.data.x()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            resid += sample.data.y()[static_cast<Eigen::Index>(i)] - truth.mean_outcome(sample.data.a()[i], row);
        }
        EXPECT_NEAR(resid / static_cast<double>(s.n), 0.0, 0.02) << h;
    }
}

TEST(IidGen, DeterministicAndShaped) {
    IidDgpSpec s;
    s.family = IidFamily::confounded;
    s.dim = 20;
    s.n = 64;
    RngStream a(7);
    RngStream b(7);
    const auto x = gen_iid(s, a);
    const auto y = gen_iid(s, b);
    EXPECT_EQ(x.data.dim(), 20u);
    EXPECT_EQ(x.data.a(), y.data.a());
    EXPECT_TRUE((x.data.y().array() == y.data.y().array()).all());
}

TEST(Switchback, AlternatesWithinDay) {
    for (auto mode : {SwitchbackMode::per_day, SwitchbackMode::carry_over}) {
        RngStream rng(501);
        const auto a = switchback_assign(200, 7, rng, mode);
        for (const auto& day : a) {
            for (std::size_t t = 1; t < day.size(); ++t) ASSERT_EQ(day[t], 1 - day[t - 1]);
        }
    }
}

TEST(Switchback, CarryOverContinuesAcrossDays) {
    RngStream rng(502);
    const auto a = switchback_assign(50, 5, rng, SwitchbackMode::carry_over, 1);
    EXPECT_EQ(a[0][0], 1);
    for (std::size_t i = 1; i < a.size(); ++i) ASSERT_EQ(a[i][0], 1 - a[i - 1][4]);
}

TEST(Switchback, PerDayFirstActionIsFair) {
    RngStream rng(503);
    const auto a = switchback_assign(20000, 6, rng, SwitchbackMode::per_day);
    double ones = 0.0;
    for (const auto& day : a) ones += day[0];
    EXPECT_NEAR(ones / 20000.0, 0.5, 4.0 * std::sqrt(0.25 / 20000.0));
    EXPECT_THROW((void)parse_switchback_mode("weekly"), std::invalid_argument);
}

TEST(Mdp, CoefficientRanges) {
    for (double delta : mdp_delta_grid()) {
        for (auto kind : {MdpKind::linear, MdpKind::nonlinear}) {
            MdpDgpSpec s = mdp_spec(10, 24, delta);
            s.kind = kind;
            const auto c = draw_mdp_coefficients(s);
            const double bound = kind == MdpKind::linear ? 0.3 : 0.6;
            ASSERT_EQ(c.horizon(), 24u);
            ASSERT_EQ(c.dim(), 3u);
            for (std::size_t t = 0; t < 24; ++t) {
                ASSERT_GE(std::abs(c.alpha[t]), 0.5);
                ASSERT_LE(std::abs(c.alpha[t]), 1.0);
                ASSERT_GE(c.beta[t].cwiseAbs().minCoeff(), 0.1);
                ASSERT_LE(c.beta[t].cwiseAbs().maxCoeff(), 0.3);
                if (delta == 0.0) {
                    ASSERT_EQ(c.gamma[t], 0.0);
                } else {
                    ASSERT_GE(c.gamma[t], 0.1 * delta);
                    ASSERT_LE(c.gamma[t], 0.1 * delta + 0.1 + 0.7 * delta);
                }
            }
            for (std::size_t t = 0; t < 23; ++t) {
                ASSERT_GE(c.phi[t].cwiseAbs().minCoeff(), 0.5);
                ASSERT_LE(c.transition[t].cwiseAbs().maxCoeff(), bound);
                if (delta == 0.0) ASSERT_EQ(c.action[t].norm(), 0.0);
            }
        }
    }
}

TEST(Mdp, CommonCoefficientsAcrossDelta) {
    const auto a = draw_mdp_coefficients(mdp_spec(10, 24, 0.1));
    const auto b = draw_mdp_coefficients(mdp_spec(10, 24, 0.25));
    EXPECT_EQ(a.alpha, b.alpha);
    for (std::size_t t = 0; t < 23; ++t) EXPECT_TRUE((a.transition[t].array() == b.transition[t].array()).all());
}

TEST(Mdp, TrueAteHandValue) {
    MdpCoefficients c;
    c.alpha = {1.0, -1.0};
    c.gamma = {0.3, 0.3};
    c.beta = {Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 0.5)};
    c.phi = {Eigen::VectorXd::Zero(1)};
    c.transition = {Eigen::MatrixXd::Constant(1, 1, 0.2)};
    c.action = {Eigen::VectorXd::Constant(1, 0.4)};
    // (0.3 + 0.3 + 0.5 * 0.4) / 2
    EXPECT_NEAR(true_ate_linear(c), 0.4, 1e-15);
}

TEST(Mdp, ClosedFormAgreesWithRollout) {
    for (double delta : {0.0, 0.1, 0.25}) {
        const auto c = draw_mdp_coefficients(mdp_spec(10, 12, delta));
        RngStream rng(504);
        const auto mc = rollout_ate(MdpKind::linear, c, 100000, rng, true);
        EXPECT_NEAR(mc.value, true_ate_linear(c), 4.0 * mc.se + 1e-12) << delta;
        RngStream rng2(505);
        const auto indep = rollout_ate(MdpKind::linear, c, 100000, rng2, false);
        EXPECT_NEAR(indep.value, true_ate_linear(c), 4.0 * indep.se) << delta;
    }
}

TEST(Mdp, LinearValueMatchesRollout) {
    const auto c = draw_mdp_coefficients(mdp_spec(10, 5, 0.25));
    const std::vector<double> x{0.4, -0.2, 1.0};
    // Mean dynamics are affine, so the mean path gives the value exactly.
    double v = 0.0;
    Eigen::VectorXd m = Eigen::Map<const Eigen::VectorXd>(x.data(), 3);
    for (std::size_t t = 2; t < 5; ++t) {
        v += mdp_mean_reward(MdpKind::linear, c, t, 1, std::span<const double>(m.data(), 3));
        if (t + 1 < 5) m = c.phi[t] + c.transition[t] * m + c.action[t];
    }
    EXPECT_NEAR(mdp_linear_value(c, 2, 1, x), v, 1e-12);
    EXPECT_EQ(mdp_linear_value(c, 5, 1, x), 0.0);
}

TEST(Mdp, NullHasZeroAte) {
    MdpDgpSpec s = mdp_spec(10, 24, 0.0);
    const auto c = draw_mdp_coefficients(s);
    EXPECT_EQ(true_ate_linear(c), 0.0);
    s.kind = MdpKind::nonlinear;
    const auto cn = draw_mdp_coefficients(s);
    RngStream rng(506);
    // With gamma = 0 the two arms share every reward exactly under common random numbers.
    EXPECT_EQ(rollout_ate(MdpKind::nonlinear, cn, 1000, rng, true).value, 0.0);
}

TEST(Mdp, RewardNoiseLagOneCorrelation) {
    // eta is AR(1) with rho 0.5 and variance 1.5, eps is white with variance 1.5: corr 0.75 / 3.
    MdpDgpSpec s = mdp_spec(20000, 4, 0.0);
    const auto c = draw_mdp_coefficients(s);
    RngStream rng(507);
    const auto panel = gen_mdp(s, c, rng);
    std::vector<std::pair<double, double>> pairs;
    for (const auto& d : panel.days()) {
        std::vector<double> e(4);
        for (std::size_t t = 0; t < 4; ++t) {
            const auto ti = static_cast<Eigen::Index>(t);
            const std::vector<double> x{d.x(ti, 0), d.x(ti, 1), d.x(ti, 2)};
            e[t] = d.y[ti] - mdp_mean_reward(MdpKind::linear, c, t, d.a[t], x);
        }
        for (std::size_t t = 0; t + 1 < 4; ++t) pairs.emplace_back(e[t], e[t + 1]);
    }
    EXPECT_NEAR(lag1_corr(pairs), 0.25, 0.02);
}

TEST(Mdp, GenerationIsDeterministicAndUsesPerDaySwitchback) {
    MdpDgpSpec s = mdp_spec(40, 6, 0.1);
    const auto c = draw_mdp_coefficients(s);
    RngStream a(8);
    RngStream b(8);
    const auto p = gen_mdp(s, c, a);
    EXPECT_TRUE(same_panel(p, gen_mdp(s, c, b)));
    std::set<int> firsts;
    for (const auto& d : p.days()) firsts.insert(d.a[0]);
    EXPECT_EQ(firsts.size(), 2u);
    EXPECT_THROW((void)gen_mdp(mdp_spec(40, 5, 0.1), c, a), std::invalid_argument);
}

TEST(Mdp, JsonRoundTrip) {
    MdpDgpSpec s = mdp_spec(30, 5, 0.055);
    s.kind = MdpKind::nonlinear;
    s.coef_seed = 99;
    const auto c = draw_mdp_coefficients(s);
    const auto back = mdp_coefficients_from_json(nlohmann::json::parse(to_json(c).dump()));
    EXPECT_EQ(back.alpha, c.alpha);
    EXPECT_EQ(back.gamma, c.gamma);
    for (std::size_t t = 0; t < 4; ++t) {
        EXPECT_TRUE((back.transition[t].array() == c.transition[t].array()).all());
        EXPECT_TRUE((back.action[t].array() == c.action[t].array()).all());
    }
    const auto sb = mdp_spec_from_json(to_json(s));
    EXPECT_EQ(sb.label(), s.label());
    EXPECT_EQ(sb.coef_seed, 99u);
    EXPECT_EQ(sb.kind, MdpKind::nonlinear);
}

TEST(Bootstrap, CalibratedEffectSplitsEvenly) {
    const PanelDataset src = control_panel(200, 8, 600);
    for (double lambda : {0.0, 0.05, 0.1, 0.2}) {
        const BootstrapEnv env = build_bootstrap_env(src, lambda);
        EXPECT_NEAR(true_ate_linear(env.coef), lambda * env.y_bar, 1e-8) << lambda;
        EXPECT_NEAR(env.direct_effect(), env.carryover_effect(), 1e-8) << lambda;
        EXPECT_NEAR(env.direct_effect(), lambda * env.y_bar / 2.0, 1e-12);
    }
    double sum = 0.0;
    for (const auto& d : src.days()) sum += d.y.sum();
    EXPECT_NEAR(build_bootstrap_env(src, 0.1).y_bar, sum / (200.0 * 8.0), 1e-12);
}

TEST(Bootstrap, RejectsTreatedSource) {
    MdpDgpSpec s = mdp_spec(20, 4, 0.1);
    const auto c = draw_mdp_coefficients(s);
    RngStream rng(601);
    EXPECT_THROW((void)build_bootstrap_env(gen_mdp(s, c, rng), 0.1), DataError);
}

TEST(Bootstrap, ZeroMultiplierFollowsFittedMeans) {
    const BootstrapEnv env = build_bootstrap_env(control_panel(60, 5, 602), 0.1);
    const std::vector<int> actions{1, 0, 1, 0, 1};
    const Trajectory d = simulate_bootstrap_day(env, 3, 0.0, actions);
    Eigen::VectorXd x = env.initial_states.row(3).transpose();
    const auto& c = env.coef;
    for (std::size_t t = 0; t < 5; ++t) {
        const auto ti = static_cast<Eigen::Index>(t);
        ASSERT_TRUE((d.x.row(ti).transpose().array() == x.array()).all());
        ASSERT_NEAR(d.y[ti], c.alpha[t] + c.beta[t].dot(x) + c.gamma[t] * actions[t], 1e-12);
        if (t + 1 < 5) x = c.phi[t] + c.transition[t] * x + c.action[t] * actions[t];
    }
}

TEST(Bootstrap, ResidualBankIsReusedAcrossSteps) {
    // xi = 1 with all-control actions reproduces the source day exactly (up to rounding).
    const PanelDataset src = control_panel(60, 5, 603);
    const BootstrapEnv env = build_bootstrap_env(src, 0.0);
    const Trajectory d = simulate_bootstrap_day(env, 7, 1.0, std::vector<int>(5, 0));
    EXPECT_LT((d.y - src.day(7).y).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((d.x - src.day(7).x).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Bootstrap, SamplingDeterministicAndReloadable) {
    const BootstrapEnv env = build_bootstrap_env(control_panel(80, 6, 604), 0.1);
    RngStream a(5);
    RngStream b(5);
    const PanelDataset p = sample_bootstrap(env, 50, a);
    EXPECT_TRUE(same_panel(p, sample_bootstrap(env, 50, b)));

    const BootstrapEnv back = bootstrap_env_from_json(nlohmann::json::parse(to_json(env).dump()));
    RngStream c(5);
    EXPECT_TRUE(same_panel(p, sample_bootstrap(back, 50, c)));
    EXPECT_EQ(back.y_bar, env.y_bar);
    EXPECT_THROW((void)bootstrap_env_from_json(nlohmann::json{{"lambda", 0.1}}), std::invalid_argument);
}

TEST(Bootstrap, ResidualScaleAndSerialCorrelation) {
    const BootstrapEnv env = build_bootstrap_env(control_panel(400, 6, 605), 0.1);
    RngStream rng(606);
    const PanelDataset p = sample_bootstrap(env, 20000, rng);
    const auto& c = env.coef;
    double ss = 0.0;
    std::size_t count = 0;
    std::vector<std::pair<double, double>> pairs;
    for (const auto& d : p.days()) {
        std::vector<double> e(6);
        for (std::size_t t = 0; t < 6; ++t) {
            const auto ti = static_cast<Eigen::Index>(t);
            const Eigen::VectorXd x = d.x.row(ti).transpose();
            e[t] = d.y[ti] - (c.alpha[t] + c.beta[t].dot(x) + c.gamma[t] * d.a[t]);
            ss += e[t] * e[t];
            ++count;
        }
        for (std::size_t t = 0; t + 1 < 6; ++t) pairs.emplace_back(e[t], e[t + 1]);
    }
    const double bank = env.reward_residuals.squaredNorm() / static_cast<double>(env.reward_residuals.size());
    const double sim = ss / static_cast<double>(count);
    EXPECT_GT(sim, 0.85 * bank);
    EXPECT_LT(sim, 1.15 * bank);
    // The source noise is positively autocorrelated; one multiplier per day keeps that sign.
    EXPECT_GT(lag1_corr(pairs), 0.1);
}
