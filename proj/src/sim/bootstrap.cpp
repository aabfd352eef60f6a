#include "ptab/sim/bootstrap.hpp"

#include "ptab/core/error.hpp"
#include "ptab/nuisance/ridge.hpp"
#include "ptab/sim/switchback.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ptab {

namespace {

// Carryover part of the ATE per unit scale when Gamma_t = u for every t.
double unit_carryover(const MdpCoefficients& coef, const Eigen::VectorXd& u) {
    Eigen::VectorXd carry = Eigen::VectorXd::Zero(u.size());
    double total = 0.0;
    for (std::size_t t = 1; t < coef.horizon(); ++t) {
        carry = coef.transition[t - 1] * carry + u;
        total += coef.beta[t].dot(carry);
    }
    return total / static_cast<double>(coef.horizon());
}

}  // namespace

double BootstrapEnv::direct_effect() const {
    double sum = 0.0;
    for (double g : coef.gamma) sum += g;
    return sum / static_cast<double>(coef.horizon());
}

double BootstrapEnv::carryover_effect() const { return true_ate_linear(coef) - direct_effect(); }

BootstrapEnv build_bootstrap_env(const PanelDataset& panel, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite and >= 0");
    if (panel.size() < 2) throw std::invalid_argument("source panel needs at least 2 days");
    for (std::size_t i = 0; i < panel.size(); ++i) {
        const auto& a = panel.day(i).a;
        for (std::size_t t = 0; t < a.size(); ++t) {
            if (a[t] != 0) {
                throw DataError("source panel is not single-policy: day " + std::to_string(i + 1) + " step " +
                                std::to_string(t + 1) + " has a=" + std::to_string(a[t]));
            }
        }
    }

    const std::size_t n = panel.size();
    const std::size_t horizon = panel.horizon();
    const auto d = static_cast<Eigen::Index>(panel.dim());
    BootstrapEnv env;
    env.lambda = lambda;
    env.reward_residuals.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(horizon));
    env.state_residuals.assign(n, Eigen::MatrixXd(static_cast<Eigen::Index>(horizon - 1), d));
    env.initial_states = panel.states_at(0);

    double y_sum = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        const Eigen::MatrixXd x = panel.states_at(t);
        Eigen::VectorXd y(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) y[static_cast<Eigen::Index>(i)] = panel.day(i).y[static_cast<Eigen::Index>(t)];
        y_sum += y.sum();
        const RidgeFit fit = ridge_fit_gcv(x, y);
        env.coef.alpha.push_back(fit.intercept);
        env.coef.beta.push_back(fit.coef);
        env.reward_residuals.col(static_cast<Eigen::Index>(t)) = y - fit.predict(x);

        if (t + 1 == horizon) continue;
        const Eigen::MatrixXd x_next = panel.states_at(t + 1);
        Eigen::VectorXd phi(d);
        Eigen::MatrixXd trans(d, d);
        for (Eigen::Index j = 0; j < d; ++j) {
            const RidgeFit sf = ridge_fit_gcv(x, x_next.col(j));
            phi[j] = sf.intercept;
            trans.row(j) = sf.coef.transpose();
            const Eigen::VectorXd resid = x_next.col(j) - sf.predict(x);
            for (std::size_t i = 0; i < n; ++i) {
                env.state_residuals[i](static_cast<Eigen::Index>(t), j) = resid[static_cast<Eigen::Index>(i)];
            }
        }
        env.coef.phi.push_back(std::move(phi));
        env.coef.transition.push_back(std::move(trans));
    }
    env.y_bar = y_sum / static_cast<double>(n * horizon);

    const double half = lambda * env.y_bar / 2.0;
    env.coef.gamma.assign(horizon, half);

    Eigen::VectorXd u = Eigen::VectorXd::Zero(d);
    for (const auto& b : env.coef.beta) u += b;
    if (u.norm() > 0.0) {
        u /= u.norm();
    } else {
        u[0] = 1.0;
    }
    double scale = 0.0;
    if (half != 0.0) {
        const double unit = unit_carryover(env.coef, u);
        if (!(std::abs(unit) > 1e-12)) {
            throw NumericError("carryover channel is degenerate; cannot calibrate lambda > 0");
        }
        scale = half / unit;
    }
    env.coef.action.assign(horizon - 1, scale * u);
    return env;
}

Trajectory simulate_bootstrap_day(const BootstrapEnv& env, std::size_t r, double xi, const std::vector<int>& actions) {
    const std::size_t horizon = env.horizon();
    if (r >= env.source_days()) throw std::invalid_argument("source day out of range");
    if (actions.size() != horizon) throw std::invalid_argument("actions need T entries");
    const MdpCoefficients& c = env.coef;
    const auto d = static_cast<Eigen::Index>(env.dim());
    const auto ri = static_cast<Eigen::Index>(r);
    Trajectory day;
    day.a = actions;
    day.x.resize(static_cast<Eigen::Index>(horizon), d);
    day.y.resize(static_cast<Eigen::Index>(horizon));
    Eigen::VectorXd x = env.initial_states.row(ri).transpose();
    for (std::size_t t = 0; t < horizon; ++t) {
        const auto ti = static_cast<Eigen::Index>(t);
        const double a = actions[t];
        day.x.row(ti) = x.transpose();
        day.y[ti] = c.alpha[t] + c.beta[t].dot(x) + c.gamma[t] * a + xi * env.reward_residuals(ri, ti);
        if (t + 1 < horizon) {
            x = c.phi[t] + c.transition[t] * x + c.action[t] * a + xi * env.state_residuals[r].row(ti).transpose();
        }
    }
    return day;
}

PanelDataset sample_bootstrap(const BootstrapEnv& env, std::size_t n, RngStream& rng) {
    if (n < 2) throw std::invalid_argument("n must be >= 2");
    RngStream assign_rng = rng.child(0);
    const auto actions = switchback_assign(n, env.horizon(), assign_rng, SwitchbackMode::per_day);
    std::vector<Trajectory> days;
    days.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        RngStream day_rng = rng.child(i + 1);
        const auto r = static_cast<std::size_t>(day_rng.below(env.source_days()));
        const double xi = day_rng.normal();
        days.push_back(simulate_bootstrap_day(env, r, xi, actions[i]));
    }
    return PanelDataset(std::move(days));
}

nlohmann::json to_json(const BootstrapEnv& env) {
    nlohmann::json j;
    j["lambda"] = env.lambda;
    j["y_bar"] = env.y_bar;
    j["coefficients"] = to_json(env.coef);
    j["reward_residuals"] = matrix_to_json(env.reward_residuals);
    nlohmann::json banks = nlohmann::json::array();
    for (const auto& m : env.state_residuals) banks.push_back(matrix_to_json(m));
    j["state_residuals"] = std::move(banks);
    j["initial_states"] = matrix_to_json(env.initial_states);
    return j;
}

BootstrapEnv bootstrap_env_from_json(const nlohmann::json& j) {
    BootstrapEnv env;
    try {
        env.lambda = j.at("lambda").get<double>();
        env.y_bar = j.at("y_bar").get<double>();
        env.coef = mdp_coefficients_from_json(j.at("coefficients"));
        env.reward_residuals = matrix_from_json(j.at("reward_residuals"));
        for (const auto& m : j.at("state_residuals")) env.state_residuals.push_back(matrix_from_json(m));
        env.initial_states = matrix_from_json(j.at("initial_states"));
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad bootstrap environment: ") + e.what());
    }
    const auto n = static_cast<Eigen::Index>(env.state_residuals.size());
    const auto horizon = static_cast<Eigen::Index>(env.horizon());
    const auto d = static_cast<Eigen::Index>(env.dim());
    bool ok = n >= 1 && env.reward_residuals.rows() == n && env.reward_residuals.cols() == horizon &&
              env.initial_states.rows() == n && env.initial_states.cols() == d;
    for (const auto& m : env.state_residuals) {
        // An empty (T = 1) block parses as 0 x 0.
        ok = ok && m.rows() == horizon - 1 && (m.cols() == d || horizon == 1);
    }
    if (!ok) throw std::invalid_argument("bootstrap environment shapes are inconsistent");
    if (horizon == 1) {
        for (auto& m : env.state_residuals) m.resize(0, d);
    }
    return env;
}

}  // namespace ptab
