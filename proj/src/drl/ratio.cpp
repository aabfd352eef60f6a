#include "ptab/drl/ratio.hpp"

#include "ptab/core/error.hpp"
#include "ptab/nuisance/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ptab {

namespace {

using Gaussian = RatioModel::Gaussian;

constexpr double kJitter = 1e-8;

Gaussian make_gaussian(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, bool& regularized) {
    const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(sym);
    bool ok = llt.info() == Eigen::Success;
    if (ok) {
        const Eigen::VectorXd diag = Eigen::MatrixXd(llt.matrixL()).diagonal();
        ok = diag.minCoeff() > 1e-12 * std::max(1.0, diag.maxCoeff());
    }
    if (!ok) {
        regularized = true;
        llt.compute(sym + kJitter * Eigen::MatrixXd::Identity(sym.rows(), sym.cols()));
        if (llt.info() != Eigen::Success) throw NumericError("state covariance is not positive definite");
    }
    Gaussian g;
    g.mean = mean;
    g.chol = llt.matrixL();
    const auto d = static_cast<double>(mean.size());
    g.log_norm = -0.5 * d * std::log(2.0 * std::numbers::pi) - g.chol.diagonal().array().log().sum();
    return g;
}

struct Moments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

Moments sample_moments(const Eigen::MatrixXd& x) {
    Moments m;
    m.mean = x.colwise().mean().transpose();
    const Eigen::MatrixXd c = x.rowwise() - m.mean.transpose();
    const double denom = x.rows() > 1 ? static_cast<double>(x.rows() - 1) : 1.0;
    m.cov = c.transpose() * c / denom;
    return m;
}

// State laws under a sequence of expected actions; extra[t] adds var(A_t) Gamma Gamma'.
std::vector<Moments> propagate(const LinearGaussianDynamics& dyn, const std::vector<double>& mean_action,
                               const std::vector<double>& action_var) {
    const std::size_t horizon = dyn.horizon();
    std::vector<Moments> out(horizon);
    out[0] = {dyn.init_mean, dyn.init_cov};
    for (std::size_t t = 0; t + 1 < horizon; ++t) {
        const auto& phi = dyn.transition[t];
        const auto& gamma = dyn.action[t];
        out[t + 1].mean = dyn.intercept[t] + phi * out[t].mean + gamma * mean_action[t];
        out[t + 1].cov = phi * out[t].cov * phi.transpose() + dyn.noise_cov[t] +
                         action_var[t] * gamma * gamma.transpose();
    }
    return out;
}

std::vector<Gaussian> to_gaussians(const std::vector<Moments>& moments, bool& regularized) {
    std::vector<Gaussian> out;
    out.reserve(moments.size());
    for (const auto& m : moments) out.push_back(make_gaussian(m.mean, m.cov, regularized));
    return out;
}

}  // namespace

std::string to_string(RatioBackend backend) {
    switch (backend) {
        case RatioBackend::model_gaussian: return "model_gaussian";
        case RatioBackend::oracle: return "oracle";
        case RatioBackend::plugin_uniform: return "plugin_uniform";
    }
    return "model_gaussian";
}

RatioBackend parse_ratio_backend(const std::string& name) {
    if (name == "model_gaussian") return RatioBackend::model_gaussian;
    if (name == "oracle") return RatioBackend::oracle;
    if (name == "plugin_uniform") return RatioBackend::plugin_uniform;
    throw std::invalid_argument("unknown ratio backend '" + name + "'");
}

BehaviorPolicy BehaviorPolicy::known(std::vector<double> treat_probs) {
    for (double p : treat_probs) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("assignment probabilities must lie in [0, 1]");
    }
    BehaviorPolicy b;
    b.kind = Kind::known_probabilities;
    b.treat_probs = std::move(treat_probs);
    return b;
}

BehaviorPolicy BehaviorPolicy::estimated(double clip) {
    if (!(clip > 0.0 && clip < 0.5)) throw std::invalid_argument("behavior clip must lie in (0, 0.5)");
    BehaviorPolicy b;
    b.kind = Kind::estimated_logistic;
    b.clip = clip;
    return b;
}

std::string BehaviorPolicy::name() const {
    switch (kind) {
        case Kind::switchback: return "switchback";
        case Kind::known_probabilities: return "probs";
        case Kind::estimated_logistic: return "estimate";
    }
    return "switchback";
}

double RatioModel::Gaussian::log_pdf(std::span<const double> x) const {
    const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    const Eigen::VectorXd z = chol.triangularView<Eigen::Lower>().solve(v - mean);
    return log_norm - 0.5 * z.squaredNorm();
}

LinearGaussianDynamics fit_linear_gaussian_dynamics(const PanelDataset& panel) {
    const std::size_t horizon = panel.horizon();
    const auto d = static_cast<Eigen::Index>(panel.dim());
    const auto n = static_cast<Eigen::Index>(panel.size());
    LinearGaussianDynamics dyn;
    const Moments init = sample_moments(panel.states_at(0));
    dyn.init_mean = init.mean;
    dyn.init_cov = init.cov;

    for (std::size_t t = 0; t + 1 < horizon; ++t) {
        const Eigen::MatrixXd x_now = panel.states_at(t);
        const Eigen::MatrixXd x_next = panel.states_at(t + 1);
        Eigen::MatrixXd design(n, d + 1);
        design.leftCols(d) = x_now;
        for (Eigen::Index i = 0; i < n; ++i) design(i, d) = panel.day(static_cast<std::size_t>(i)).a[t];

        Eigen::VectorXd intercept(d);
        Eigen::MatrixXd transition(d, d);
        Eigen::VectorXd action(d);
        Eigen::MatrixXd resid(n, d);
        for (Eigen::Index j = 0; j < d; ++j) {
            const RidgeFit fit = ridge_fit(design, x_next.col(j), 0.0);
            intercept[j] = fit.intercept;
            transition.row(j) = fit.coef.head(d).transpose();
            action[j] = fit.coef[d];
            resid.col(j) = x_next.col(j) - fit.predict(design);
        }
        const Eigen::Index dof = n - (d + 2);
        const double denom = dof > 0 ? static_cast<double>(dof) : static_cast<double>(std::max<Eigen::Index>(n, 1));
        dyn.intercept.push_back(intercept);
        dyn.transition.push_back(transition);
        dyn.action.push_back(action);
        dyn.noise_cov.push_back(resid.transpose() * resid / denom);
    }
    return dyn;
}

double RatioModel::raw_ratio(std::size_t t, int a, std::span<const double> x, int a_obs) const {
    if (a_obs != a) return 0.0;
    if (t >= horizon_) throw std::out_of_range("ratio step beyond horizon");
    if (backend_ == RatioBackend::plugin_uniform) {
        const double p = a == 1 ? treat_freq_[t] : 1.0 - treat_freq_[t];
        return p > 0.0 ? 1.0 / p : std::numeric_limits<double>::infinity();
    }
    const double log_target = target_[static_cast<std::size_t>(a)][t].log_pdf(x);
    switch (behavior_.kind) {
        case BehaviorPolicy::Kind::switchback: {
            const std::size_t c = (static_cast<std::size_t>(a_obs) + t) % 2;
            return std::exp(log_target - behavior_seq_[c][t].log_pdf(x) + std::numbers::ln2);
        }
        case BehaviorPolicy::Kind::known_probabilities: {
            const double p1 = behavior_.treat_probs[t];
            const double p = a_obs == 1 ? p1 : 1.0 - p1;
            if (!(p > 0.0)) return std::numeric_limits<double>::infinity();
            return std::exp(log_target - behavior_marginal_[t].log_pdf(x)) / p;
        }
        case BehaviorPolicy::Kind::estimated_logistic: {
            const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
            const double q1 = std::clamp(assignment_[t].probability(Eigen::VectorXd(v)), behavior_.clip,
                                         1.0 - behavior_.clip);
            const double q = a_obs == 1 ? q1 : 1.0 - q1;
            return std::exp(log_target - behavior_marginal_[t].log_pdf(x)) / q;
        }
    }
    return 0.0;
}

double RatioModel::ratio(std::size_t t, int a, std::span<const double> x, int a_obs) const {
    return std::min(raw_ratio(t, a, x, a_obs), omega_max_);
}

RatioModel fit_mis_ratio(const PanelDataset& panel, const BehaviorPolicy& behavior, RatioBackend backend,
                         const RatioOptions& options) {
    if (!(options.omega_max > 0.0)) throw std::invalid_argument("omega_max must be positive");
    const std::size_t horizon = panel.horizon();
    RatioModel model;
    model.backend_ = backend;
    model.behavior_ = behavior;
    model.omega_max_ = options.omega_max;
    model.horizon_ = horizon;

    if (behavior.kind == BehaviorPolicy::Kind::known_probabilities && behavior.treat_probs.size() != horizon) {
        throw std::invalid_argument("known assignment probabilities must have one entry per step (T=" +
                                    std::to_string(horizon) + ")");
    }

    if (backend == RatioBackend::plugin_uniform) {
        model.treat_freq_.resize(horizon);
        for (std::size_t t = 0; t < horizon; ++t) {
            double ones = 0.0;
            for (const auto& day : panel.days()) ones += day.a[t];
            model.treat_freq_[t] = ones / static_cast<double>(panel.size());
        }
        return model;
    }

    LinearGaussianDynamics dyn;
    if (backend == RatioBackend::oracle) {
        if (!options.oracle) throw std::invalid_argument("oracle ratio backend needs the true dynamics");
        dyn = *options.oracle;
        if (dyn.horizon() != horizon) throw std::invalid_argument("oracle dynamics horizon does not match the panel");
    } else {
        dyn = fit_linear_gaussian_dynamics(panel);
    }

    bool regularized = false;
    const std::vector<double> zeros(horizon, 0.0);
    for (int a = 0; a < 2; ++a) {
        const std::vector<double> actions(horizon, static_cast<double>(a));
        model.target_[static_cast<std::size_t>(a)] = to_gaussians(propagate(dyn, actions, zeros), regularized);
    }

    switch (behavior.kind) {
        case BehaviorPolicy::Kind::switchback:
            for (std::size_t c = 0; c < 2; ++c) {
                std::vector<double> actions(horizon);
                for (std::size_t t = 0; t < horizon; ++t) actions[t] = static_cast<double>((c + t) % 2);
                model.behavior_seq_[c] = to_gaussians(propagate(dyn, actions, zeros), regularized);
            }
            break;
        case BehaviorPolicy::Kind::known_probabilities: {
            std::vector<double> var(horizon);
            for (std::size_t t = 0; t < horizon; ++t) var[t] = behavior.treat_probs[t] * (1.0 - behavior.treat_probs[t]);
            model.behavior_marginal_ = to_gaussians(propagate(dyn, behavior.treat_probs, var), regularized);
            break;
        }
        case BehaviorPolicy::Kind::estimated_logistic:
            for (std::size_t t = 0; t < horizon; ++t) {
                const Eigen::MatrixXd x = panel.states_at(t);
                std::vector<int> a(panel.size());
                std::size_t ones = 0;
                for (std::size_t i = 0; i < panel.size(); ++i) {
                    a[i] = panel.day(i).a[t];
                    ones += static_cast<std::size_t>(a[i]);
                }
                if (ones == 0 || ones == panel.size()) {
                    throw MissingArmError("step t=" + std::to_string(t + 1) +
                                          " has a single arm; cannot estimate the assignment model");
                }
                const Moments m = sample_moments(x);
                model.behavior_marginal_.push_back(make_gaussian(m.mean, m.cov, regularized));
                model.assignment_.push_back(logistic_irls(x, a));
            }
            break;
    }
    model.regularized_ = regularized;
    return model;
}

}  // namespace ptab
