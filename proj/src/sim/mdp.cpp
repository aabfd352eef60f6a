#include "ptab/sim/mdp.hpp"

#include "ptab/sim/switchback.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace ptab {

namespace {

constexpr double kNoiseVar = 1.5;
constexpr double kArRho = 0.5;
constexpr std::size_t kTruthDays = 1'000'000;
constexpr std::uint64_t kTruthSeed = 0x5EED7A7EULL;

double signed_uniform(RngStream& rng, double lo, double hi) {
    const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
    return sign * rng.uniform(lo, hi);
}

Eigen::VectorXd next_state(const MdpCoefficients& coef, std::size_t t, const Eigen::VectorXd& x, int a) {
    return coef.phi[t] + coef.transition[t] * x + coef.action[t] * static_cast<double>(a);
}

void check_shapes(const MdpCoefficients& coef) {
    const std::size_t horizon = coef.horizon();
    const std::size_t d = coef.dim();
    if (horizon == 0 || d == 0) throw std::invalid_argument("empty coefficients");
    if (coef.beta.size() != horizon || coef.gamma.size() != horizon) {
        throw std::invalid_argument("reward coefficients need T entries");
    }
    const std::size_t steps = horizon - 1;
    if (coef.phi.size() != steps || coef.transition.size() != steps || coef.action.size() != steps) {
        throw std::invalid_argument("transition coefficients need T - 1 entries");
    }
    const auto di = static_cast<Eigen::Index>(d);
    for (const auto& b : coef.beta) {
        if (b.size() != di) throw std::invalid_argument("beta dimension mismatch");
    }
    for (std::size_t t = 0; t < steps; ++t) {
        if (coef.phi[t].size() != di || coef.action[t].size() != di || coef.transition[t].rows() != di ||
            coef.transition[t].cols() != di) {
            throw std::invalid_argument("transition dimension mismatch");
        }
    }
}

}  // namespace

const std::vector<double>& mdp_delta_grid() {
    static const std::vector<double> grid = {0.0, 0.015, 0.055, 0.1, 0.15, 0.25};
    return grid;
}

void MdpDgpSpec::validate() const {
    if (n < 2) throw std::invalid_argument("n must be >= 2");
    if (horizon == 0) throw std::invalid_argument("T must be >= 1");
    if (dim == 0) throw std::invalid_argument("dimension must be >= 1");
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be finite and >= 0");
}

std::string MdpDgpSpec::label() const {
    std::ostringstream os;
    os << (kind == MdpKind::linear ? "linear-mdp" : "nonlinear-mdp") << "/delta=" << delta << "/T=" << horizon;
    return os.str();
}

MdpCoefficients draw_mdp_coefficients(const MdpDgpSpec& spec) {
    spec.validate();
    const auto d = static_cast<Eigen::Index>(spec.dim);
    const double bound = spec.kind == MdpKind::linear ? 0.3 : 0.6;
    const double delta = spec.delta;
    RngStream rng(spec.coef_seed, 0x636F6566ULL);
    MdpCoefficients c;
    for (std::size_t t = 0; t < spec.horizon; ++t) {
        c.alpha.push_back(signed_uniform(rng, 0.5, 1.0));
        Eigen::VectorXd beta(d);
        for (Eigen::Index j = 0; j < d; ++j) beta[j] = signed_uniform(rng, 0.1, 0.3);
        c.beta.push_back(std::move(beta));
        const double u = rng.uniform();
        c.gamma.push_back(delta == 0.0 ? 0.0 : 0.1 * delta + u * (0.1 + 0.7 * delta));
    }
    for (std::size_t t = 0; t + 1 < spec.horizon; ++t) {
        Eigen::VectorXd phi(d);
        for (Eigen::Index j = 0; j < d; ++j) phi[j] = signed_uniform(rng, 0.5, 1.0);
        Eigen::MatrixXd trans(d, d);
        for (Eigen::Index r = 0; r < d; ++r) {
            for (Eigen::Index s = 0; s < d; ++s) trans(r, s) = rng.uniform(-bound, bound);
        }
        Eigen::VectorXd action(d);
        for (Eigen::Index j = 0; j < d; ++j) action[j] = std::sqrt(0.5 * delta) * rng.normal();
        c.phi.push_back(std::move(phi));
        c.transition.push_back(std::move(trans));
        c.action.push_back(std::move(action));
    }
    return c;
}

double mdp_mean_reward(MdpKind kind, const MdpCoefficients& coef, std::size_t t, int a, std::span<const double> x) {
    const Eigen::VectorXd& beta = coef.beta[t];
    double bx = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) bx += beta[j] * x[static_cast<std::size_t>(j)];
    const double g = coef.gamma[t];
    if (kind == MdpKind::linear) return coef.alpha[t] + bx + g * a;
    double trig = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        const double xj = x[static_cast<std::size_t>(j)];
        const double s = std::sin(xj) + std::cos(xj);
        trig += beta[j] * s * s;
    }
    const double ag = a * g;
    const double last = ag + std::cos(ag);
    return coef.alpha[t] + 2.0 * trig + 3.0 * bx * ag + last * last;
}

PanelDataset gen_mdp(const MdpDgpSpec& spec, const MdpCoefficients& coef, RngStream& rng) {
    spec.validate();
    check_shapes(coef);
    if (coef.horizon() != spec.horizon || coef.dim() != spec.dim) {
        throw std::invalid_argument("coefficients do not match the spec's T and d");
    }
    const std::size_t horizon = spec.horizon;
    const auto d = static_cast<Eigen::Index>(spec.dim);
    std::vector<std::vector<int>> actions;
    if (spec.assignment == MdpAssignment::all_control) {
        actions.assign(spec.n, std::vector<int>(horizon, 0));
    } else {
        RngStream assign_rng = rng.child(0);
        const SwitchbackMode mode =
            spec.assignment == MdpAssignment::per_day ? SwitchbackMode::per_day : SwitchbackMode::carry_over;
        actions = switchback_assign(spec.n, horizon, assign_rng, mode);
    }

    const double sd = std::sqrt(kNoiseVar);
    const double innovation_sd = std::sqrt(kNoiseVar * (1.0 - kArRho * kArRho));
    std::vector<Trajectory> days(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        RngStream day_rng = rng.child(i + 1);
        Trajectory& day = days[i];
        day.x.resize(static_cast<Eigen::Index>(horizon), d);
        day.y.resize(static_cast<Eigen::Index>(horizon));
        day.a = actions[i];
        Eigen::VectorXd x(d);
        for (Eigen::Index j = 0; j < d; ++j) x[j] = day_rng.normal();
        double eta = 0.0;
        for (std::size_t t = 0; t < horizon; ++t) {
            const auto ti = static_cast<Eigen::Index>(t);
            day.x.row(ti) = x.transpose();
            eta = t == 0 ? sd * day_rng.normal() : kArRho * eta + innovation_sd * day_rng.normal();
            const double eps = sd * day_rng.normal();
            day.y[ti] = mdp_mean_reward(spec.kind, coef, t, day.a[t], std::span<const double>(x.data(), x.size())) +
                        eta + eps;
            if (t + 1 < horizon) {
                Eigen::VectorXd noise(d);
                for (Eigen::Index j = 0; j < d; ++j) noise[j] = sd * day_rng.normal();
                x = next_state(coef, t, x, day.a[t]) + noise;
            }
        }
    }
    return PanelDataset(std::move(days));
}

double true_ate_linear(const MdpCoefficients& coef) {
    check_shapes(coef);
    const std::size_t horizon = coef.horizon();
    double direct = 0.0;
    for (double g : coef.gamma) direct += g;
    // c_t = sum_{k<t} Phi_{t-1} ... Phi_{k+1} Gamma_k, the state gap between always-1 and always-0.
    Eigen::VectorXd carry = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(coef.dim()));
    double indirect = 0.0;
    for (std::size_t t = 1; t < horizon; ++t) {
        carry = coef.transition[t - 1] * carry + coef.action[t - 1];
        indirect += coef.beta[t].dot(carry);
    }
    return (direct + indirect) / static_cast<double>(horizon);
}

MonteCarloValue rollout_ate(MdpKind kind, const MdpCoefficients& coef, std::size_t days, RngStream& rng,
                            bool common_random_numbers) {
    check_shapes(coef);
    if (days < 2) throw std::invalid_argument("rollout needs at least 2 days");
    const std::size_t horizon = coef.horizon();
    const auto d = static_cast<Eigen::Index>(coef.dim());
    const double sd = std::sqrt(kNoiseVar);
    const double inv_t = 1.0 / static_cast<double>(horizon);
    double sum = 0.0;
    double sum_sq = 0.0;
    Eigen::VectorXd x1(d);
    Eigen::VectorXd x0(d);
    Eigen::VectorXd z(d);
    for (std::size_t i = 0; i < days; ++i) {
        RngStream r1 = rng.child(2 * i);
        RngStream r0 = common_random_numbers ? rng.child(2 * i) : rng.child(2 * i + 1);
        for (Eigen::Index j = 0; j < d; ++j) x1[j] = r1.normal();
        for (Eigen::Index j = 0; j < d; ++j) x0[j] = r0.normal();
        double diff = 0.0;
        for (std::size_t t = 0; t < horizon; ++t) {
            diff += mdp_mean_reward(kind, coef, t, 1, std::span<const double>(x1.data(), x1.size())) -
                    mdp_mean_reward(kind, coef, t, 0, std::span<const double>(x0.data(), x0.size()));
            if (t + 1 < horizon) {
                for (Eigen::Index j = 0; j < d; ++j) z[j] = sd * r1.normal();
                x1 = next_state(coef, t, x1, 1) + z;
                for (Eigen::Index j = 0; j < d; ++j) z[j] = sd * r0.normal();
                x0 = next_state(coef, t, x0, 0) + z;
            }
        }
        diff *= inv_t;
        sum += diff;
        sum_sq += diff * diff;
    }
    const auto m = static_cast<double>(days);
    MonteCarloValue out;
    out.value = sum / m;
    const double var = std::max(0.0, (sum_sq - m * out.value * out.value) / (m - 1.0));
    out.se = std::sqrt(var / m);
    return out;
}

double mdp_true_ate(const MdpDgpSpec& spec, const MdpCoefficients& coef) {
    if (spec.kind == MdpKind::linear) return true_ate_linear(coef);
    static std::mutex mutex;
    static std::map<std::tuple<std::uint64_t, double, std::size_t, std::size_t>, double> cache;
    const auto key = std::make_tuple(spec.coef_seed, spec.delta, spec.horizon, spec.dim);
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    RngStream rng(kTruthSeed);
    const double value = rollout_ate(spec.kind, coef, kTruthDays, rng, true).value;
    std::lock_guard lock(mutex);
    cache.emplace(key, value);
    return value;
}

LinearGaussianDynamics mdp_dynamics(const MdpCoefficients& coef) {
    check_shapes(coef);
    const auto d = static_cast<Eigen::Index>(coef.dim());
    LinearGaussianDynamics dyn;
    dyn.init_mean = Eigen::VectorXd::Zero(d);
    dyn.init_cov = Eigen::MatrixXd::Identity(d, d);
    dyn.intercept = coef.phi;
    dyn.transition = coef.transition;
    dyn.action = coef.action;
    dyn.noise_cov.assign(coef.phi.size(), kNoiseVar * Eigen::MatrixXd::Identity(d, d));
    return dyn;
}

double mdp_linear_value(const MdpCoefficients& coef, std::size_t t, int a, std::span<const double> x) {
    const std::size_t horizon = coef.horizon();
    if (t >= horizon) return 0.0;
    Eigen::VectorXd m = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    double v = 0.0;
    for (std::size_t s = t; s < horizon; ++s) {
        v += coef.alpha[s] + coef.beta[s].dot(m) + coef.gamma[s] * a;
        if (s + 1 < horizon) m = next_state(coef, s, m, a);
    }
    return v;
}

std::string to_string(MdpKind kind) { return kind == MdpKind::linear ? "linear" : "nonlinear"; }

std::string to_string(MdpAssignment mode) {
    switch (mode) {
        case MdpAssignment::per_day: return "per_day";
        case MdpAssignment::carry_over: return "carry_over";
        default: return "all_control";
    }
}

MdpAssignment parse_mdp_assignment(const std::string& name) {
    if (name == "per_day") return MdpAssignment::per_day;
    if (name == "carry_over") return MdpAssignment::carry_over;
    if (name == "all_control") return MdpAssignment::all_control;
    throw std::invalid_argument("unknown assignment '" + name + "'");
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw std::invalid_argument("matrix must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw std::invalid_argument("ragged matrix");
        }
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

nlohmann::json to_json(const MdpCoefficients& coef) {
    nlohmann::json j;
    j["alpha"] = coef.alpha;
    j["gamma"] = coef.gamma;
    auto vectors = [](const std::vector<Eigen::VectorXd>& vs) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& v : vs) out.push_back(vector_to_json(v));
        return out;
    };
    j["beta"] = vectors(coef.beta);
    j["phi"] = vectors(coef.phi);
    j["Gamma"] = vectors(coef.action);
    nlohmann::json mats = nlohmann::json::array();
    for (const auto& m : coef.transition) mats.push_back(matrix_to_json(m));
    j["Phi"] = std::move(mats);
    return j;
}

MdpCoefficients mdp_coefficients_from_json(const nlohmann::json& j) {
    MdpCoefficients c;
    try {
        c.alpha = j.at("alpha").get<std::vector<double>>();
        c.gamma = j.at("gamma").get<std::vector<double>>();
        for (const auto& v : j.at("beta")) c.beta.push_back(vector_from_json(v));
        for (const auto& v : j.at("phi")) c.phi.push_back(vector_from_json(v));
        for (const auto& v : j.at("Gamma")) c.action.push_back(vector_from_json(v));
        for (const auto& m : j.at("Phi")) c.transition.push_back(matrix_from_json(m));
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad coefficients: ") + e.what());
    }
    check_shapes(c);
    return c;
}

nlohmann::json to_json(const MdpDgpSpec& spec) {
    return {{"kind", to_string(spec.kind)},  {"n", spec.n},         {"T", spec.horizon},
            {"dim", spec.dim},               {"delta", spec.delta}, {"coef_seed", spec.coef_seed},
            {"assignment", to_string(spec.assignment)}};
}

MdpDgpSpec mdp_spec_from_json(const nlohmann::json& j) {
    MdpDgpSpec spec;
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "linear") {
            spec.kind = MdpKind::linear;
        } else if (kind == "nonlinear") {
            spec.kind = MdpKind::nonlinear;
        } else {
            throw std::invalid_argument("unknown MDP kind '" + kind + "'");
        }
        spec.n = j.at("n").get<std::size_t>();
        spec.horizon = j.at("T").get<std::size_t>();
        spec.dim = j.at("dim").get<std::size_t>();
        spec.delta = j.at("delta").get<double>();
        spec.coef_seed = j.at("coef_seed").get<std::uint64_t>();
        spec.assignment = parse_mdp_assignment(j.value("assignment", std::string("per_day")));
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad MDP spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

}  // namespace ptab
