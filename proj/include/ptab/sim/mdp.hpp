#pragma once

#include "ptab/core/data.hpp"
#include "ptab/core/rng.hpp"
#include "ptab/drl/ratio.hpp"
#include "ptab/sim/iid_dgp.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ptab {

enum class MdpKind { linear, nonlinear };

/// How gen_mdp assigns actions.
enum class MdpAssignment { per_day, carry_over, all_control };

/**
 * @brief Coefficients of
 *   Y_t     = r_t(A_t, X_t) + e_t
 *   X_{t+1} = phi_t + Phi_t X_t + Gamma_t A_t + E_t
 * Reward coefficients have T entries, transition coefficients T - 1
 * (indexed by the 0-based step they leave).
 */
struct MdpCoefficients {
    std::vector<double> alpha;
    std::vector<Eigen::VectorXd> beta;
    std::vector<double> gamma;
    std::vector<Eigen::VectorXd> phi;
    std::vector<Eigen::MatrixXd> transition;
    std::vector<Eigen::VectorXd> action;

    [[nodiscard]] std::size_t horizon() const noexcept { return alpha.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return beta.empty() ? 0 : static_cast<std::size_t>(beta[0].size()); }
};

struct MdpDgpSpec {
    MdpKind kind = MdpKind::linear;
    std::size_t n = 300;
    std::size_t horizon = 24;
    std::size_t dim = 3;
    double delta = 0.0;
    std::uint64_t coef_seed = 1;
    MdpAssignment assignment = MdpAssignment::per_day;

    /// @throws std::invalid_argument for delta outside the catalog grid or zero sizes
    void validate() const;
    [[nodiscard]] std::string label() const;
};

/// The treatment strengths of the catalog.
[[nodiscard]] const std::vector<double>& mdp_delta_grid();

/**
 * @brief One coefficient draw from spec.coef_seed.
 *
 * Every uniform and normal is drawn regardless of delta and then scaled, so
 * two specs differing only in delta share the same underlying numbers.
 */
[[nodiscard]] MdpCoefficients draw_mdp_coefficients(const MdpDgpSpec& spec);

/// Mean reward r_t(a, x), t 0-based.
[[nodiscard]] double mdp_mean_reward(MdpKind kind, const MdpCoefficients& coef, std::size_t t, int a,
                                     std::span<const double> x);

/**
 * @brief n days from the model. X_1 ~ N(0, I), E_t ~ N(0, 1.5 I),
 * e_t = eta_t + eps_t with eps_t ~ N(0, 1.5) and eta an AR(1) with
 * coefficient 0.5 and stationary variance 1.5.
 *
 * Actions come from rng.child(0); day i uses rng.child(i + 1).
 */
[[nodiscard]] PanelDataset gen_mdp(const MdpDgpSpec& spec, const MdpCoefficients& coef, RngStream& rng);

/// Per-step ATE of the linear model in closed form.
[[nodiscard]] double true_ate_linear(const MdpCoefficients& coef);

/**
 * @brief Mean of (1/T) sum_t [r_t(1, X_t^1) - r_t(0, X_t^0)] over simulated
 * always-1 / always-0 days, using mean rewards.
 *
 * With common_random_numbers both rollouts of a day share the initial state
 * and state noise; otherwise each is drawn independently.
 */
[[nodiscard]] MonteCarloValue rollout_ate(MdpKind kind, const MdpCoefficients& coef, std::size_t days,
                                          RngStream& rng, bool common_random_numbers);

/**
 * @brief Ground-truth ATE of a spec's coefficient draw: closed form for the
 * linear model, 10^6-day common-random-number rollout (memoized) otherwise.
 */
[[nodiscard]] double mdp_true_ate(const MdpDgpSpec& spec, const MdpCoefficients& coef);

/// The model's dynamics as a LinearGaussianDynamics (oracle ratio backend).
[[nodiscard]] LinearGaussianDynamics mdp_dynamics(const MdpCoefficients& coef);

/// True V_t^a(x) of the linear model: expected remaining reward under always-a.
[[nodiscard]] double mdp_linear_value(const MdpCoefficients& coef, std::size_t t, int a, std::span<const double> x);

[[nodiscard]] std::string to_string(MdpKind kind);
[[nodiscard]] std::string to_string(MdpAssignment mode);
/// @throws std::invalid_argument for an unknown name
[[nodiscard]] MdpAssignment parse_mdp_assignment(const std::string& name);

[[nodiscard]] nlohmann::json to_json(const MdpCoefficients& coef);
/// @throws std::invalid_argument on missing fields or inconsistent shapes
[[nodiscard]] MdpCoefficients mdp_coefficients_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const MdpDgpSpec& spec);
[[nodiscard]] MdpDgpSpec mdp_spec_from_json(const nlohmann::json& j);

/// Eigen <-> nested JSON arrays (row-major).
[[nodiscard]] nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
[[nodiscard]] Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json vector_to_json(const Eigen::VectorXd& v);
[[nodiscard]] Eigen::VectorXd vector_from_json(const nlohmann::json& j);

}  // namespace ptab
