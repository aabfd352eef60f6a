#pragma once

#include "ptab/core/data.hpp"
#include "ptab/core/rng.hpp"
#include "ptab/sim/mdp.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstddef>
#include <vector>

namespace ptab {

/**
 * @brief Linear simulator fitted to a single-policy panel.
 *
 * coef holds the ridge fits (alpha, beta, phi, Phi) and the calibrated
 * treatment terms (gamma_t = g, Gamma_t = s u for every t, u the normalized
 * mean of beta). Residual banks are indexed by source day r.
 */
struct BootstrapEnv {
    MdpCoefficients coef;
    double lambda = 0.0;
    /// Grand mean outcome of the source panel.
    double y_bar = 0.0;
    /// n_src x T reward residuals.
    Eigen::MatrixXd reward_residuals;
    /// One (T - 1) x d block of state residuals per source day.
    std::vector<Eigen::MatrixXd> state_residuals;
    /// n_src x d initial states.
    Eigen::MatrixXd initial_states;

    [[nodiscard]] std::size_t horizon() const noexcept { return coef.horizon(); }
    [[nodiscard]] std::size_t dim() const noexcept { return coef.dim(); }
    [[nodiscard]] std::size_t source_days() const noexcept { return state_residuals.size(); }
    [[nodiscard]] const MdpCoefficients& coefficients() const noexcept { return coef; }
    /// (1/T) sum_t gamma_t.
    [[nodiscard]] double direct_effect() const;
    /// true_ate_linear(coef) - direct_effect().
    [[nodiscard]] double carryover_effect() const;
};

/**
 * @brief Fits per-step GCV ridge models and calibrates the treatment terms so
 * that the direct and carryover parts of the ATE each equal lambda * y_bar / 2.
 *
 * @throws DataError if any source action is nonzero
 * @throws std::invalid_argument if lambda < 0 or the panel has fewer than 2 days
 * @throws NumericError if lambda > 0 but the carryover channel is zero (T = 1
 *         or the fitted rewards ignore the state)
 */
[[nodiscard]] BootstrapEnv build_bootstrap_env(const PanelDataset& panel, double lambda);

/// One simulated day from source day r with multiplier xi and the given actions.
[[nodiscard]] Trajectory simulate_bootstrap_day(const BootstrapEnv& env, std::size_t r, double xi,
                                                const std::vector<int>& actions);

/**
 * @brief n simulated days. Actions are per-day switchback from rng.child(0);
 * day i draws its source day and multiplier from rng.child(i + 1).
 */
[[nodiscard]] PanelDataset sample_bootstrap(const BootstrapEnv& env, std::size_t n, RngStream& rng);

[[nodiscard]] nlohmann::json to_json(const BootstrapEnv& env);
/// @throws std::invalid_argument on missing fields or inconsistent shapes
[[nodiscard]] BootstrapEnv bootstrap_env_from_json(const nlohmann::json& j);

}  // namespace ptab
