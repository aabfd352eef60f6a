#pragma once

#include "ptab/core/data.hpp"
#include "ptab/nuisance/logistic.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ptab {

enum class RatioBackend { model_gaussian, oracle, plugin_uniform };

[[nodiscard]] std::string to_string(RatioBackend backend);
/// @throws std::invalid_argument for an unknown name
[[nodiscard]] RatioBackend parse_ratio_backend(const std::string& name);

/// How the logged data assigned treatments.
struct BehaviorPolicy {
    enum class Kind { switchback, known_probabilities, estimated_logistic };

    Kind kind = Kind::switchback;
    /// P(A_t = 1) for each step (known_probabilities only).
    std::vector<double> treat_probs;
    /// Bound applied to the estimated per-step assignment probabilities.
    double clip = 0.01;

    static BehaviorPolicy switchback() { return {}; }
    static BehaviorPolicy known(std::vector<double> treat_probs);
    static BehaviorPolicy estimated(double clip = 0.01);
    [[nodiscard]] std::string name() const;
};

/**
 * @brief X_{t+1} = phi_t + Phi_t X_t + Gamma_t A_t + E_t, E_t ~ N(0, Sigma_t),
 * X_1 ~ N(init_mean, init_cov). Transition vectors are indexed by the 0-based
 * step they leave, so they have T - 1 entries.
 */
struct LinearGaussianDynamics {
    Eigen::VectorXd init_mean;
    Eigen::MatrixXd init_cov;
    std::vector<Eigen::VectorXd> intercept;
    std::vector<Eigen::MatrixXd> transition;
    std::vector<Eigen::VectorXd> action;
    std::vector<Eigen::MatrixXd> noise_cov;

    [[nodiscard]] std::size_t horizon() const noexcept { return intercept.size() + 1; }
};

/// Least-squares fit of the per-step dynamics with residual covariances.
[[nodiscard]] LinearGaussianDynamics fit_linear_gaussian_dynamics(const PanelDataset& panel);

struct RatioOptions {
    double omega_max = 20.0;
    /// True dynamics, required by the oracle backend.
    std::optional<LinearGaussianDynamics> oracle;
};

/**
 * @brief Marginalized importance ratios omega_t^a(x, a') for both arms.
 *
 * omega is zero whenever a' != a and is clipped to [0, omega_max].
 * The Gaussian backends compare the state law at step t under "always a"
 * with the behavior law:
 *   switchback          equal mixture of the two alternating sequences, so
 *                       p_b(x, a') = N(x; m_t^c, S_t) / 2 with c the sequence
 *                       playing a' at t;
 *   known probabilities moment-matched Gaussian propagated with E A_t = p_t,
 *                       times P(A_t = a');
 *   estimated logistic  empirical Gaussian of X_t times a per-step logistic
 *                       fit of A_t on X_t.
 * plugin_uniform ignores the state: omega = 1(a' = a) / P_hat(A_t = a').
 */
class RatioModel {
public:
    [[nodiscard]] double ratio(std::size_t t, int a, std::span<const double> x, int a_obs) const;
    /// Unclipped value (may exceed omega_max, never negative).
    [[nodiscard]] double raw_ratio(std::size_t t, int a, std::span<const double> x, int a_obs) const;

    [[nodiscard]] RatioBackend backend() const noexcept { return backend_; }
    [[nodiscard]] const BehaviorPolicy& behavior() const noexcept { return behavior_; }
    [[nodiscard]] double omega_max() const noexcept { return omega_max_; }
    [[nodiscard]] std::size_t horizon() const noexcept { return horizon_; }
    /// Some covariance needed the +1e-8 I ridge to factorize.
    [[nodiscard]] bool regularized() const noexcept { return regularized_; }

    struct Gaussian {
        Eigen::VectorXd mean;
        Eigen::MatrixXd chol;  // lower factor of the covariance
        double log_norm = 0.0;

        [[nodiscard]] double log_pdf(std::span<const double> x) const;
    };

    friend RatioModel fit_mis_ratio(const PanelDataset& panel, const BehaviorPolicy& behavior, RatioBackend backend,
                                    const RatioOptions& options);

private:
    RatioBackend backend_ = RatioBackend::model_gaussian;
    BehaviorPolicy behavior_;
    double omega_max_ = 20.0;
    std::size_t horizon_ = 0;
    bool regularized_ = false;

    std::array<std::vector<Gaussian>, 2> target_;
    // switchback: behavior_seq_[c][t] is the law of X_t on days whose first action is c.
    std::array<std::vector<Gaussian>, 2> behavior_seq_;
    std::vector<Gaussian> behavior_marginal_;
    std::vector<LogisticFit> assignment_;
    std::vector<double> treat_freq_;
};

/**
 * @throws std::invalid_argument for inconsistent behavior specs (wrong length,
 * oracle without dynamics); MissingArmError when a per-step logistic fit has
 * only one arm.
 */
[[nodiscard]] RatioModel fit_mis_ratio(const PanelDataset& panel, const BehaviorPolicy& behavior,
                                       RatioBackend backend, const RatioOptions& options = {});

}  // namespace ptab
