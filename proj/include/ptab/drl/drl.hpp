#pragma once

#include "ptab/core/data.hpp"
#include "ptab/core/rng.hpp"
#include "ptab/drl/ratio.hpp"
#include "ptab/drl/value.hpp"
#include "ptab/nuisance/feature_map.hpp"
#include "ptab/pseudo/pseudo_outcomes.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ptab {

/**
 * @brief Doubly robust per-day pseudo-outcome for the per-step ATE.
 *
 *   (1/T)[V_1^1(x_1) - V_1^0(x_1)]
 *   + sum_k sum_a (-1)^{a+1}/T * w_k^a(x_k, a_k) [y_k + V_{k+1}^a(x_{k+1}) - V_k^a(x_k)]
 *
 * with V_{T+1} = 0. Only the arm a = a_k contributes at step k, since the
 * ratio carries the indicator 1(a_k = a); the other term is skipped rather
 * than multiplied by zero.
 *
 * `value(t, a, x)` and `ratio(t, a, x, a_obs)` take 0-based steps.
 */
template <class ValueFn, class RatioFn>
[[nodiscard]] double drl_pseudo(const Trajectory& traj, const ValueFn& value, const RatioFn& ratio) {
    const std::size_t horizon = traj.horizon();
    const auto cols = static_cast<std::size_t>(traj.x.cols());
    const double inv_t = 1.0 / static_cast<double>(horizon);
    std::vector<double> now(cols);
    std::vector<double> next(cols);
    auto load = [&](std::size_t t, std::vector<double>& row) {
        for (std::size_t j = 0; j < cols; ++j) row[j] = traj.x(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j));
    };

    load(0, now);
    double acc = inv_t * (value(std::size_t{0}, 1, std::span<const double>(now)) -
                          value(std::size_t{0}, 0, std::span<const double>(now)));
    for (std::size_t k = 0; k < horizon; ++k) {
        load(k, now);
        if (k + 1 < horizon) load(k + 1, next);
        const int a = traj.a[k];
        const double sign = a == 1 ? 1.0 : -1.0;
        const double w = ratio(k, a, std::span<const double>(now), a);
        const double v_next = k + 1 < horizon ? value(k + 1, a, std::span<const double>(next)) : 0.0;
        const double v_now = value(k, a, std::span<const double>(now));
        acc += (sign * inv_t * w) * (traj.y[static_cast<Eigen::Index>(k)] + v_next - v_now);
    }
    return acc;
}

[[nodiscard]] double drl_pseudo(const Trajectory& traj, const ValueModel& value, const RatioModel& ratio);

struct DynamicConfig {
    FeatureMap basis = FeatureMap::poly2();
    std::optional<double> ridge_lambda;
    BehaviorPolicy behavior = BehaviorPolicy::switchback();
    RatioBackend backend = RatioBackend::model_gaussian;
    RatioOptions ratio;
};

struct DynamicDiagnostics {
    /// Fraction of matched-arm ratio evaluations that hit omega_max.
    double omega_clip_rate = 0.0;
    std::size_t omega_clipped = 0;
    std::size_t omega_evaluations = 0;
    bool covariance_regularized = false;
};

/**
 * @brief Cross-fitted DRL pseudo-outcomes over days, in day order.
 *
 * For each fold the value and ratio models are fit on the other days and
 * evaluated on the fold. Fold fits run on up to `threads` workers.
 * @throws std::invalid_argument unless 2 <= K <= n; data errors carry the fold index
 */
[[nodiscard]] PseudoOutcomes build_pseudo_dynamic(const PanelDataset& panel, std::size_t folds,
                                                  const DynamicConfig& config, RngStream& rng,
                                                  std::size_t threads = 1,
                                                  DynamicDiagnostics* diagnostics = nullptr);

/// Same contract and implementation as z_test.
[[nodiscard]] double drl_z_test(const PseudoOutcomes& pseudo);

}  // namespace ptab
