#pragma once

#include "ptab/core/rng.hpp"
#include "ptab/pseudo/pseudo_outcomes.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ptab {

/// Full path of the two-armed-bandit walk. sums[0] = 0, sums[t] = T_t.
struct WalkTrace {
    std::vector<double> sums;
    std::vector<int> theta;
    std::vector<double> rewards;

    [[nodiscard]] double t_n() const noexcept { return sums.back(); }
};

struct TabStatistic {
    double t_n = 0.0;
    double p_value = 1.0;
    int theta1 = 0;
};

enum class CombinerKind { cauchy, quantile };

struct Combiner {
    CombinerKind kind = CombinerKind::cauchy;
    double gamma = 0.5;

    static Combiner cauchy() noexcept { return {CombinerKind::cauchy, 0.5}; }
    static Combiner quantile(double gamma) noexcept { return {CombinerKind::quantile, gamma}; }
    [[nodiscard]] std::string name() const;
};

struct CombinedTest {
    Combiner method;
    std::vector<double> per_perm_p;
    std::vector<double> per_perm_t;
    std::vector<int> per_perm_theta1;
    double combined_p = 1.0;
    std::size_t permutations = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

/**
 * @brief r_i = mu_hat_i / (sqrt(n) sigma_hat), in input order.
 * @throws DegenerateSampleError if sigma_hat is zero
 */
[[nodiscard]] std::vector<double> standardize_rewards(const PseudoOutcomes& pseudo);

/**
 * @brief Walk that plays arm 0 (adds r_t) while the running sum is positive and
 * arm 1 (subtracts r_t) otherwise; theta1 picks the first arm.
 * @throws std::invalid_argument on empty input or theta1 outside {0, 1}
 */
[[nodiscard]] WalkTrace tab_walk(std::span<const double> rewards, int theta1);

/// Final value T_n of tab_walk without storing the path. Rewards must be non-empty.
[[nodiscard]] double tab_walk_end(std::span<const double> rewards, int theta1) noexcept;

/// Two-sided p-value 2 Phi(-|t|).
[[nodiscard]] double tab_p_value(double t_n) noexcept;

/// Walk over the standardized pseudo-outcomes in their stored order; theta1 ~ Bernoulli(1/2).
[[nodiscard]] TabStatistic tab_test(const PseudoOutcomes& pseudo, RngStream& rng);
/// Same with a fixed first arm.
[[nodiscard]] TabStatistic tab_test(const PseudoOutcomes& pseudo, int theta1);

/// Uniform random permutation of 0..n-1.
[[nodiscard]] std::vector<std::size_t> permute(std::size_t n, RngStream& rng);

/// @throws std::invalid_argument on an empty list
[[nodiscard]] double cauchy_combine(std::span<const double> ps);
/// @throws std::invalid_argument on an empty list or gamma outside (0, 1)
[[nodiscard]] double quantile_combine(std::span<const double> ps, double gamma);
[[nodiscard]] double combine(std::span<const double> ps, const Combiner& combiner);

/**
 * @brief Permuted TAB test.
 *
 * Replicate b uses child stream b of `rng`: its own child 0 draws the
 * permutation and child 1 draws theta1. Replicates may run on `threads`
 * workers; the result does not depend on the thread count.
 */
[[nodiscard]] CombinedTest p_tab(const PseudoOutcomes& pseudo, std::size_t permutations,
                                 const Combiner& combiner, const RngStream& rng, std::size_t threads = 1);

/// One-sided z-test of H1: mu > 0, p = 1 - Phi(sqrt(n) mu_bar / sigma_hat).
/// @throws DegenerateSampleError if sigma_hat is zero
[[nodiscard]] double z_test(const PseudoOutcomes& pseudo);

}  // namespace ptab
