#pragma once

#include "ptab/core/rng.hpp"

#include <cstddef>
#include <vector>

namespace ptab {

/// Fold index per unit, in 0..K-1.
struct FoldAssignment {
    std::vector<std::size_t> fold;
    std::size_t folds = 0;

    /// Units in fold k, ascending.
    [[nodiscard]] std::vector<std::size_t> members(std::size_t k) const;
    /// Units outside fold k, ascending.
    [[nodiscard]] std::vector<std::size_t> complement(std::size_t k) const;
};

/**
 * @brief Random partition of n units into K folds.
 *
 * Sizes differ by at most one; when K does not divide n the first (n mod K)
 * folds receive the extra unit.
 *
 * @throws std::invalid_argument unless 2 <= K <= n
 */
[[nodiscard]] FoldAssignment kfold_split(std::size_t n, std::size_t k, RngStream& rng);

/// Uniform random permutation of 0..n-1 (Fisher-Yates).
[[nodiscard]] std::vector<std::size_t> random_permutation(std::size_t n, RngStream& rng);

}  // namespace ptab
