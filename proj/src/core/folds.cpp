#include "ptab/core/folds.hpp"

#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace ptab {

std::vector<std::size_t> FoldAssignment::members(std::size_t k) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold.size(); ++i) {
        if (fold[i] == k) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> FoldAssignment::complement(std::size_t k) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold.size(); ++i) {
        if (fold[i] != k) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> random_permutation(std::size_t n, RngStream& rng) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

FoldAssignment kfold_split(std::size_t n, std::size_t k, RngStream& rng) {
    if (k < 2 || k > n) {
        throw std::invalid_argument("K must be >= 2 and <= n (K=" + std::to_string(k) +
                                    ", n=" + std::to_string(n) + ")");
    }
    const auto order = random_permutation(n, rng);
    FoldAssignment out;
    out.folds = k;
    out.fold.assign(n, 0);
    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        for (std::size_t j = 0; j < size; ++j) out.fold[order[pos++]] = f;
    }
    return out;
}

}  // namespace ptab
