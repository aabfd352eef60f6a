#pragma once

#include "ptab/core/data.hpp"
#include "ptab/nuisance/feature_map.hpp"
#include "ptab/nuisance/ridge.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ptab {

/**
 * @brief Per-step ridge fits V_t^a(x) = theta_{t,a}' phi(x) for t = 1..T.
 *
 * Steps are 0-based in the API; step T (one past the last) is the terminal
 * convention V_{T+1} = 0.
 */
class ValueModel {
public:
    ValueModel(FeatureMap basis, std::array<std::vector<RidgeFit>, 2> fits);

    [[nodiscard]] double predict(std::size_t t, int a, std::span<const double> x) const;
    [[nodiscard]] std::size_t horizon() const noexcept { return fits_[0].size(); }
    [[nodiscard]] const FeatureMap& basis() const noexcept { return basis_; }
    [[nodiscard]] const std::vector<RidgeFit>& arm(int a) const { return fits_.at(static_cast<std::size_t>(a)); }

private:
    FeatureMap basis_;
    std::array<std::vector<RidgeFit>, 2> fits_;
};

/**
 * @brief Backward recursion for arm a: at t = T..1 regress Y_t + V_{t+1}(X_{t+1})
 * on phi(X_t) over the days with A_t = a.
 *
 * @throws MissingArmError naming the step when no day has A_t = a
 */
[[nodiscard]] std::vector<RidgeFit> fit_value_backward(const PanelDataset& panel, int a, const FeatureMap& basis,
                                                       std::optional<double> lambda);

/// Both arms.
[[nodiscard]] ValueModel fit_value_model(const PanelDataset& panel, const FeatureMap& basis,
                                         std::optional<double> lambda);

}  // namespace ptab
