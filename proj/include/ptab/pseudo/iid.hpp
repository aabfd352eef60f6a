#pragma once

#include "ptab/core/data.hpp"
#include "ptab/core/rng.hpp"
#include "ptab/nuisance/models.hpp"
#include "ptab/pseudo/pseudo_outcomes.hpp"

#include <cstddef>

namespace ptab {

/// [1(a=1)/b1 - 1(a=0)/(1-b1)] y
[[nodiscard]] double ipw_value(int a, double y, double b1) noexcept;

/// m1 - m0 + 1(a=1)/b1 (y - m1) - 1(a=0)/(1-b1) (y - m0)
[[nodiscard]] double aipw_value(int a, double y, double m0, double m1, double b1) noexcept;

[[nodiscard]] double ipw_pseudo(const IidRecord& record, const PropensityModel& b);
[[nodiscard]] double aipw_pseudo(const IidRecord& record, const OutcomeModel& m, const PropensityModel& b);

/// AIPW pseudo-outcomes from already computed nuisance predictions, in record order.
[[nodiscard]] PseudoOutcomes pseudo_from_predictions(const IidDataset& data, const NuisancePredictions& nuisance);

/// AIPW pseudo-outcomes from externally fitted models (no cross-fitting).
[[nodiscard]] PseudoOutcomes build_pseudo_from_models(const IidDataset& data, const OutcomeModel& m,
                                                      const PropensityModel& b);

/**
 * @brief Cross-fitted AIPW pseudo-outcomes in record order.
 *
 * A zero sample SD is not an error here; it is reported by degenerate() and
 * rejected downstream by the walk. Nuisance diagnostics go to `diagnostics`
 * when it is non-null.
 */
[[nodiscard]] PseudoOutcomes build_pseudo(const IidDataset& data, std::size_t folds, const LearnerConfig& config,
                                          RngStream& rng, std::size_t threads = 1,
                                          NuisancePredictions* diagnostics = nullptr);

}  // namespace ptab
