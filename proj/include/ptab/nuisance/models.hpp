#pragma once

#include "ptab/core/data.hpp"
#include "ptab/core/rng.hpp"
#include "ptab/nuisance/feature_map.hpp"
#include "ptab/nuisance/logistic.hpp"
#include "ptab/nuisance/ridge.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>

namespace ptab {

/// Learner choices for the i.i.d. nuisance functions.
struct LearnerConfig {
    FeatureMap outcome_map = FeatureMap::poly2();
    FeatureMap propensity_map = FeatureMap::poly2();
    /// Fixed ridge penalty; GCV over the default grid when empty.
    std::optional<double> ridge_lambda;
    double clip = 0.01;
    /// Known P(A = 1); bypasses the propensity fit.
    std::optional<double> known_propensity;
    LogisticOptions logistic;
};

/// Outcome regression m(a, x) = E(Y | A = a, X = x), one ridge fit per arm.
class OutcomeModel {
public:
    /// @throws MissingArmError if an arm has no records
    static OutcomeModel fit(const IidDataset& data, const FeatureMap& map, std::optional<double> lambda);

    [[nodiscard]] double predict(int a, std::span<const double> x) const;
    [[nodiscard]] Eigen::VectorXd predict(int a, const Eigen::MatrixXd& x) const;
    [[nodiscard]] const RidgeFit& arm(int a) const { return arms_.at(static_cast<std::size_t>(a)); }
    [[nodiscard]] const FeatureMap& map() const noexcept { return map_; }

private:
    OutcomeModel(FeatureMap map, std::array<RidgeFit, 2> arms) : map_(std::move(map)), arms_(std::move(arms)) {}

    FeatureMap map_;
    std::array<RidgeFit, 2> arms_;
};

/// Propensity b(a, x) = P(A = a | X = x), clipped to [clip, 1 - clip].
class PropensityModel {
public:
    /// @throws MissingArmError if an arm has no records; std::invalid_argument if clip is outside (0, 0.5)
    static PropensityModel fit(const IidDataset& data, const FeatureMap& map, double clip,
                               const LogisticOptions& options = {});
    /// Constant P(A = 1) = p1, as in a completely randomized experiment.
    static PropensityModel known(double p1, double clip = 0.01);

    [[nodiscard]] double predict(int a, std::span<const double> x) const;
    /// b(1, x) for each row of x.
    [[nodiscard]] Eigen::VectorXd predict_treated(const Eigen::MatrixXd& x) const;
    [[nodiscard]] double clip() const noexcept { return clip_; }
    [[nodiscard]] bool is_known() const noexcept { return !fit_.has_value(); }
    [[nodiscard]] bool converged() const noexcept { return !fit_ || fit_->converged; }
    [[nodiscard]] const std::optional<LogisticFit>& logistic() const noexcept { return fit_; }

private:
    PropensityModel(FeatureMap map, std::optional<LogisticFit> fit, double known_p1, double clip)
        : map_(std::move(map)), fit_(std::move(fit)), known_p1_(known_p1), clip_(clip) {}

    [[nodiscard]] double raw_treated(std::span<const double> x) const;

    FeatureMap map_;
    std::optional<LogisticFit> fit_;
    double known_p1_ = 0.5;
    double clip_ = 0.01;
};

/// Out-of-fold nuisance predictions, one entry per record in dataset order.
struct NuisancePredictions {
    Eigen::VectorXd m0;
    Eigen::VectorXd m1;
    Eigen::VectorXd b1;
    /// Records whose propensity prediction hit a clip bound.
    std::size_t clip_activations = 0;
    /// Every fold's propensity fit converged (always true for a known propensity).
    bool propensity_converged = true;
    /// Any fold's GCV search fell back to the smallest penalty.
    bool gcv_fallback = false;
};

/**
 * @brief K-fold cross-fitting: fold k is predicted by models fit on the other folds.
 * @throws std::invalid_argument unless 2 <= K <= n; MissingArmError naming the fold
 */
[[nodiscard]] NuisancePredictions crossfit_predict(const IidDataset& data, std::size_t folds,
                                                   const LearnerConfig& config, RngStream& rng,
                                                   std::size_t threads = 1);

}  // namespace ptab
