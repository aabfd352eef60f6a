#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace ptab {

/// y ~ intercept + G coef; the intercept is never penalized.
struct RidgeFit {
    double intercept = 0.0;
    Eigen::VectorXd coef;
    double lambda = 0.0;
    /// GCV criterion at the chosen lambda (NaN when lambda was fixed).
    double gcv = 0.0;
    /// No grid point had a finite criterion; the smallest penalty was used.
    bool gcv_fallback = false;

    [[nodiscard]] double predict(const Eigen::VectorXd& g) const { return intercept + coef.dot(g); }
    [[nodiscard]] Eigen::VectorXd predict(const Eigen::MatrixXd& g) const;
};

/// Ten log-spaced penalties from 1e-4 to 1e2.
[[nodiscard]] std::vector<double> default_lambda_grid();

/**
 * @brief Ridge fit with fixed penalty, via the SVD of the centered design.
 *
 * lambda = 0 gives the minimum-norm least-squares solution, so rank-deficient
 * designs are fine.
 * @throws std::invalid_argument on shape mismatch, empty sample or lambda < 0
 */
[[nodiscard]] RidgeFit ridge_fit(const Eigen::MatrixXd& g, const Eigen::VectorXd& y, double lambda);

/**
 * @brief Ridge fit with the penalty minimizing GCV(lambda) = n RSS / (n - df)^2,
 * df = 1 + sum d_j^2 / (d_j^2 + lambda).
 *
 * If no grid point has a finite criterion (n <= df everywhere) the smallest
 * grid penalty is used and gcv_fallback is set.
 */
[[nodiscard]] RidgeFit ridge_fit_gcv(const Eigen::MatrixXd& g, const Eigen::VectorXd& y,
                                     std::span<const double> grid);
[[nodiscard]] RidgeFit ridge_fit_gcv(const Eigen::MatrixXd& g, const Eigen::VectorXd& y);

/// Fixed penalty when given, GCV over the default grid otherwise.
[[nodiscard]] RidgeFit ridge(const Eigen::MatrixXd& g, const Eigen::VectorXd& y, std::optional<double> lambda);

}  // namespace ptab
