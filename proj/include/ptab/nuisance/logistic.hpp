#pragma once

#include <Eigen/Dense>

#include <vector>

namespace ptab {

struct LogisticOptions {
    int max_iterations = 100;
    /// Convergence when the sup-norm of the penalized score falls below this.
    double gradient_tolerance = 1e-8;
    /// Ridge penalty on the slopes (never the intercept); keeps separable data finite.
    double l2 = 1e-6;
};

struct LogisticFit {
    double intercept = 0.0;
    Eigen::VectorXd coef;
    bool converged = false;
    int iterations = 0;
    /// Penalized log-likelihood after each accepted iterate, starting with the initial point.
    std::vector<double> objective;

    [[nodiscard]] double logit(const Eigen::VectorXd& g) const { return intercept + coef.dot(g); }
    [[nodiscard]] double probability(const Eigen::VectorXd& g) const;
    [[nodiscard]] Eigen::VectorXd probability(const Eigen::MatrixXd& g) const;
};

/**
 * @brief P(a = 1 | g) = expit(intercept + g coef) by Newton-Raphson (IRLS).
 *
 * Each Newton step is halved until the penalized log-likelihood does not
 * decrease, so objective is nondecreasing. Failure to reach the tolerance
 * within max_iterations is reported through `converged`, not an exception.
 *
 * @throws std::invalid_argument on shape mismatch or labels outside {0, 1}
 */
[[nodiscard]] LogisticFit logistic_irls(const Eigen::MatrixXd& g, const std::vector<int>& a,
                                        const LogisticOptions& options = {});

[[nodiscard]] double expit(double z) noexcept;

}  // namespace ptab
