#include "ptab/nuisance/logistic.hpp"

#include <cmath>
#include <stdexcept>

namespace ptab {

namespace {

// log(1 + e^z) without overflow.
double log1pexp(double z) noexcept { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

struct Problem {
    Eigen::MatrixXd z;  // [1, G]
    Eigen::VectorXd a;
    double l2;

    [[nodiscard]] double objective(const Eigen::VectorXd& beta) const {
        const Eigen::VectorXd eta = z * beta;
        double ll = 0.0;
        for (Eigen::Index i = 0; i < eta.size(); ++i) ll += a[i] * eta[i] - log1pexp(eta[i]);
        return ll - 0.5 * l2 * beta.tail(beta.size() - 1).squaredNorm();
    }
};

}  // namespace

double expit(double z) noexcept {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double LogisticFit::probability(const Eigen::VectorXd& g) const { return expit(logit(g)); }

Eigen::VectorXd LogisticFit::probability(const Eigen::MatrixXd& g) const {
    Eigen::VectorXd p(g.rows());
    for (Eigen::Index i = 0; i < g.rows(); ++i) p[i] = expit(intercept + g.row(i).dot(coef));
    return p;
}

LogisticFit logistic_irls(const Eigen::MatrixXd& g, const std::vector<int>& a, const LogisticOptions& options) {
    const Eigen::Index n = g.rows();
    const Eigen::Index p = g.cols() + 1;
    if (static_cast<std::size_t>(n) != a.size()) throw std::invalid_argument("logistic: design and labels differ in length");
    if (n == 0) throw std::invalid_argument("logistic: empty sample");

    Problem prob{Eigen::MatrixXd(n, p), Eigen::VectorXd(n), options.l2};
    prob.z.col(0).setOnes();
    prob.z.rightCols(p - 1) = g;
    double ones = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const int ai = a[static_cast<std::size_t>(i)];
        if (ai != 0 && ai != 1) throw std::invalid_argument("logistic: labels must be 0 or 1");
        prob.a[i] = ai;
        ones += ai;
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    const double rate = ones / static_cast<double>(n);
    if (rate > 0.0 && rate < 1.0) beta[0] = std::log(rate / (1.0 - rate));

    Eigen::MatrixXd penalty = Eigen::MatrixXd::Zero(p, p);
    penalty.diagonal().tail(p - 1).setConstant(options.l2);

    LogisticFit fit;
    double current = prob.objective(beta);
    fit.objective.push_back(current);

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        const Eigen::VectorXd eta = prob.z * beta;
        Eigen::VectorXd mu(n);
        Eigen::VectorXd w(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            mu[i] = expit(eta[i]);
            w[i] = mu[i] * (1.0 - mu[i]);
        }
        const Eigen::VectorXd grad = prob.z.transpose() * (prob.a - mu) - penalty * beta;
        if (grad.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) {
            fit.converged = true;
            break;
        }
        const Eigen::MatrixXd hess = prob.z.transpose() * w.asDiagonal() * prob.z + penalty;
        const Eigen::VectorXd step = hess.ldlt().solve(grad);
        if (!step.allFinite()) break;

        double scale = 1.0;
        bool accepted = false;
        for (int h = 0; h < 60; ++h, scale *= 0.5) {
            const Eigen::VectorXd trial = beta + scale * step;
            const double value = prob.objective(trial);
            // Near the optimum the objective is flat to rounding; tolerate that much.
            if (std::isfinite(value) && value >= current - 1e-13 * (1.0 + std::abs(current))) {
                beta = trial;
                current = value;
                accepted = true;
                break;
            }
        }
        fit.iterations = iter + 1;
        if (!accepted) break;
        fit.objective.push_back(current);
    }

    fit.intercept = beta[0];
    fit.coef = beta.tail(p - 1);
    return fit;
}

}  // namespace ptab
