#include "ptab/nuisance/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ptab {

namespace {

struct Centered {
    Eigen::MatrixXd g;
    Eigen::VectorXd y;
    Eigen::RowVectorXd g_mean;
    double y_mean = 0.0;
};

Centered center(const Eigen::MatrixXd& g, const Eigen::VectorXd& y) {
    if (g.rows() != y.size()) throw std::invalid_argument("ridge: design and response lengths differ");
    if (y.size() == 0) throw std::invalid_argument("ridge: empty sample");
    Centered c;
    c.y_mean = y.mean();
    c.y = y.array() - c.y_mean;
    c.g_mean = g.colwise().mean();
    c.g = g.rowwise() - c.g_mean;
    return c;
}

// Thin SVD of the centered design with a rank cutoff for the lambda = 0 case.
struct Decomposition {
    Eigen::MatrixXd u;
    Eigen::VectorXd s;
    Eigen::MatrixXd v;
    double cutoff = 0.0;
};

Decomposition decompose(const Eigen::MatrixXd& g) {
    if (g.cols() == 0) return {Eigen::MatrixXd(g.rows(), 0), Eigen::VectorXd(0), Eigen::MatrixXd(0, 0), 0.0};
    Eigen::BDCSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Decomposition d{svd.matrixU(), svd.singularValues(), svd.matrixV(), 0.0};
    const double smax = d.s.size() > 0 ? d.s.maxCoeff() : 0.0;
    d.cutoff = smax * static_cast<double>(std::max(g.rows(), g.cols())) * std::numeric_limits<double>::epsilon();
    return d;
}

// Shrinkage factor s / (s^2 + lambda), zero below the rank cutoff when unpenalized.
Eigen::VectorXd shrink(const Decomposition& d, double lambda) {
    Eigen::VectorXd f(d.s.size());
    for (Eigen::Index j = 0; j < d.s.size(); ++j) {
        const double s = d.s[j];
        f[j] = (lambda == 0.0 && s <= d.cutoff) || s == 0.0 ? 0.0 : s / (s * s + lambda);
    }
    return f;
}

RidgeFit assemble(const Centered& c, const Decomposition& d, const Eigen::VectorXd& uty, double lambda) {
    RidgeFit fit;
    fit.lambda = lambda;
    fit.coef = d.v * (shrink(d, lambda).cwiseProduct(uty));
    fit.intercept = c.y_mean - c.g_mean.dot(fit.coef);
    return fit;
}

double gcv_criterion(const Centered& c, const Decomposition& d, const Eigen::VectorXd& uty, double lambda) {
    const auto n = static_cast<double>(c.y.size());
    Eigen::VectorXd hat(d.s.size());
    double df = 1.0;
    for (Eigen::Index j = 0; j < d.s.size(); ++j) {
        const double s2 = d.s[j] * d.s[j];
        hat[j] = s2 == 0.0 ? 0.0 : s2 / (s2 + lambda);
        df += hat[j];
    }
    const Eigen::VectorXd fitted = d.u * hat.cwiseProduct(uty);
    const double rss = (c.y - fitted).squaredNorm();
    const double dof = n - df;
    if (!(dof > 1e-10)) return std::numeric_limits<double>::infinity();
    return n * rss / (dof * dof);
}

}  // namespace

Eigen::VectorXd RidgeFit::predict(const Eigen::MatrixXd& g) const {
    Eigen::VectorXd out = g * coef;
    out.array() += intercept;
    return out;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> grid(10);
    for (int i = 0; i < 10; ++i) grid[static_cast<std::size_t>(i)] = std::pow(10.0, -4.0 + 6.0 * i / 9.0);
    return grid;
}

RidgeFit ridge_fit(const Eigen::MatrixXd& g, const Eigen::VectorXd& y, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("ridge penalty must be >= 0");
    const Centered c = center(g, y);
    const Decomposition d = decompose(c.g);
    const Eigen::VectorXd uty = d.u.transpose() * c.y;
    RidgeFit fit = assemble(c, d, uty, lambda);
    fit.gcv = std::numeric_limits<double>::quiet_NaN();
    return fit;
}

RidgeFit ridge_fit_gcv(const Eigen::MatrixXd& g, const Eigen::VectorXd& y, std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("ridge: empty penalty grid");
    for (double l : grid) {
        if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument("ridge penalty must be >= 0");
    }
    const Centered c = center(g, y);
    const Decomposition d = decompose(c.g);
    const Eigen::VectorXd uty = d.u.transpose() * c.y;

    double best = std::numeric_limits<double>::infinity();
    double best_lambda = grid[0];
    double smallest = grid[0];
    for (double l : grid) {
        smallest = std::min(smallest, l);
        const double score = gcv_criterion(c, d, uty, l);
        if (std::isfinite(score) && score < best) {
            best = score;
            best_lambda = l;
        }
    }
    const bool fallback = !std::isfinite(best);
    if (fallback) best_lambda = smallest;
    RidgeFit fit = assemble(c, d, uty, best_lambda);
    fit.gcv = best;
    fit.gcv_fallback = fallback;
    return fit;
}

RidgeFit ridge_fit_gcv(const Eigen::MatrixXd& g, const Eigen::VectorXd& y) {
    const auto grid = default_lambda_grid();
    return ridge_fit_gcv(g, y, grid);
}

RidgeFit ridge(const Eigen::MatrixXd& g, const Eigen::VectorXd& y, std::optional<double> lambda) {
    return lambda ? ridge_fit(g, y, *lambda) : ridge_fit_gcv(g, y);
}

}  // namespace ptab
