#include "ptab/pseudo/pseudo_outcomes.hpp"

#include <cmath>
#include <stdexcept>

namespace ptab {

namespace {

void require_finite(const Eigen::VectorXd& v) {
    if (!v.allFinite()) throw std::invalid_argument("pseudo-outcomes must be finite");
}

double plain_mean(const Eigen::VectorXd& v) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += v[i];
    return s / static_cast<double>(v.size());
}

}  // namespace

MeanSd mean_sd(const Eigen::VectorXd& v) {
    if (v.size() < 2) throw std::invalid_argument("need at least two values for a sample SD");
    MeanSd out;
    out.mean = plain_mean(v);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double d = v[i] - out.mean;
        ss += d * d;
    }
    out.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    return out;
}

PseudoOutcomes PseudoOutcomes::from_values(Eigen::VectorXd mu_hat) {
    require_finite(mu_hat);
    if (mu_hat.size() < 2) throw std::invalid_argument("pseudo-outcomes need n >= 2");
    const MeanSd ms = mean_sd(mu_hat);
    return PseudoOutcomes(std::move(mu_hat), ms.sd, ms.mean);
}

PseudoOutcomes PseudoOutcomes::with_sigma(Eigen::VectorXd mu_hat, double sigma_hat) {
    require_finite(mu_hat);
    if (mu_hat.size() < 1) throw std::invalid_argument("pseudo-outcomes need n >= 1");
    if (!(sigma_hat >= 0.0) || !std::isfinite(sigma_hat)) throw std::invalid_argument("sigma_hat must be >= 0");
    const double mean = plain_mean(mu_hat);
    return PseudoOutcomes(std::move(mu_hat), sigma_hat, mean);
}

}  // namespace ptab
