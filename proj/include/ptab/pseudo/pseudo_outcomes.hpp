#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <utility>

namespace ptab {

/**
 * @brief Pseudo-outcomes mu_hat_1..mu_hat_n with their mean and sample SD.
 *
 * sigma_hat is the n-1 sample SD unless injected. A zero SD is allowed here
 * and reported by degenerate(); the walk refuses to standardize it.
 */
class PseudoOutcomes {
public:
    /// @throws std::invalid_argument if n < 2 or any value is non-finite
    static PseudoOutcomes from_values(Eigen::VectorXd mu_hat);
    /// Uses the supplied SD instead of the sample SD; n >= 1.
    /// @throws std::invalid_argument if sigma_hat < 0 or a value is non-finite
    static PseudoOutcomes with_sigma(Eigen::VectorXd mu_hat, double sigma_hat);

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(mu_hat_.size()); }
    [[nodiscard]] const Eigen::VectorXd& mu_hat() const noexcept { return mu_hat_; }
    [[nodiscard]] double sigma_hat() const noexcept { return sigma_hat_; }
    [[nodiscard]] double mu_bar() const noexcept { return mu_bar_; }
    [[nodiscard]] bool degenerate() const noexcept { return !(sigma_hat_ > 0.0); }

private:
    PseudoOutcomes(Eigen::VectorXd mu_hat, double sigma_hat, double mu_bar)
        : mu_hat_(std::move(mu_hat)), sigma_hat_(sigma_hat), mu_bar_(mu_bar) {}

    Eigen::VectorXd mu_hat_;
    double sigma_hat_ = 0.0;
    double mu_bar_ = 0.0;
};

/// Mean and n-1 sample SD, summed in index order.
struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};
[[nodiscard]] MeanSd mean_sd(const Eigen::VectorXd& v);

}  // namespace ptab
