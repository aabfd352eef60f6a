#pragma once

#include "ptab/core/data.hpp"
#include "ptab/core/rng.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ptab {

enum class IidFamily { randomized, confounded };
enum class NoiseFamily { normal, student_t };

/**
 * @brief One cell of the i.i.d. simulation catalog.
 *
 * randomized: X ~ N(0, I_2), A ~ Bernoulli(p_a), Y = (X1 - X2 + 2)/2 + A tau(X) + eps,
 *             hypotheses H0_1, H0_2, H1_1..H1_3, sigma0 in {0.5, 1, 3}, p_a in {0.3, 0.5}.
 * confounded: X1 ~ U(0,1), A ~ Bernoulli(X1), Y = m0(X) + A tau(X) + eps,
 *             hypotheses H0_1..H0_5, H1_1..H1_5, d in {3, 20, 50}; normal noise with
 *             sigma0 in {0.5, 1, 3} or t noise with df in {3, 5, 10}.
 */
struct IidDgpSpec {
    IidFamily family = IidFamily::randomized;
    std::string hypothesis = "H0_1";
    double p_a = 0.5;
    NoiseFamily noise = NoiseFamily::normal;
    double sigma0 = 1.0;
    int df = 3;
    std::size_t dim = 3;
    std::size_t n = 300;

    /// @throws std::invalid_argument if the combination is not in the catalog
    void validate() const;
    /// Stable identifier without n, e.g. "rand-iid/H1_3/pa=0.5/sigma=1".
    [[nodiscard]] std::string label() const;
    [[nodiscard]] bool is_null() const { return hypothesis.rfind("H0", 0) == 0; }
};

/// Conditional means and propensity of a catalog cell (the true nuisances).
struct IidTruth {
    /// E(Y | A = a, X = x), including the mean of any Bernoulli add-on.
    [[nodiscard]] double mean_outcome(int a, std::span<const double> x) const;
    /// P(A = 1 | X = x).
    [[nodiscard]] double propensity(std::span<const double> x) const;
    /// E(Y1 - Y0 | X = x).
    [[nodiscard]] double cate(std::span<const double> x) const { return mean_outcome(1, x) - mean_outcome(0, x); }

    IidDgpSpec spec;
};

struct IidSample {
    IidDataset data;
    double true_ate = 0.0;
};

/// Covariates only (rows are draws), for Monte Carlo over X.
[[nodiscard]] Eigen::MatrixXd draw_iid_covariates(const IidDgpSpec& spec, std::size_t n, RngStream& rng);

/// @throws std::invalid_argument for a spec outside the randomized catalog
[[nodiscard]] IidSample gen_randomized_iid(const IidDgpSpec& spec, RngStream& rng);
/// @throws std::invalid_argument for a spec outside the confounded catalog
[[nodiscard]] IidSample gen_confounded_iid(const IidDgpSpec& spec, RngStream& rng);
[[nodiscard]] IidSample gen_iid(const IidDgpSpec& spec, RngStream& rng);

struct MonteCarloValue {
    double value = 0.0;
    double se = 0.0;
};

/**
 * @brief E(Y1 - Y0) by 10^6 draws of X with a fixed seed, memoized per cell
 * for the lifetime of the process.
 */
[[nodiscard]] MonteCarloValue iid_true_ate(const IidDgpSpec& spec);

/// Every catalog cell (n left at its default).
[[nodiscard]] std::vector<IidDgpSpec> iid_catalog();

[[nodiscard]] nlohmann::json to_json(const IidDgpSpec& spec);
/// @throws std::invalid_argument on missing or invalid fields
[[nodiscard]] IidDgpSpec iid_spec_from_json(const nlohmann::json& j);

}  // namespace ptab
