#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ptab {

/**
 * @brief Deterministic covariate expansion (no intercept column).
 *
 * linear: x itself. poly2: x, then x_j^2, then x_j x_k for j < k.
 * custom: one column per supplied basis function.
 */
class FeatureMap {
public:
    enum class Kind { linear, poly2, custom };
    using Basis = std::function<double(std::span<const double>)>;

    static FeatureMap linear();
    static FeatureMap poly2();
    static FeatureMap custom(std::vector<Basis> basis, std::string name = "custom");
    /// "linear" or "poly2". @throws std::invalid_argument otherwise
    static FeatureMap parse(const std::string& name);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] std::size_t output_dim(std::size_t input_dim) const noexcept;

    [[nodiscard]] Eigen::MatrixXd expand(const Eigen::MatrixXd& x) const;
    [[nodiscard]] Eigen::VectorXd expand_row(std::span<const double> x) const;

private:
    FeatureMap(Kind kind, std::string name, std::vector<Basis> basis = {})
        : kind_(kind), name_(std::move(name)), basis_(std::move(basis)) {}

    Kind kind_;
    std::string name_;
    std::vector<Basis> basis_;
};

}  // namespace ptab
