#include "ptab/nuisance/feature_map.hpp"

#include <stdexcept>

namespace ptab {

FeatureMap FeatureMap::linear() { return FeatureMap(Kind::linear, "linear"); }

FeatureMap FeatureMap::poly2() { return FeatureMap(Kind::poly2, "poly2"); }

FeatureMap FeatureMap::custom(std::vector<Basis> basis, std::string name) {
    if (basis.empty()) throw std::invalid_argument("custom feature map needs at least one basis function");
    return FeatureMap(Kind::custom, std::move(name), std::move(basis));
}

FeatureMap FeatureMap::parse(const std::string& name) {
    if (name == "linear") return linear();
    if (name == "poly2") return poly2();
    throw std::invalid_argument("unknown feature map '" + name + "' (expected linear or poly2)");
}

std::size_t FeatureMap::output_dim(std::size_t d) const noexcept {
    switch (kind_) {
        case Kind::linear: return d;
        case Kind::poly2: return d + d + d * (d - (d > 0 ? 1 : 0)) / 2;
        case Kind::custom: return basis_.size();
    }
    return d;
}

Eigen::VectorXd FeatureMap::expand_row(std::span<const double> x) const {
    const std::size_t d = x.size();
    Eigen::VectorXd g(static_cast<Eigen::Index>(output_dim(d)));
    Eigen::Index c = 0;
    switch (kind_) {
        case Kind::linear:
            for (double v : x) g[c++] = v;
            break;
        case Kind::poly2:
            for (double v : x) g[c++] = v;
            for (double v : x) g[c++] = v * v;
            for (std::size_t j = 0; j < d; ++j) {
                for (std::size_t k = j + 1; k < d; ++k) g[c++] = x[j] * x[k];
            }
            break;
        case Kind::custom:
            for (const auto& f : basis_) g[c++] = f(x);
            break;
    }
    return g;
}

Eigen::MatrixXd FeatureMap::expand(const Eigen::MatrixXd& x) const {
    const auto d = static_cast<std::size_t>(x.cols());
    Eigen::MatrixXd g(x.rows(), static_cast<Eigen::Index>(output_dim(d)));
    std::vector<double> row(d);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < d; ++j) row[j] = x(i, static_cast<Eigen::Index>(j));
        g.row(i) = expand_row(row).transpose();
    }
    return g;
}

}  // namespace ptab
