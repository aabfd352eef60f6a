#include "ptab/drl/value.hpp"

#include "ptab/core/error.hpp"

#include <stdexcept>
#include <string>

namespace ptab {

ValueModel::ValueModel(FeatureMap basis, std::array<std::vector<RidgeFit>, 2> fits)
    : basis_(std::move(basis)), fits_(std::move(fits)) {
    if (fits_[0].size() != fits_[1].size()) throw std::invalid_argument("value model arms differ in horizon");
}

double ValueModel::predict(std::size_t t, int a, std::span<const double> x) const {
    const auto& fits = arm(a);
    if (t >= fits.size()) return 0.0;
    return fits[t].predict(basis_.expand_row(x));
}

std::vector<RidgeFit> fit_value_backward(const PanelDataset& panel, int a, const FeatureMap& basis,
                                         std::optional<double> lambda) {
    if (a != 0 && a != 1) throw std::invalid_argument("arm must be 0 or 1");
    const std::size_t horizon = panel.horizon();
    const std::size_t d = panel.dim();
    std::vector<RidgeFit> fits(horizon);
    std::vector<double> row(d);

    for (std::size_t step = horizon; step-- > 0;) {
        std::vector<std::size_t> days;
        for (std::size_t i = 0; i < panel.size(); ++i) {
            if (panel.day(i).a[step] == a) days.push_back(i);
        }
        if (days.empty()) {
            throw MissingArmError("no day has a=" + std::to_string(a) + " at step t=" + std::to_string(step + 1));
        }
        Eigen::MatrixXd x(static_cast<Eigen::Index>(days.size()), static_cast<Eigen::Index>(d));
        Eigen::VectorXd target(static_cast<Eigen::Index>(days.size()));
        for (std::size_t k = 0; k < days.size(); ++k) {
            const Trajectory& day = panel.day(days[k]);
            const auto r = static_cast<Eigen::Index>(k);
            const auto s = static_cast<Eigen::Index>(step);
            x.row(r) = day.x.row(s);
            double next = 0.0;
            if (step + 1 < horizon) {
                for (std::size_t j = 0; j < d; ++j) row[j] = day.x(s + 1, static_cast<Eigen::Index>(j));
                next = fits[step + 1].predict(basis.expand_row(row));
            }
            target[r] = day.y[s] + next;
        }
        fits[step] = ridge(basis.expand(x), target, lambda);
    }
    return fits;
}

ValueModel fit_value_model(const PanelDataset& panel, const FeatureMap& basis, std::optional<double> lambda) {
    return ValueModel(basis, {fit_value_backward(panel, 0, basis, lambda), fit_value_backward(panel, 1, basis, lambda)});
}

}  // namespace ptab
