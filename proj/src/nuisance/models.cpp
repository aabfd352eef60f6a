#include "ptab/nuisance/models.hpp"

#include "ptab/core/error.hpp"
#include "ptab/core/folds.hpp"
#include "ptab/core/parallel.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptab {

namespace {

std::vector<std::size_t> rows_with_arm(const IidDataset& data, int arm) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.a()[i] == arm) rows.push_back(i);
    }
    return rows;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

Eigen::VectorXd take(const Eigen::VectorXd& v, const std::vector<std::size_t>& rows) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[static_cast<Eigen::Index>(rows[i])];
    return out;
}

void check_clip(double clip) {
    if (!(clip > 0.0 && clip < 0.5)) throw std::invalid_argument("propensity clip must lie in (0, 0.5)");
}

}  // namespace

OutcomeModel OutcomeModel::fit(const IidDataset& data, const FeatureMap& map, std::optional<double> lambda) {
    std::array<RidgeFit, 2> arms;
    const Eigen::MatrixXd g = map.expand(data.x());
    for (int arm = 0; arm < 2; ++arm) {
        const auto rows = rows_with_arm(data, arm);
        if (rows.empty()) throw MissingArmError("no records with a=" + std::to_string(arm) + " for the outcome model");
        arms[static_cast<std::size_t>(arm)] = ridge(take_rows(g, rows), take(data.y(), rows), lambda);
    }
    return OutcomeModel(map, std::move(arms));
}

double OutcomeModel::predict(int a, std::span<const double> x) const { return arm(a).predict(map_.expand_row(x)); }

Eigen::VectorXd OutcomeModel::predict(int a, const Eigen::MatrixXd& x) const { return arm(a).predict(map_.expand(x)); }

PropensityModel PropensityModel::fit(const IidDataset& data, const FeatureMap& map, double clip,
                                     const LogisticOptions& options) {
    check_clip(clip);
    for (int arm = 0; arm < 2; ++arm) {
        if (data.count_arm(arm) == 0) {
            throw MissingArmError("no records with a=" + std::to_string(arm) + " for the propensity model");
        }
    }
    LogisticFit fit = logistic_irls(map.expand(data.x()), data.a(), options);
    return PropensityModel(map, std::move(fit), 0.5, clip);
}

PropensityModel PropensityModel::known(double p1, double clip) {
    check_clip(clip);
    if (!(p1 > 0.0 && p1 < 1.0)) throw std::invalid_argument("known propensity must lie in (0, 1)");
    return PropensityModel(FeatureMap::linear(), std::nullopt, p1, clip);
}

double PropensityModel::raw_treated(std::span<const double> x) const {
    return fit_ ? fit_->probability(map_.expand_row(x)) : known_p1_;
}

double PropensityModel::predict(int a, std::span<const double> x) const {
    const double b1 = std::clamp(raw_treated(x), clip_, 1.0 - clip_);
    return a == 1 ? b1 : 1.0 - b1;
}

Eigen::VectorXd PropensityModel::predict_treated(const Eigen::MatrixXd& x) const {
    Eigen::VectorXd b(x.rows());
    std::vector<double> row(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) row[static_cast<std::size_t>(j)] = x(i, j);
        b[i] = predict(1, row);
    }
    return b;
}

NuisancePredictions crossfit_predict(const IidDataset& data, std::size_t folds, const LearnerConfig& config,
                                     RngStream& rng, std::size_t threads) {
    const FoldAssignment assignment = kfold_split(data.size(), folds, rng);
    const auto n = static_cast<Eigen::Index>(data.size());

    NuisancePredictions out;
    out.m0.resize(n);
    out.m1.resize(n);
    out.b1.resize(n);
    std::vector<char> converged(folds, 1);
    std::vector<char> fallback(folds, 0);

    parallel_for(folds, threads, [&](std::size_t k) {
        const auto train_rows = assignment.complement(k);
        const auto test_rows = assignment.members(k);
        const IidDataset train = data.subset(train_rows);
        for (int arm = 0; arm < 2; ++arm) {
            if (train.count_arm(arm) == 0) {
                throw MissingArmError("fold " + std::to_string(k) + ": training complement has no records with a=" +
                                      std::to_string(arm));
            }
        }
        const OutcomeModel m = OutcomeModel::fit(train, config.outcome_map, config.ridge_lambda);
        const PropensityModel b = config.known_propensity
                                      ? PropensityModel::known(*config.known_propensity, config.clip)
                                      : PropensityModel::fit(train, config.propensity_map, config.clip, config.logistic);
        converged[k] = b.converged() ? 1 : 0;
        fallback[k] = (m.arm(0).gcv_fallback || m.arm(1).gcv_fallback) ? 1 : 0;
        const Eigen::MatrixXd x_test = take_rows(data.x(), test_rows);
        const Eigen::VectorXd m0 = m.predict(0, x_test);
        const Eigen::VectorXd m1 = m.predict(1, x_test);
        const Eigen::VectorXd b1 = b.predict_treated(x_test);
        for (std::size_t i = 0; i < test_rows.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(test_rows[i]);
            const auto j = static_cast<Eigen::Index>(i);
            out.m0[r] = m0[j];
            out.m1[r] = m1[j];
            out.b1[r] = b1[j];
        }
    });

    for (std::size_t k = 0; k < folds; ++k) {
        out.propensity_converged = out.propensity_converged && converged[k];
        out.gcv_fallback = out.gcv_fallback || fallback[k];
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (out.b1[i] <= config.clip || out.b1[i] >= 1.0 - config.clip) ++out.clip_activations;
    }
    return out;
}

}  // namespace ptab
