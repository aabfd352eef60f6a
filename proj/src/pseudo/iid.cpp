#include "ptab/pseudo/iid.hpp"

namespace ptab {

double ipw_value(int a, double y, double b1) noexcept {
    return (a == 1 ? 1.0 / b1 : 0.0) * y - (a == 0 ? 1.0 / (1.0 - b1) : 0.0) * y;
}

double aipw_value(int a, double y, double m0, double m1, double b1) noexcept {
    const double diff = m1 - m0;
    const double treated = a == 1 ? (1.0 / b1) * (y - m1) : 0.0;
    const double control = a == 0 ? (1.0 / (1.0 - b1)) * (y - m0) : 0.0;
    return diff + treated - control;
}

double ipw_pseudo(const IidRecord& record, const PropensityModel& b) {
    return ipw_value(record.a, record.y, b.predict(1, record.x));
}

double aipw_pseudo(const IidRecord& record, const OutcomeModel& m, const PropensityModel& b) {
    return aipw_value(record.a, record.y, m.predict(0, record.x), m.predict(1, record.x), b.predict(1, record.x));
}

PseudoOutcomes pseudo_from_predictions(const IidDataset& data, const NuisancePredictions& nuisance) {
    Eigen::VectorXd mu(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        mu[r] = aipw_value(data.a()[i], data.y()[r], nuisance.m0[r], nuisance.m1[r], nuisance.b1[r]);
    }
    return PseudoOutcomes::from_values(std::move(mu));
}

PseudoOutcomes build_pseudo_from_models(const IidDataset& data, const OutcomeModel& m, const PropensityModel& b) {
    NuisancePredictions nuisance;
    nuisance.m0 = m.predict(0, data.x());
    nuisance.m1 = m.predict(1, data.x());
    nuisance.b1 = b.predict_treated(data.x());
    return pseudo_from_predictions(data, nuisance);
}

PseudoOutcomes build_pseudo(const IidDataset& data, std::size_t folds, const LearnerConfig& config, RngStream& rng,
                            std::size_t threads, NuisancePredictions* diagnostics) {
    NuisancePredictions nuisance = crossfit_predict(data, folds, config, rng, threads);
    PseudoOutcomes pseudo = pseudo_from_predictions(data, nuisance);
    if (diagnostics) *diagnostics = std::move(nuisance);
    return pseudo;
}

}  // namespace ptab
