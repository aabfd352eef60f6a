#include "ptab/drl/drl.hpp"

#include "ptab/core/error.hpp"
#include "ptab/core/folds.hpp"
#include "ptab/core/parallel.hpp"
#include "ptab/tab/tab.hpp"

#include <string>

namespace ptab {

double drl_pseudo(const Trajectory& traj, const ValueModel& value, const RatioModel& ratio) {
    return drl_pseudo(
        traj, [&](std::size_t t, int a, std::span<const double> x) { return value.predict(t, a, x); },
        [&](std::size_t t, int a, std::span<const double> x, int a_obs) { return ratio.ratio(t, a, x, a_obs); });
}

namespace {

struct FoldResult {
    std::size_t clipped = 0;
    std::size_t evaluations = 0;
    bool regularized = false;
};

template <class Error>
[[noreturn]] void rethrow_with_fold(std::size_t k, const Error& e) {
    throw Error("fold " + std::to_string(k) + ": " + e.what());
}

}  // namespace

PseudoOutcomes build_pseudo_dynamic(const PanelDataset& panel, std::size_t folds, const DynamicConfig& config,
                                    RngStream& rng, std::size_t threads, DynamicDiagnostics* diagnostics) {
    const FoldAssignment assignment = kfold_split(panel.size(), folds, rng);
    Eigen::VectorXd mu(static_cast<Eigen::Index>(panel.size()));
    std::vector<FoldResult> results(folds);

    parallel_for(folds, threads, [&](std::size_t k) {
        const auto train_days = assignment.complement(k);
        const auto test_days = assignment.members(k);
        try {
            const PanelDataset train = panel.subset(train_days);
            const ValueModel value = fit_value_model(train, config.basis, config.ridge_lambda);
            const RatioModel ratio = fit_mis_ratio(train, config.behavior, config.backend, config.ratio);
            FoldResult& res = results[k];
            res.regularized = ratio.regularized();
            for (std::size_t i : test_days) {
                const Trajectory& day = panel.day(i);
                auto counted = [&](std::size_t t, int a, std::span<const double> x, int a_obs) {
                    const double raw = ratio.raw_ratio(t, a, x, a_obs);
                    ++res.evaluations;
                    if (raw > ratio.omega_max()) ++res.clipped;
                    return std::min(raw, ratio.omega_max());
                };
                mu[static_cast<Eigen::Index>(i)] = drl_pseudo(
                    day, [&](std::size_t t, int a, std::span<const double> x) { return value.predict(t, a, x); },
                    counted);
            }
        } catch (const MissingArmError& e) {
            rethrow_with_fold(k, e);
        } catch (const SchemaError& e) {
            rethrow_with_fold(k, e);
        }
    });

    if (diagnostics) {
        DynamicDiagnostics diag;
        for (const auto& r : results) {
            diag.omega_clipped += r.clipped;
            diag.omega_evaluations += r.evaluations;
            diag.covariance_regularized = diag.covariance_regularized || r.regularized;
        }
        diag.omega_clip_rate = diag.omega_evaluations > 0
                                   ? static_cast<double>(diag.omega_clipped) / static_cast<double>(diag.omega_evaluations)
                                   : 0.0;
        *diagnostics = diag;
    }
    return PseudoOutcomes::from_values(std::move(mu));
}

double drl_z_test(const PseudoOutcomes& pseudo) { return z_test(pseudo); }

}  // namespace ptab
