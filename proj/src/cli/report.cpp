#include "ptab/cli/report.hpp"

#include "ptab/pseudo/iid.hpp"

#include <cmath>
#include <stdexcept>

namespace ptab {

void TestOptions::validate() const {
    if (folds < 2) throw std::invalid_argument("K must be >= 2");
    if (permutations < 1) throw std::invalid_argument("B must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
    if (combiner.kind == CombinerKind::quantile && !(combiner.gamma > 0.0 && combiner.gamma < 1.0)) {
        throw std::invalid_argument("gamma must be in (0, 1)");
    }
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

MethodPValues run_methods(const PseudoOutcomes& pseudo, const TestOptions& options, const RngStream& master,
                          std::size_t threads) {
    MethodPValues out;
    out.p_tab = p_tab(pseudo, options.permutations, options.combiner, master.child(kStreamPermutations), threads);
    RngStream tab_rng = master.child(kStreamTab);
    out.tab = tab_test(pseudo, tab_rng);
    out.z = z_test(pseudo);
    return out;
}

namespace {

nlohmann::json common_report(const std::string& setting, const PseudoOutcomes& pseudo, const MethodPValues& p,
                             const TestOptions& options, const RngStream& master) {
    nlohmann::json j;
    j["method"] = "p-tab";
    j["setting"] = setting;
    j["combined_p"] = p.p_tab.combined_p;
    j["alpha"] = options.alpha;
    j["reject"] = p.p_tab.combined_p < options.alpha;
    j["combiner"] = {{"kind", p.p_tab.method.kind == CombinerKind::cauchy ? "cauchy" : "quantile"},
                     {"gamma", p.p_tab.method.gamma}};
    j["permutations"] = p.p_tab.permutations;
    j["per_perm_p"] = p.p_tab.per_perm_p;
    j["per_perm_t"] = p.p_tab.per_perm_t;
    j["per_perm_theta1"] = p.p_tab.per_perm_theta1;
    j["tab"] = {{"p_value", p.tab.p_value}, {"t_n", p.tab.t_n}, {"theta1", p.tab.theta1},
                {"reject", p.tab.p_value < options.alpha}};
    j["baseline"] = {{"method", setting == "iid" ? "dml" : "drl"},
                     {"p_value", p.z},
                     {"reject", p.z < options.alpha}};
    j["statistics"] = {{"mu_bar", pseudo.mu_bar()}, {"sigma_hat", pseudo.sigma_hat()}, {"n", pseudo.size()}};
    j["seeds"] = {{"seed", master.seed()},
                  {"crossfit_stream", master.child(kStreamCrossfit).stream()},
                  {"permutation_stream", master.child(kStreamPermutations).stream()},
                  {"tab_stream", master.child(kStreamTab).stream()}};
    return j;
}

nlohmann::json options_json(const TestOptions& options) {
    // threads is left out on purpose: reports must not depend on it.
    return {{"folds", options.folds},
            {"permutations", options.permutations},
            {"combine", options.combiner.kind == CombinerKind::cauchy ? "cauchy" : "quantile"},
            {"gamma", options.combiner.gamma},
            {"alpha", options.alpha},
            {"seed", options.seed}};
}

}  // namespace

nlohmann::json test_iid_report(const IidDataset& data, const IidTestConfig& config) {
    config.test.validate();
    const RngStream master(config.test.seed);
    RngStream crossfit = master.child(kStreamCrossfit);
    NuisancePredictions diag;
    const PseudoOutcomes pseudo =
        build_pseudo(data, config.test.folds, config.learner, crossfit, config.test.threads, &diag);
    const MethodPValues p = run_methods(pseudo, config.test, master, config.test.threads);

    nlohmann::json j = common_report("iid", pseudo, p, config.test, master);
    j["diagnostics"] = {{"clip_activations", diag.clip_activations},
                        {"propensity_converged", diag.propensity_converged},
                        {"gcv_fallback", diag.gcv_fallback}};
    nlohmann::json cfg = options_json(config.test);
    cfg["outcome_learner"] = config.learner.outcome_map.name();
    cfg["propensity_learner"] = config.learner.propensity_map.name();
    cfg["clip"] = config.learner.clip;
    cfg["ridge_lambda"] = config.learner.ridge_lambda ? nlohmann::json(*config.learner.ridge_lambda) : nlohmann::json();
    cfg["known_propensity"] =
        config.learner.known_propensity ? nlohmann::json(*config.learner.known_propensity) : nlohmann::json();
    j["config"] = std::move(cfg);
    return j;
}

nlohmann::json test_dynamic_report(const PanelDataset& panel, const DynamicTestConfig& config) {
    config.test.validate();
    const RngStream master(config.test.seed);
    RngStream crossfit = master.child(kStreamCrossfit);
    DynamicDiagnostics diag;
    const PseudoOutcomes pseudo =
        build_pseudo_dynamic(panel, config.test.folds, config.dynamic, crossfit, config.test.threads, &diag);
    const MethodPValues p = run_methods(pseudo, config.test, master, config.test.threads);

    nlohmann::json j = common_report("dynamic", pseudo, p, config.test, master);
    j["statistics"]["T"] = panel.horizon();
    j["diagnostics"] = {{"omega_clip_rate", diag.omega_clip_rate},
                        {"omega_clipped", diag.omega_clipped},
                        {"omega_evaluations", diag.omega_evaluations},
                        {"covariance_regularized", diag.covariance_regularized}};
    nlohmann::json cfg = options_json(config.test);
    cfg["basis"] = config.dynamic.basis.name();
    cfg["ridge_lambda"] = config.dynamic.ridge_lambda ? nlohmann::json(*config.dynamic.ridge_lambda) : nlohmann::json();
    cfg["behavior"] = config.dynamic.behavior.name();
    if (config.dynamic.behavior.kind == BehaviorPolicy::Kind::known_probabilities) {
        cfg["treat_probs"] = config.dynamic.behavior.treat_probs;
    }
    cfg["clip"] = config.dynamic.behavior.clip;
    cfg["ratio_backend"] = to_string(config.dynamic.backend);
    cfg["omega_max"] = config.dynamic.ratio.omega_max;
    j["config"] = std::move(cfg);
    return j;
}

}  // namespace ptab
