#include "ptab/cli/power.hpp"

#include "ptab/core/error.hpp"
#include "ptab/core/parallel.hpp"
#include "ptab/pseudo/iid.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace ptab {

namespace {

std::string shortest(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

struct RepOutcome {
    std::array<bool, 3> reject{};
    bool degenerate = false;
};

}  // namespace

std::string method_name(PowerMethod method, bool dynamic) {
    switch (method) {
        case PowerMethod::p_tab: return "p-tab";
        case PowerMethod::tab: return "tab";
        default: return dynamic ? "drl" : "dml";
    }
}

PowerMethod parse_power_method(const std::string& name) {
    if (name == "p-tab") return PowerMethod::p_tab;
    if (name == "tab") return PowerMethod::tab;
    if (name == "z" || name == "dml" || name == "drl") return PowerMethod::z;
    throw std::invalid_argument("unknown method '" + name + "' (expected p-tab, tab, dml or drl)");
}

std::string PowerCell::setting() const {
    switch (kind) {
        case Kind::iid: return iid.label();
        case Kind::mdp: return mdp.label();
        default: return "bootstrap/lambda=" + shortest(lambda);
    }
}

std::optional<double> PowerCell::delta_column() const {
    switch (kind) {
        case Kind::iid: return std::nullopt;
        case Kind::mdp: return mdp.delta;
        default: return lambda;
    }
}

std::size_t PowerCell::n() const noexcept { return kind == Kind::iid ? iid.n : mdp.n; }

std::vector<PowerRow> run_power_study(const PowerStudyConfig& config) {
    if (config.reps < 1) throw std::invalid_argument("reps must be >= 1");
    if (config.methods.empty()) throw std::invalid_argument("no methods selected");
    config.test.validate();
    const RngStream master(config.test.seed);
    std::vector<PowerRow> rows;

    for (const PowerCell& cell : config.cells) {
        std::optional<MdpCoefficients> coef;
        std::optional<BootstrapEnv> env;
        DynamicConfig dynamic = config.dynamic;

        switch (cell.kind) {
            case PowerCell::Kind::iid: {
                cell.iid.validate();
                (void)iid_true_ate(cell.iid);  // fill the cache before the workers start
                break;
            }
            case PowerCell::Kind::mdp: {
                coef = draw_mdp_coefficients(cell.mdp);
                if (dynamic.backend == RatioBackend::oracle && config.oracle_from_truth) {
                    dynamic.ratio.oracle = mdp_dynamics(*coef);
                }
                break;
            }
            case PowerCell::Kind::bootstrap: {
                if (!config.source) throw std::invalid_argument("bootstrap cells need a source panel");
                env = build_bootstrap_env(*config.source, cell.lambda);
                break;
            }
        }

        std::vector<RepOutcome> outcomes(config.reps);
        parallel_for(config.reps, config.test.threads, [&](std::size_t r) {
            const RngStream rep = master.child(r);
            RngStream data_rng = rep.child(kStreamData);
            RngStream crossfit = rep.child(kStreamCrossfit);
            std::optional<PseudoOutcomes> pseudo;
            switch (cell.kind) {
                case PowerCell::Kind::iid: {
                    const IidSample sample = gen_iid(cell.iid, data_rng);
                    pseudo = build_pseudo(sample.data, config.test.folds, config.learner, crossfit);
                    break;
                }
                case PowerCell::Kind::mdp: {
                    const PanelDataset panel = gen_mdp(cell.mdp, *coef, data_rng);
                    pseudo = build_pseudo_dynamic(panel, config.test.folds, dynamic, crossfit);
                    break;
                }
                case PowerCell::Kind::bootstrap: {
                    const PanelDataset panel = sample_bootstrap(*env, config.bootstrap_n, data_rng);
                    pseudo = build_pseudo_dynamic(panel, config.test.folds, dynamic, crossfit);
                    break;
                }
            }
            RepOutcome& out = outcomes[r];
            if (pseudo->degenerate()) {
                out.degenerate = true;
                return;
            }
            const MethodPValues p = run_methods(*pseudo, config.test, rep, 1);
            out.reject = {p.p_tab.combined_p < config.test.alpha, p.tab.p_value < config.test.alpha,
                          p.z < config.test.alpha};
        });

        std::size_t degenerate = 0;
        for (const auto& o : outcomes) degenerate += o.degenerate ? 1 : 0;
        for (PowerMethod method : config.methods) {
            const auto idx = static_cast<std::size_t>(method);
            std::size_t hits = 0;
            for (const auto& o : outcomes) hits += o.reject[idx] ? 1 : 0;
            PowerRow row;
            row.method = method_name(method, cell.dynamic());
            row.setting = cell.setting();
            row.delta = cell.delta_column();
            row.n = cell.kind == PowerCell::Kind::bootstrap ? config.bootstrap_n : cell.n();
            row.reps = config.reps;
            row.rejection_rate = static_cast<double>(hits) / static_cast<double>(config.reps);
            row.se = std::sqrt(row.rejection_rate * (1.0 - row.rejection_rate) / static_cast<double>(config.reps));
            row.degenerate = degenerate;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_power_csv(std::ostream& out, const std::vector<PowerRow>& rows) {
    out << "method,setting,delta,n,rejection_rate,se,reps\n";
    for (const auto& r : rows) {
        out << r.method << ',' << r.setting << ',' << (r.delta ? shortest(*r.delta) : std::string()) << ',' << r.n
            << ',' << shortest(r.rejection_rate) << ',' << shortest(r.se) << ',' << r.reps << '\n';
    }
}

}  // namespace ptab
