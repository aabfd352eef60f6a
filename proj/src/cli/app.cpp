#include "ptab/cli/app.hpp"

#include "ptab/cli/power.hpp"
#include "ptab/cli/report.hpp"
#include "ptab/core/csv.hpp"
#include "ptab/core/error.hpp"
#include "ptab/dist/bandit.hpp"
#include "ptab/sim/bootstrap.hpp"
#include "ptab/sim/iid_dgp.hpp"
#include "ptab/sim/mdp.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

namespace ptab {

namespace {

enum class Stage { config, load, compute };

class Runner {
public:
    explicit Runner(std::ostream& err) : err_(err) {}

    int run(const std::function<void(Stage&)>& body) {
        Stage stage = Stage::config;
        try {
            body(stage);
            return kExitOk;
        } catch (const DataError& e) {
            err_ << "data error: " << e.what() << '\n';
            return kExitDataError;
        } catch (const std::invalid_argument& e) {
            if (stage == Stage::load) {
                err_ << "data error: " << e.what() << '\n';
                return kExitDataError;
            }
            err_ << "config error: " << e.what() << '\n';
            return kExitConfigError;
        } catch (const NumericError& e) {
            err_ << "numeric error: " << e.what() << '\n';
            return kExitNumericError;
        } catch (const std::exception& e) {
            if (stage == Stage::load) {
                err_ << "data error: " << e.what() << '\n';
                return kExitDataError;
            }
            err_ << "numeric error: " << e.what() << '\n';
            return kExitNumericError;
        }
    }

private:
    std::ostream& err_;
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::invalid_argument("cannot write " + path);
    file << text;
    if (!file) throw std::invalid_argument("cannot write " + path);
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

std::vector<double> read_probabilities(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::vector<double> probs;
    std::string token;
    while (in >> token) {
        std::replace(token.begin(), token.end(), ',', ' ');
        std::istringstream cells(token);
        std::string cell;
        while (cells >> cell) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != cell.size()) throw DataError(path + ": not a number '" + cell + "'");
            probs.push_back(v);
        }
    }
    return probs;
}

// Flags shared by the two test commands.
struct TestFlags {
    std::size_t folds = 0;
    std::size_t permutations = 100;
    std::string combine = "cauchy";
    double gamma = 0.5;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    double clip = 0.01;
    std::optional<double> ridge_lambda;

    void attach(CLI::App& cmd, std::size_t default_folds) {
        folds = default_folds;
        cmd.add_option("--folds", folds, "cross-fitting folds K")->capture_default_str();
        cmd.add_option("--permutations", permutations, "permutations B")->capture_default_str();
        cmd.add_option("--combine", combine, "cauchy or quantile")->capture_default_str();
        cmd.add_option("--gamma", gamma, "quantile level")->capture_default_str();
        cmd.add_option("--alpha", alpha, "test level")->capture_default_str();
        cmd.add_option("--seed", seed, "master seed")->capture_default_str();
        cmd.add_option("--threads", threads, "worker threads")->capture_default_str();
        cmd.add_option("--clip", clip, "probability clip bound")->capture_default_str();
        cmd.add_option("--ridge-lambda", ridge_lambda, "fixed ridge penalty (GCV when absent)");
    }

    [[nodiscard]] TestOptions options() const {
        TestOptions o;
        o.folds = folds;
        o.permutations = permutations;
        if (combine == "cauchy") {
            o.combiner = Combiner::cauchy();
        } else if (combine == "quantile") {
            o.combiner = Combiner::quantile(gamma);
        } else {
            throw std::invalid_argument("--combine must be cauchy or quantile");
        }
        o.alpha = alpha;
        o.seed = seed;
        o.threads = threads;
        o.validate();
        if (!(clip > 0.0 && clip < 0.5)) throw std::invalid_argument("--clip must be in (0, 0.5)");
        if (ridge_lambda && !(*ridge_lambda >= 0.0)) throw std::invalid_argument("--ridge-lambda must be >= 0");
        return o;
    }
};

struct DynamicFlags {
    std::string basis = "poly2";
    double omega_max = 20.0;
    std::string behavior = "switchback";
    std::string probs_file;
    std::string backend = "model_gaussian";
    std::string dgp_file;

    void attach(CLI::App& cmd) {
        cmd.add_option("--basis", basis, "linear or poly2")->capture_default_str();
        cmd.add_option("--omega-max", omega_max, "ratio clip")->capture_default_str();
        cmd.add_option("--behavior", behavior, "switchback, probs or estimate")->capture_default_str();
        cmd.add_option("--probs-file", probs_file, "per-step P(A_t = 1) for --behavior probs");
        cmd.add_option("--ratio-backend", backend, "model_gaussian, oracle or plugin_uniform")
            ->capture_default_str();
        cmd.add_option("--dgp-file", dgp_file, "simulate sidecar with the true coefficients (oracle backend)");
    }

    // Reads --probs-file and --dgp-file, so call it in the load stage.
    [[nodiscard]] DynamicConfig config(double clip, std::optional<double> ridge_lambda, Stage& stage) const {
        DynamicConfig c;
        c.basis = FeatureMap::parse(basis);
        c.ridge_lambda = ridge_lambda;
        c.backend = parse_ratio_backend(backend);
        if (!(omega_max > 0.0)) throw std::invalid_argument("--omega-max must be > 0");
        c.ratio.omega_max = omega_max;
        if (behavior == "switchback") {
            c.behavior = BehaviorPolicy::switchback();
        } else if (behavior == "estimate") {
            c.behavior = BehaviorPolicy::estimated(clip);
        } else if (behavior == "probs") {
            if (probs_file.empty()) throw std::invalid_argument("--behavior probs needs --probs-file");
            stage = Stage::load;
            c.behavior = BehaviorPolicy::known(read_probabilities(probs_file));
            stage = Stage::config;
        } else {
            throw std::invalid_argument("--behavior must be switchback, probs or estimate");
        }
        c.behavior.clip = clip;
        if (c.backend == RatioBackend::oracle) {
            if (dgp_file.empty()) throw std::invalid_argument("--ratio-backend oracle needs --dgp-file");
            stage = Stage::load;
            const nlohmann::json sidecar = read_json(dgp_file);
            if (!sidecar.contains("coefficients")) throw DataError(dgp_file + ": no coefficients recorded");
            c.ratio.oracle = mdp_dynamics(mdp_coefficients_from_json(sidecar.at("coefficients")));
            stage = Stage::config;
        }
        return c;
    }
};

struct LearnerFlags {
    std::string learner = "poly2";
    std::string propensity_learner;
    std::optional<double> known_propensity;

    void attach(CLI::App& cmd) {
        cmd.add_option("--learner", learner, "feature map for the nuisance fits: linear or poly2")
            ->capture_default_str();
        cmd.add_option("--propensity-learner", propensity_learner, "feature map for the propensity (default --learner)");
        cmd.add_option("--known-propensity", known_propensity, "known P(A = 1); skips the propensity fit");
    }

    [[nodiscard]] LearnerConfig config(double clip, std::optional<double> ridge_lambda) const {
        LearnerConfig c;
        c.outcome_map = FeatureMap::parse(learner);
        c.propensity_map = FeatureMap::parse(propensity_learner.empty() ? learner : propensity_learner);
        c.clip = clip;
        c.ridge_lambda = ridge_lambda;
        if (known_propensity && !(*known_propensity > 0.0 && *known_propensity < 1.0)) {
            throw std::invalid_argument("--known-propensity must be in (0, 1)");
        }
        c.known_propensity = known_propensity;
        return c;
    }
};

// Simulation spec flags shared by simulate and power-study.
struct SpecFlags {
    std::string dgp;
    std::vector<std::string> hypotheses = {"H0_1"};
    std::size_t n = 300;
    std::size_t horizon = 24;
    std::optional<std::size_t> dim;
    std::vector<double> deltas = {0.0};
    std::vector<double> sigmas = {1.0};
    std::vector<int> dfs;
    std::string noise;
    std::vector<double> pas = {0.5};
    std::uint64_t coef_seed = 1;
    std::string assignment = "per_day";

    void attach(CLI::App& cmd, bool lists) {
        cmd.add_option("--dgp", dgp, "rand-iid, conf-iid, linear-mdp or nonlinear-mdp")->required();
        auto list = [&](CLI::Option* o) {
            if (lists) o->delimiter(',');
            else o->expected(1);
        };
        list(cmd.add_option("--hypothesis", hypotheses, "catalog hypothesis, e.g. H1_3")->capture_default_str());
        cmd.add_option("--n", n, "sample size (records or days)")->capture_default_str();
        cmd.add_option("--T", horizon, "horizon")->capture_default_str();
        cmd.add_option("--dim", dim, "state or covariate dimension");
        list(cmd.add_option("--delta", deltas, "MDP treatment strength")->capture_default_str());
        list(cmd.add_option("--sigma", sigmas, "noise SD sigma0")->capture_default_str());
        list(cmd.add_option("--df", dfs, "t-noise degrees of freedom (conf-iid)"));
        cmd.add_option("--noise", noise, "normal or t (conf-iid)");
        list(cmd.add_option("--pa", pas, "treatment probability (rand-iid)")->capture_default_str());
        cmd.add_option("--coef-seed", coef_seed, "MDP coefficient seed")->capture_default_str();
        cmd.add_option("--assignment", assignment, "MDP actions: per_day, carry_over or all_control")
            ->capture_default_str();
    }

    [[nodiscard]] bool iid() const { return dgp == "rand-iid" || dgp == "conf-iid"; }
    [[nodiscard]] bool mdp() const { return dgp == "linear-mdp" || dgp == "nonlinear-mdp"; }

    [[nodiscard]] std::vector<IidDgpSpec> iid_specs() const {
        std::vector<IidDgpSpec> out;
        const bool randomized = dgp == "rand-iid";
        const bool t_noise = noise == "t" || (noise.empty() && !dfs.empty());
        if (!noise.empty() && noise != "normal" && noise != "t") throw std::invalid_argument("--noise must be normal or t");
        for (const auto& h : hypotheses) {
            IidDgpSpec base;
            base.family = randomized ? IidFamily::randomized : IidFamily::confounded;
            base.hypothesis = h;
            base.n = n;
            base.dim = dim.value_or(randomized ? 2 : 3);
            if (randomized) {
                if (base.dim != 2) throw std::invalid_argument("rand-iid has dimension 2");
                if (t_noise) throw std::invalid_argument("rand-iid uses normal noise");
                for (double pa : pas) {
                    for (double s : sigmas) {
                        IidDgpSpec spec = base;
                        spec.p_a = pa;
                        spec.sigma0 = s;
                        out.push_back(spec);
                    }
                }
            } else if (t_noise) {
                for (int df : dfs.empty() ? std::vector<int>{3} : dfs) {
                    IidDgpSpec spec = base;
                    spec.noise = NoiseFamily::student_t;
                    spec.df = df;
                    out.push_back(spec);
                }
            } else {
                for (double s : sigmas) {
                    IidDgpSpec spec = base;
                    spec.sigma0 = s;
                    out.push_back(spec);
                }
            }
        }
        for (const auto& s : out) s.validate();
        return out;
    }

    [[nodiscard]] std::vector<MdpDgpSpec> mdp_specs() const {
        std::vector<MdpDgpSpec> out;
        for (double delta : deltas) {
            MdpDgpSpec spec;
            spec.kind = dgp == "linear-mdp" ? MdpKind::linear : MdpKind::nonlinear;
            spec.n = n;
            spec.horizon = horizon;
            spec.dim = dim.value_or(3);
            spec.delta = delta;
            spec.coef_seed = coef_seed;
            spec.assignment = parse_mdp_assignment(assignment);
            spec.validate();
            out.push_back(spec);
        }
        return out;
    }
};

int cmd_test_iid(const std::string& input, const std::string& output, const TestFlags& tf, const LearnerFlags& lf,
                 std::ostream& out, std::ostream& err) {
    return Runner(err).run([&](Stage& stage) {
        IidTestConfig config;
        config.test = tf.options();
        config.learner = lf.config(tf.clip, tf.ridge_lambda);
        stage = Stage::load;
        const IidDataset data = load_iid_csv(input);
        stage = Stage::compute;
        emit(dump(test_iid_report(data, config)), output, out);
    });
}

int cmd_test_dynamic(const std::string& input, const std::string& output, const TestFlags& tf,
                     const DynamicFlags& df, std::ostream& out, std::ostream& err) {
    return Runner(err).run([&](Stage& stage) {
        DynamicTestConfig config;
        config.test = tf.options();
        config.dynamic = df.config(tf.clip, tf.ridge_lambda, stage);
        stage = Stage::load;
        const PanelDataset panel = load_panel_csv(input);
        stage = Stage::compute;
        emit(dump(test_dynamic_report(panel, config)), output, out);
    });
}

int cmd_simulate(const SpecFlags& sf, std::uint64_t seed, const std::string& output, const std::string& sidecar_path,
                 std::ostream& err) {
    return Runner(err).run([&](Stage& stage) {
        if (output.empty()) throw std::invalid_argument("--output is required");
        const std::string sidecar = sidecar_path.empty() ? output + ".json" : sidecar_path;
        RngStream rng = RngStream(seed).child(kStreamData);
        nlohmann::json meta;
        meta["dgp"] = sf.dgp;
        meta["seed"] = seed;
        if (sf.iid()) {
            const auto specs = sf.iid_specs();
            if (specs.size() != 1) throw std::invalid_argument("simulate takes a single setting");
            stage = Stage::compute;
            const IidSample sample = gen_iid(specs[0], rng);
            const MonteCarloValue truth = iid_true_ate(specs[0]);
            write_iid_csv(output, sample.data);
            meta["spec"] = to_json(specs[0]);
            meta["true_ate"] = truth.value;
            meta["true_ate_se"] = truth.se;
        } else if (sf.mdp()) {
            const auto specs = sf.mdp_specs();
            if (specs.size() != 1) throw std::invalid_argument("simulate takes a single setting");
            stage = Stage::compute;
            const MdpCoefficients coef = draw_mdp_coefficients(specs[0]);
            const PanelDataset panel = gen_mdp(specs[0], coef, rng);
            write_panel_csv(output, panel);
            meta["spec"] = to_json(specs[0]);
            meta["coef_seed"] = specs[0].coef_seed;
            meta["coefficients"] = to_json(coef);
            meta["true_ate"] = mdp_true_ate(specs[0], coef);
        } else {
            throw std::invalid_argument("unknown --dgp '" + sf.dgp + "'");
        }
        emit(dump(meta), sidecar, std::cout);
    });
}

struct PowerFlags {
    std::size_t reps = 100;
    std::vector<std::string> methods = {"p-tab", "tab", "z"};
    std::string output;
    std::string input;
    std::vector<double> lambdas = {0.0};
    bool estimate_propensity = false;
};

int cmd_power_study(const SpecFlags& sf, const TestFlags& tf, const LearnerFlags& lf, const DynamicFlags& df,
                    const PowerFlags& pf, bool folds_given, std::ostream& out, std::ostream& err) {
    return Runner(err).run([&](Stage& stage) {
        PowerStudyConfig config;
        config.reps = pf.reps;
        config.methods.clear();
        for (const auto& m : pf.methods) {
            const PowerMethod method = parse_power_method(m);
            if (std::find(config.methods.begin(), config.methods.end(), method) == config.methods.end()) {
                config.methods.push_back(method);
            }
        }
        TestFlags flags = tf;
        const bool iid = sf.iid();
        if (!folds_given) flags.folds = iid ? 5 : 2;
        config.test = flags.options();
        config.learner = lf.config(tf.clip, tf.ridge_lambda);

        if (iid) {
            for (const auto& spec : sf.iid_specs()) {
                PowerCell cell;
                cell.kind = PowerCell::Kind::iid;
                cell.iid = spec;
                config.cells.push_back(cell);
            }
            // A randomized experiment knows its assignment probability.
            const bool randomized = sf.dgp == "rand-iid";
            if (randomized && !pf.estimate_propensity && !lf.known_propensity) {
                if (sf.pas.size() != 1) {
                    throw std::invalid_argument("several --pa values need --estimate-propensity or one run per value");
                }
                config.learner.known_propensity = sf.pas[0];
            }
        } else if (sf.mdp()) {
            config.dynamic = df.config(tf.clip, tf.ridge_lambda, stage);
            for (const auto& spec : sf.mdp_specs()) {
                PowerCell cell;
                cell.kind = PowerCell::Kind::mdp;
                cell.mdp = spec;
                config.cells.push_back(cell);
            }
        } else if (sf.dgp == "bootstrap") {
            if (pf.input.empty()) throw std::invalid_argument("--dgp bootstrap needs --input (source panel)");
            config.dynamic = df.config(tf.clip, tf.ridge_lambda, stage);
            if (config.dynamic.backend == RatioBackend::oracle) {
                throw std::invalid_argument("the oracle backend is not available for bootstrap environments");
            }
            for (double lambda : pf.lambdas) {
                if (!(lambda >= 0.0)) throw std::invalid_argument("--lambda must be >= 0");
                PowerCell cell;
                cell.kind = PowerCell::Kind::bootstrap;
                cell.lambda = lambda;
                config.cells.push_back(cell);
            }
            config.bootstrap_n = sf.n;
            stage = Stage::load;
            config.source = load_panel_csv(pf.input);
        } else {
            throw std::invalid_argument("unknown --dgp '" + sf.dgp + "'");
        }
        if (config.reps < 1) throw std::invalid_argument("--reps must be >= 1");
        stage = Stage::compute;
        const auto rows = run_power_study(config);
        std::ostringstream csv;
        write_power_csv(csv, rows);
        emit(csv.str(), pf.output, out);
    });
}

struct BootstrapFlags {
    std::string input;
    std::string env;
    double lambda = 0.0;
    std::string output;
    std::size_t emit_n = 0;
    std::size_t reps = 1;
    std::string emit_prefix = "panel";
    std::uint64_t seed = 1;
};

int cmd_bootstrap_env(const BootstrapFlags& bf, std::ostream& out, std::ostream& err) {
    return Runner(err).run([&](Stage& stage) {
        if (bf.input.empty() == bf.env.empty()) throw std::invalid_argument("give exactly one of --input and --env");
        if (!(bf.lambda >= 0.0)) throw std::invalid_argument("--lambda must be >= 0");
        if (bf.emit_n == 1) throw std::invalid_argument("--emit must be >= 2");
        if (bf.reps < 1) throw std::invalid_argument("--reps must be >= 1");
        BootstrapEnv env;
        stage = Stage::load;
        if (!bf.env.empty()) {
            env = bootstrap_env_from_json(read_json(bf.env));
            stage = Stage::compute;
        } else {
            const PanelDataset source = load_panel_csv(bf.input);
            stage = Stage::compute;
            env = build_bootstrap_env(source, bf.lambda);
        }
        if (bf.env.empty() || !bf.output.empty()) emit(dump(to_json(env)), bf.output, out);
        if (bf.emit_n == 0) return;
        const RngStream master(bf.seed);
        for (std::size_t k = 0; k < bf.reps; ++k) {
            RngStream rng = master.child(k);
            const PanelDataset panel = sample_bootstrap(env, bf.emit_n, rng);
            write_panel_csv(bf.emit_prefix + "_" + std::to_string(k + 1) + ".csv", panel);
        }
    });
}

struct DistFlags {
    std::string curve = "pdf";
    double kappa = 0.0;
    double sigma0 = 1.0;
    double alpha = 0.05;
    std::optional<double> from;
    std::optional<double> to;
    std::size_t points = 201;
    std::string output;
};

int cmd_dist(const DistFlags& f, std::ostream& out, std::ostream& err) {
    return Runner(err).run([&](Stage& stage) {
        const bool pdf = f.curve == "pdf";
        if (!pdf && f.curve != "power") throw std::invalid_argument("--curve must be pdf or power");
        const double lo = f.from.value_or(pdf ? -5.0 : 0.0);
        const double hi = f.to.value_or(pdf ? 5.0 : 5.0);
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) throw std::invalid_argument("need --from < --to");
        if (f.points < 2) throw std::invalid_argument("--points must be >= 2");
        if (!(f.alpha > 0.0 && f.alpha < 1.0)) throw std::invalid_argument("--alpha must be in (0, 1)");
        const dist::BanditParams fixed = dist::BanditParams::make(f.kappa, f.sigma0);
        stage = Stage::compute;
        std::ostringstream csv;
        csv << (pdf ? "y,pdf\n" : "kappa,power\n");
        const double step = (hi - lo) / static_cast<double>(f.points - 1);
        for (std::size_t i = 0; i < f.points; ++i) {
            const double v = i + 1 == f.points ? hi : lo + step * static_cast<double>(i);
            const double value = pdf ? dist::bandit_pdf(v, fixed)
                                     : dist::tab_rejection_probability(dist::BanditParams::make(v, f.sigma0), f.alpha);
            csv << format_double(v) << ',' << format_double(value) << '\n';
        }
        emit(csv.str(), f.output, out);
    });
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"P-TAB A/B testing: tests, simulations and bootstrap environments", "ptab"};
    app.require_subcommand(1);

    std::string input;
    std::string output;

    auto* test_iid = app.add_subcommand("test-iid", "test ATE = 0 on i.i.d. data");
    TestFlags iid_test;
    LearnerFlags iid_learner;
    test_iid->add_option("--input", input, "i.i.d. CSV (x1..xd,a,y)")->required();
    test_iid->add_option("--output", output, "report path (stdout when absent)");
    iid_test.attach(*test_iid, 5);
    iid_learner.attach(*test_iid);

    auto* test_dyn = app.add_subcommand("test-dynamic", "test ATE = 0 on panel data");
    TestFlags dyn_test;
    DynamicFlags dyn_flags;
    test_dyn->add_option("--input", input, "panel CSV (day,t,a,y,x1..xd)")->required();
    test_dyn->add_option("--output", output, "report path (stdout when absent)");
    dyn_test.attach(*test_dyn, 2);
    dyn_flags.attach(*test_dyn);

    auto* simulate = app.add_subcommand("simulate", "generate a dataset and its ground-truth sidecar");
    SpecFlags sim_spec;
    std::uint64_t sim_seed = 1;
    std::string sidecar;
    sim_spec.attach(*simulate, false);
    simulate->add_option("--seed", sim_seed, "data seed")->capture_default_str();
    simulate->add_option("--output", output, "dataset CSV path")->required();
    simulate->add_option("--sidecar", sidecar, "sidecar JSON path (default <output>.json)");

    auto* power = app.add_subcommand("power-study", "rejection rates over simulated replicates");
    SpecFlags pow_spec;
    TestFlags pow_test;
    LearnerFlags pow_learner;
    DynamicFlags pow_dyn;
    PowerFlags pow_flags;
    pow_spec.attach(*power, true);
    pow_test.attach(*power, 5);
    pow_learner.attach(*power);
    pow_dyn.attach(*power);
    power->add_option("--reps", pow_flags.reps, "replicates per setting")->capture_default_str();
    power->add_option("--methods", pow_flags.methods, "subset of p-tab,tab,dml/drl")->delimiter(',');
    power->add_option("--output", pow_flags.output, "results CSV (stdout when absent)");
    power->add_option("--input", pow_flags.input, "source panel for --dgp bootstrap");
    power->add_option("--lambda", pow_flags.lambdas, "improvement fractions for --dgp bootstrap")->delimiter(',');
    power->add_flag("--estimate-propensity", pow_flags.estimate_propensity,
                    "fit the propensity even for rand-iid");

    auto* boot = app.add_subcommand("bootstrap-env", "fit a bootstrap environment and optionally sample panels");
    BootstrapFlags boot_flags;
    boot->add_option("--input", boot_flags.input, "single-policy source panel CSV");
    boot->add_option("--env", boot_flags.env, "load a saved environment instead of fitting one");
    boot->add_option("--lambda", boot_flags.lambda, "improvement fraction")->capture_default_str();
    boot->add_option("--output", boot_flags.output, "environment JSON path (stdout when absent)");
    boot->add_option("--emit", boot_flags.emit_n, "days per sampled panel (0 = none)")->capture_default_str();
    boot->add_option("--reps", boot_flags.reps, "number of sampled panels")->capture_default_str();
    boot->add_option("--emit-prefix", boot_flags.emit_prefix, "sampled panels go to <prefix>_<k>.csv")
        ->capture_default_str();
    boot->add_option("--seed", boot_flags.seed, "sampling seed")->capture_default_str();

    auto* dist = app.add_subcommand("dist", "bandit density or TAB power curve");
    DistFlags dist_flags;
    dist->add_option("--curve", dist_flags.curve, "pdf or power")->capture_default_str();
    dist->add_option("--kappa", dist_flags.kappa, "drift kappa (pdf)")->capture_default_str();
    dist->add_option("--sigma0", dist_flags.sigma0, "scale sigma0 >= 1")->capture_default_str();
    dist->add_option("--alpha", dist_flags.alpha, "test level (power)")->capture_default_str();
    dist->add_option("--from", dist_flags.from, "grid start");
    dist->add_option("--to", dist_flags.to, "grid end");
    dist->add_option("--points", dist_flags.points, "grid size")->capture_default_str();
    dist->add_option("--output", dist_flags.output, "CSV path (stdout when absent)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }

    if (test_iid->parsed()) return cmd_test_iid(input, output, iid_test, iid_learner, out, err);
    if (test_dyn->parsed()) return cmd_test_dynamic(input, output, dyn_test, dyn_flags, out, err);
    if (simulate->parsed()) return cmd_simulate(sim_spec, sim_seed, output, sidecar, err);
    if (power->parsed()) {
        return cmd_power_study(pow_spec, pow_test, pow_learner, pow_dyn, pow_flags, power->count("--folds") > 0, out,
                               err);
    }
    if (boot->parsed()) return cmd_bootstrap_env(boot_flags, out, err);
    return cmd_dist(dist_flags, out, err);
}

}  // namespace ptab
