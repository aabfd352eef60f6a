#include "ptab/sim/iid_dgp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace ptab {

namespace {

constexpr std::size_t kTruthDraws = 1'000'000;
constexpr std::uint64_t kTruthSeed = 0x7A3E5EEDULL;

const std::vector<std::string> kRandomizedHypotheses = {"H0_1", "H0_2", "H1_1", "H1_2", "H1_3"};
const std::vector<std::string> kConfoundedHypotheses = {"H0_1", "H0_2", "H0_3", "H0_4", "H0_5",
                                                        "H1_1", "H1_2", "H1_3", "H1_4", "H1_5"};

int hypothesis_index(const std::string& h) { return h.size() == 4 ? h[3] - '1' : -1; }

bool one_of(double v, std::initializer_list<double> set) {
    return std::any_of(set.begin(), set.end(), [v](double s) { return v == s; });
}

// 0.2^{1(sigma0=0.5)} 0.3^{1(sigma0=1)}
double randomized_scale(double sigma0) { return sigma0 == 0.5 ? 0.2 : (sigma0 == 1.0 ? 0.3 : 1.0); }

double randomized_tau(const IidDgpSpec& spec, std::span<const double> x) {
    const double f = randomized_scale(spec.sigma0);
    const double s = x[0] + x[1];
    const int k = hypothesis_index(spec.hypothesis);
    if (spec.is_null()) {
        return k == 0 ? 0.0 : f * std::sqrt(std::numbers::pi) / 16.0 * s * s * s;
    }
    switch (k) {
        case 0: return f * 0.8 * std::max(1.0, s);
        case 1: return f * 0.8 * std::abs(s);
        default: return f * 0.5 * s * s;
    }
}

double confounded_scale(const IidDgpSpec& spec) {
    if (spec.noise == NoiseFamily::normal) {
        return spec.sigma0 == 0.5 ? 0.5 : (spec.sigma0 == 1.0 ? 0.8 : 2.5);
    }
    return spec.df == 3 ? 2.0 : (spec.df == 10 ? 0.5 : 1.0);
}

double confounded_m0(const IidDgpSpec& spec, std::span<const double> x) {
    const double x2 = x[1];
    if (spec.is_null()) return x2 * x2;
    switch (hypothesis_index(spec.hypothesis)) {
        case 0: return 0.3;
        case 1: return spec.noise == NoiseFamily::normal ? 0.024 : 0.015;
        case 2: return x2;
        default: return x2 * x2;
    }
}

double confounded_tau(const IidDgpSpec& spec, std::span<const double> x) {
    const double x1 = x[0];
    const double x2 = x[1];
    const double x3 = x[2];
    const double r = confounded_scale(spec);
    const double c = std::cos(std::numbers::pi * x2 / 4.0);
    const double s = std::sin(std::numbers::pi * x2 / 4.0);
    const int k = hypothesis_index(spec.hypothesis);
    const bool normal = spec.noise == NoiseFamily::normal;
    if (spec.is_null()) {
        double tau0 = 0.0;
        switch (k) {
            case 0: tau0 = x2 * x2 - 4.0 / 3.0; break;
            case 1: tau0 = x1 * x2 * x2 * x3; break;
            case 2: tau0 = 2.0 * x3 * c; break;
            case 3: tau0 = 2.0 * x3 * s; break;
            default: tau0 = 2.0 * s; break;
        }
        return normal ? r * tau0 : tau0;
    }
    if (normal) {
        switch (k) {
            case 0: return r * 0.48 * (x1 <= 0.5 ? 1.0 : 0.0);
            case 1: return r * 0.032;
            case 2: return r * 0.7 * x1 * x2 * x2;
            case 3: return r * 1.6 * x1 * c;
            default: return r * 1.8 * x1 * c * c;
        }
    }
    switch (k) {
        case 0: return 0.48 * (x1 <= 0.5 ? 1.0 : 0.0);
        case 1: return 0.1;
        case 2: return 0.8 * r * x1 * x2 * x2;
        case 3: return 2.0 * r * x1 * c;
        default: return 2.0 * r * x1 * c * c;
    }
}

bool has_bernoulli_addon(const IidDgpSpec& spec) {
    if (spec.family != IidFamily::confounded || spec.is_null()) return false;
    const int k = hypothesis_index(spec.hypothesis);
    return k == 0 || k == 1;
}

double noise_draw(const IidDgpSpec& spec, RngStream& rng) {
    if (spec.noise == NoiseFamily::student_t) return rng.student_t(spec.df);
    return spec.sigma0 * rng.normal();
}

IidSample generate(const IidDgpSpec& spec, RngStream& rng) {
    const IidTruth truth{spec};
    RngStream x_rng = rng.child(0);
    RngStream a_rng = rng.child(1);
    RngStream e_rng = rng.child(2);
    Eigen::MatrixXd x = draw_iid_covariates(spec, spec.n, x_rng);
    std::vector<int> a(spec.n);
    Eigen::VectorXd y(static_cast<Eigen::Index>(spec.n));
    std::vector<double> row(static_cast<std::size_t>(x.cols()));
    for (std::size_t i = 0; i < spec.n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        for (std::size_t j = 0; j < row.size(); ++j) row[j] = x(r, static_cast<Eigen::Index>(j));
        a[i] = a_rng.bernoulli(truth.propensity(row)) ? 1 : 0;
        double value = 0.0;
        if (spec.family == IidFamily::randomized) {
            value = (row[0] - row[1] + 2.0) / 2.0 + a[i] * randomized_tau(spec, row);
        } else {
            const double mean = confounded_m0(spec, row) + a[i] * confounded_tau(spec, row);
            value = mean;
            if (has_bernoulli_addon(spec)) {
                const double q = std::clamp(mean, 0.0, 1.0);
                const double b = e_rng.bernoulli(q) ? 1.0 : 0.0;
                value += spec.noise == NoiseFamily::normal ? b - std::min(1.0, mean) : b;
            }
        }
        y[r] = value + noise_draw(spec, e_rng);
    }
    return {IidDataset(std::move(x), std::move(a), std::move(y)), iid_true_ate(spec).value};
}

}  // namespace

void IidDgpSpec::validate() const {
    if (n < 2) throw std::invalid_argument("n must be >= 2");
    if (family == IidFamily::randomized) {
        if (std::find(kRandomizedHypotheses.begin(), kRandomizedHypotheses.end(), hypothesis) ==
            kRandomizedHypotheses.end()) {
            throw std::invalid_argument("unknown randomized hypothesis '" + hypothesis + "'");
        }
        if (!one_of(p_a, {0.3, 0.5})) throw std::invalid_argument("p_a must be 0.3 or 0.5");
        if (noise != NoiseFamily::normal) throw std::invalid_argument("randomized catalog uses normal noise only");
        if (!one_of(sigma0, {0.5, 1.0, 3.0})) throw std::invalid_argument("sigma must be 0.5, 1 or 3");
        return;
    }
    if (std::find(kConfoundedHypotheses.begin(), kConfoundedHypotheses.end(), hypothesis) ==
        kConfoundedHypotheses.end()) {
        throw std::invalid_argument("unknown confounded hypothesis '" + hypothesis + "'");
    }
    if (dim != 3 && dim != 20 && dim != 50) throw std::invalid_argument("confounded dimension must be 3, 20 or 50");
    if (noise == NoiseFamily::normal && !one_of(sigma0, {0.5, 1.0, 3.0})) {
        throw std::invalid_argument("sigma must be 0.5, 1 or 3");
    }
    if (noise == NoiseFamily::student_t && df != 3 && df != 5 && df != 10) {
        throw std::invalid_argument("df must be 3, 5 or 10");
    }
}

std::string IidDgpSpec::label() const {
    auto num = [](double v) {
        std::string s = std::to_string(v);
        s.erase(s.find_last_not_of('0') + 1);
        if (s.back() == '.') s.pop_back();
        return s;
    };
    if (family == IidFamily::randomized) {
        return "rand-iid/" + hypothesis + "/pa=" + num(p_a) + "/sigma=" + num(sigma0);
    }
    const std::string noise_part = noise == NoiseFamily::normal ? "sigma=" + num(sigma0) : "df=" + std::to_string(df);
    return "conf-iid/" + hypothesis + "/d=" + std::to_string(dim) + "/" + noise_part;
}

double IidTruth::propensity(std::span<const double> x) const {
    return spec.family == IidFamily::randomized ? spec.p_a : x[0];
}

double IidTruth::mean_outcome(int a, std::span<const double> x) const {
    if (spec.family == IidFamily::randomized) {
        return (x[0] - x[1] + 2.0) / 2.0 + a * randomized_tau(spec, x);
    }
    const double mean = confounded_m0(spec, x) + a * confounded_tau(spec, x);
    if (has_bernoulli_addon(spec) && spec.noise == NoiseFamily::student_t) return mean + std::clamp(mean, 0.0, 1.0);
    return mean;
}

Eigen::MatrixXd draw_iid_covariates(const IidDgpSpec& spec, std::size_t n, RngStream& rng) {
    const auto rows = static_cast<Eigen::Index>(n);
    if (spec.family == IidFamily::randomized) {
        Eigen::MatrixXd x(rows, 2);
        for (Eigen::Index i = 0; i < rows; ++i) {
            x(i, 0) = rng.normal();
            x(i, 1) = rng.normal();
        }
        return x;
    }
    const auto d = static_cast<Eigen::Index>(spec.dim);
    const bool binary = !spec.is_null() && hypothesis_index(spec.hypothesis) <= 1;
    Eigen::MatrixXd x(rows, d);
    for (Eigen::Index i = 0; i < rows; ++i) {
        x(i, 0) = rng.uniform();
        for (Eigen::Index j = 1; j < 3; ++j) x(i, j) = binary ? (rng.bernoulli(0.5) ? 1.0 : 0.0) : rng.uniform(-2.0, 2.0);
        for (Eigen::Index j = 3; j < d; ++j) x(i, j) = rng.normal();
    }
    return x;
}

IidSample gen_randomized_iid(const IidDgpSpec& spec, RngStream& rng) {
    if (spec.family != IidFamily::randomized) throw std::invalid_argument("spec is not a randomized design");
    spec.validate();
    return generate(spec, rng);
}

IidSample gen_confounded_iid(const IidDgpSpec& spec, RngStream& rng) {
    if (spec.family != IidFamily::confounded) throw std::invalid_argument("spec is not a confounded design");
    spec.validate();
    return generate(spec, rng);
}

IidSample gen_iid(const IidDgpSpec& spec, RngStream& rng) {
    return spec.family == IidFamily::randomized ? gen_randomized_iid(spec, rng) : gen_confounded_iid(spec, rng);
}

MonteCarloValue iid_true_ate(const IidDgpSpec& spec) {
    spec.validate();
    static std::mutex mutex;
    static std::map<std::string, MonteCarloValue> cache;
    const std::string key = spec.label();
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    const IidTruth truth{spec};
    RngStream rng(kTruthSeed);
    constexpr std::size_t chunk = 100'000;
    double sum = 0.0;
    double sum_sq = 0.0;
    std::vector<double> row;
    for (std::size_t done = 0; done < kTruthDraws; done += chunk) {
        const Eigen::MatrixXd x = draw_iid_covariates(spec, chunk, rng);
        row.resize(static_cast<std::size_t>(x.cols()));
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            for (std::size_t j = 0; j < row.size(); ++j) row[j] = x(i, static_cast<Eigen::Index>(j));
            const double v = truth.cate(row);
            sum += v;
            sum_sq += v * v;
        }
    }
    const auto m = static_cast<double>(kTruthDraws);
    MonteCarloValue out;
    out.value = sum / m;
    out.se = std::sqrt(std::max(0.0, sum_sq / m - out.value * out.value) / m);
    std::lock_guard lock(mutex);
    cache.emplace(key, out);
    return out;
}

std::vector<IidDgpSpec> iid_catalog() {
    std::vector<IidDgpSpec> out;
    for (const auto& h : kRandomizedHypotheses) {
        for (double pa : {0.3, 0.5}) {
            for (double s : {0.5, 1.0, 3.0}) {
                IidDgpSpec spec;
                spec.family = IidFamily::randomized;
                spec.hypothesis = h;
                spec.p_a = pa;
                spec.sigma0 = s;
                spec.dim = 2;
                out.push_back(spec);
            }
        }
    }
    for (const auto& h : kConfoundedHypotheses) {
        for (std::size_t d : {3, 20, 50}) {
            for (double s : {0.5, 1.0, 3.0}) {
                IidDgpSpec spec;
                spec.family = IidFamily::confounded;
                spec.hypothesis = h;
                spec.dim = d;
                spec.sigma0 = s;
                out.push_back(spec);
            }
            for (int df : {3, 5, 10}) {
                IidDgpSpec spec;
                spec.family = IidFamily::confounded;
                spec.hypothesis = h;
                spec.dim = d;
                spec.noise = NoiseFamily::student_t;
                spec.df = df;
                out.push_back(spec);
            }
        }
    }
    return out;
}

nlohmann::json to_json(const IidDgpSpec& spec) {
    nlohmann::json j;
    j["family"] = spec.family == IidFamily::randomized ? "randomized" : "confounded";
    j["hypothesis"] = spec.hypothesis;
    j["n"] = spec.n;
    if (spec.family == IidFamily::randomized) {
        j["p_a"] = spec.p_a;
        j["sigma"] = spec.sigma0;
    } else {
        j["dim"] = spec.dim;
        j["noise"] = spec.noise == NoiseFamily::normal ? "normal" : "t";
        if (spec.noise == NoiseFamily::normal) {
            j["sigma"] = spec.sigma0;
        } else {
            j["df"] = spec.df;
        }
    }
    return j;
}

IidDgpSpec iid_spec_from_json(const nlohmann::json& j) {
    IidDgpSpec spec;
    try {
        const std::string family = j.at("family").get<std::string>();
        if (family == "randomized") {
            spec.family = IidFamily::randomized;
            spec.p_a = j.at("p_a").get<double>();
            spec.sigma0 = j.at("sigma").get<double>();
            spec.dim = 2;
        } else if (family == "confounded") {
            spec.family = IidFamily::confounded;
            spec.dim = j.at("dim").get<std::size_t>();
            const std::string noise = j.at("noise").get<std::string>();
            if (noise == "normal") {
                spec.noise = NoiseFamily::normal;
                spec.sigma0 = j.at("sigma").get<double>();
            } else if (noise == "t") {
                spec.noise = NoiseFamily::student_t;
                spec.df = j.at("df").get<int>();
            } else {
                throw std::invalid_argument("unknown noise family '" + noise + "'");
            }
        } else {
            throw std::invalid_argument("unknown family '" + family + "'");
        }
        spec.hypothesis = j.at("hypothesis").get<std::string>();
        spec.n = j.at("n").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad i.i.d. spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

}  // namespace ptab
