#include "ptab/tab/tab.hpp"

#include "ptab/core/error.hpp"
#include "ptab/core/folds.hpp"
#include "ptab/core/parallel.hpp"
#include "ptab/dist/normal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ptab {

namespace {

constexpr double kClipLow = 1e-15;
constexpr double kClipHigh = 1.0 - 1e-15;

void require_spread(const PseudoOutcomes& pseudo) {
    if (pseudo.degenerate()) {
        throw DegenerateSampleError("pseudo-outcomes have zero sample variance (all values identical)");
    }
}

}  // namespace

std::string Combiner::name() const {
    return kind == CombinerKind::cauchy ? "cauchy" : "quantile";
}

std::vector<double> standardize_rewards(const PseudoOutcomes& pseudo) {
    require_spread(pseudo);
    const double scale = std::sqrt(static_cast<double>(pseudo.size())) * pseudo.sigma_hat();
    std::vector<double> r(pseudo.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = pseudo.mu_hat()[static_cast<Eigen::Index>(i)] / scale;
    return r;
}

WalkTrace tab_walk(std::span<const double> rewards, int theta1) {
    if (rewards.empty()) throw std::invalid_argument("tab_walk needs at least one reward");
    if (theta1 != 0 && theta1 != 1) throw std::invalid_argument("theta1 must be 0 or 1");
    WalkTrace trace;
    trace.rewards.assign(rewards.begin(), rewards.end());
    trace.sums.resize(rewards.size() + 1);
    trace.theta.resize(rewards.size());
    trace.sums[0] = 0.0;
    int theta = theta1;
    for (std::size_t t = 0; t < rewards.size(); ++t) {
        if (t > 0) theta = trace.sums[t] > 0.0 ? 0 : 1;
        trace.theta[t] = theta;
        trace.sums[t + 1] = trace.sums[t] + (1 - 2 * theta) * rewards[t];
    }
    return trace;
}

double tab_walk_end(std::span<const double> rewards, int theta1) noexcept {
    double s = (1 - 2 * theta1) * rewards[0];
    for (std::size_t t = 1; t < rewards.size(); ++t) {
        s = s > 0.0 ? s + rewards[t] : s - rewards[t];
    }
    return s;
}

double tab_p_value(double t_n) noexcept { return 2.0 * dist::std_normal_cdf(-std::abs(t_n)); }

TabStatistic tab_test(const PseudoOutcomes& pseudo, int theta1) {
    const auto rewards = standardize_rewards(pseudo);
    if (theta1 != 0 && theta1 != 1) throw std::invalid_argument("theta1 must be 0 or 1");
    const double t = tab_walk_end(rewards, theta1);
    return {t, tab_p_value(t), theta1};
}

TabStatistic tab_test(const PseudoOutcomes& pseudo, RngStream& rng) {
    const int theta1 = rng.bernoulli(0.5) ? 1 : 0;
    return tab_test(pseudo, theta1);
}

std::vector<std::size_t> permute(std::size_t n, RngStream& rng) { return random_permutation(n, rng); }

double cauchy_combine(std::span<const double> ps) {
    if (ps.empty()) throw std::invalid_argument("cauchy_combine needs at least one p-value");
    double sum = 0.0;
    for (double p : ps) sum += std::tan((0.5 - std::clamp(p, kClipLow, kClipHigh)) * std::numbers::pi);
    const double t = sum / static_cast<double>(ps.size());
    return 0.5 - std::atan(t) / std::numbers::pi;
}

double quantile_combine(std::span<const double> ps, double gamma) {
    if (ps.empty()) throw std::invalid_argument("quantile_combine needs at least one p-value");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
    std::vector<double> sorted(ps.begin(), ps.end());
    std::sort(sorted.begin(), sorted.end());
    const auto b = static_cast<double>(sorted.size());
    auto k = static_cast<std::size_t>(std::ceil(gamma * b));
    k = std::clamp<std::size_t>(k, 1, sorted.size());
    return std::min(1.0, sorted[k - 1] / gamma);
}

double combine(std::span<const double> ps, const Combiner& combiner) {
    return combiner.kind == CombinerKind::cauchy ? cauchy_combine(ps) : quantile_combine(ps, combiner.gamma);
}

CombinedTest p_tab(const PseudoOutcomes& pseudo, std::size_t permutations, const Combiner& combiner,
                   const RngStream& rng, std::size_t threads) {
    if (permutations < 1) throw std::invalid_argument("number of permutations must be >= 1");
    if (combiner.kind == CombinerKind::quantile && !(combiner.gamma > 0.0 && combiner.gamma < 1.0)) {
        throw std::invalid_argument("gamma must lie in (0, 1)");
    }
    const auto rewards = standardize_rewards(pseudo);
    const std::size_t n = rewards.size();

    CombinedTest out;
    out.method = combiner;
    out.permutations = permutations;
    out.seed = rng.seed();
    out.stream = rng.stream();
    out.per_perm_p.resize(permutations);
    out.per_perm_t.resize(permutations);
    out.per_perm_theta1.resize(permutations);

    parallel_for(permutations, threads, [&](std::size_t b) {
        const RngStream replicate = rng.child(b);
        RngStream perm_rng = replicate.child(0);
        RngStream theta_rng = replicate.child(1);
        const auto order = permute(n, perm_rng);
        std::vector<double> permuted(n);
        for (std::size_t i = 0; i < n; ++i) permuted[i] = rewards[order[i]];
        const int theta1 = theta_rng.bernoulli(0.5) ? 1 : 0;
        const double t = tab_walk_end(permuted, theta1);
        out.per_perm_t[b] = t;
        out.per_perm_p[b] = tab_p_value(t);
        out.per_perm_theta1[b] = theta1;
    });
    out.combined_p = combine(out.per_perm_p, combiner);
    return out;
}

double z_test(const PseudoOutcomes& pseudo) {
    require_spread(pseudo);
    const double stat = std::sqrt(static_cast<double>(pseudo.size())) * pseudo.mu_bar() / pseudo.sigma_hat();
    return dist::std_normal_cdf(-stat);
}

}  // namespace ptab
