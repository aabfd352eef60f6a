#include "ptab/core/rng.hpp"

#include <cmath>

namespace ptab {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// Stafford's variant 13 of the splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(mix64(seed + kGolden) ^ mix64(stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) noexcept
    : seed_(seed), stream_(stream), key_(derive_key(seed, stream)) {}

RngStream::result_type RngStream::operator()() noexcept {
    const std::uint64_t c = counter_++;
    // Two rounds keyed differently; one round of splitmix on a counter has
    // visible correlations between neighbouring keys.
    return mix64(mix64(key_ ^ (c * kGolden)) + key_);
}

double RngStream::uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

double RngStream::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * f;
    has_spare_ = true;
    return u * f;
}

bool RngStream::bernoulli(double p) noexcept { return uniform() < p; }

std::uint64_t RngStream::below(std::uint64_t bound) noexcept {
    // Lemire's nearly divisionless method.
    std::uint64_t x = (*this)();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            x = (*this)();
            m = static_cast<__uint128_t>(x) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double RngStream::student_t(int df) noexcept {
    const double z = normal();
    double chi2 = 0.0;
    for (int k = 0; k < df; ++k) {
        const double g = normal();
        chi2 += g * g;
    }
    return z / std::sqrt(chi2 / df);
}

RngStream RngStream::child(std::uint64_t id) const noexcept {
    return RngStream(seed_, mix64(stream_ ^ mix64(id + kGolden)) + id);
}

}  // namespace ptab
