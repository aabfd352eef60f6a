#pragma once

#include <cstdint>
#include <limits>

namespace ptab {

/**
 * @brief Counter-based, splittable 64-bit random stream.
 *
 * The n-th output is a pure function of (seed, stream id, n), so a stream can
 * be reconstructed anywhere from its descriptor. Child streams are derived by
 * hashing the parent stream id with a caller-chosen id; parallel workers get
 * independent draws without sharing state.
 *
 * Satisfies UniformRandomBitGenerator, but the samplers below are used
 * throughout the library so that results do not depend on the standard
 * library's distribution implementations.
 */
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() noexcept;
    /// Uniform on (lo, hi).
    double uniform(double lo, double hi) noexcept;
    /// Standard normal (Marsaglia polar method; the second variate is cached).
    double normal() noexcept;
    bool bernoulli(double p) noexcept;
    /// Unbiased integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound) noexcept;
    /// Student t with integer degrees of freedom.
    double student_t(int df) noexcept;

    /// Independent stream sharing this seed, keyed by `id`.
    [[nodiscard]] RngStream child(std::uint64_t id) const noexcept;

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream() const noexcept { return stream_; }
    [[nodiscard]] std::uint64_t position() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ptab
