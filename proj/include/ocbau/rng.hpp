#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace ocbau {

/// Seed/stream pair identifying one reproducible random stream. Identical
/// (seed, stream) values yield bit-identical draw sequences across runs;
/// distinct streams are statistically independent, so macroreplications can
/// run in parallel without coordination.
struct RngConfig {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

namespace detail {

// splitmix64 finalizer; full-period bijection on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Collapses a tuple of integer labels (policy index, replication index,
/// checkpoint index, ...) into a single stream id.
inline std::uint64_t derive_stream(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x2545f4914f6cdd1dULL;
    for (std::uint64_t p : parts) h = detail::mix64(h ^ detail::mix64(p));
    return h;
}

/// Deterministic generator keyed by (seed, stream). Normal variates use
/// Box-Muller on top of the engine's 64-bit output so the observation
/// sequence is fixed by the engine state alone.
class Rng {
  public:
    explicit Rng(RngConfig cfg)
        : engine_(detail::mix64(detail::mix64(cfg.seed) ^ derive_stream({cfg.stream}))) {}

    Rng(std::uint64_t seed, std::uint64_t stream) : Rng(RngConfig{seed, stream}) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform draw in (0, 1].
    double uniform01() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal draw.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586476925286766559 * u2;
        spare_ = mag * std::sin(ang);
        have_spare_ = true;
        return mag * std::cos(ang);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Standard Student-t draw with nu degrees of freedom.
    double student_t(double nu) {
        std::student_t_distribution<double> dist(nu);
        return dist(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace ocbau
