#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>
#include <cmath>

namespace rdo {

// One realization of the uncertain inputs: chord Reynolds number and
// aerodynamic model index (1..5).
struct UncertainInput {
    double re_c = 0.0;
    int model_id = 0;
};

struct UncertaintyConfig {
    double re_min = 1e6;
    double re_max = 1e7;
    int model_count = 5;
    bool log_uniform_re = false;  // config toggle; default is uniform
};

// Counter-based RNG built on the splitmix64 finalizer. Every draw is a pure
// function of (seed, iteration, sample), so batches are reproducible
// regardless of evaluation order or worker count.
namespace detail {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamKey = 0xC2B2AE3D27D4EB4FULL;

inline std::uint64_t splitmix_fin(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64() {
        state_ += detail::kGolden;
        return detail::splitmix_fin(state_);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

// Independent substream keyed by (seed, iteration, sample).
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t iteration,
                            std::uint64_t sample) {
    std::uint64_t s = detail::splitmix_fin(seed + detail::kGolden * iteration);
    s = detail::splitmix_fin(s + detail::kStreamKey * sample);
    return SplitMix64(s);
}

// Draw one uncertain-input realization from its dedicated substream.
inline UncertainInput sample_xi(std::uint64_t seed, std::uint64_t iteration,
                                std::uint64_t sample,
                                const UncertaintyConfig& cfg = {}) {
    SplitMix64 g = substream(seed, iteration, sample);
    const double u1 = g.next_double();
    const double u2 = g.next_double();
    UncertainInput xi;
    if (cfg.log_uniform_re) {
        const double lmin = std::log(cfg.re_min);
        const double lmax = std::log(cfg.re_max);
        xi.re_c = std::exp(lmin + u1 * (lmax - lmin));
    } else {
        xi.re_c = cfg.re_min + u1 * (cfg.re_max - cfg.re_min);
    }
    const int m = static_cast<int>(u2 * cfg.model_count);
    xi.model_id = 1 + (m < cfg.model_count ? m : cfg.model_count - 1);
    return xi;
}

inline std::vector<UncertainInput> sample_batch(std::uint64_t seed,
                                                std::uint64_t iteration, int n,
                                                const UncertaintyConfig& cfg = {}) {
    if (n < 1) throw std::invalid_argument("sample_batch: n must be >= 1");
    std::vector<UncertainInput> batch(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        batch[static_cast<std::size_t>(i)] =
            sample_xi(seed, iteration, static_cast<std::uint64_t>(i), cfg);
    return batch;
}

// The deterministic single-point operating condition.
inline UncertainInput dsp_input() { return UncertainInput{5e6, 1}; }

}  // namespace rdo
