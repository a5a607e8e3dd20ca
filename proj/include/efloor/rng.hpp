#pragma once

#include <cmath>
#include <cstdint>

namespace efloor {

// Counter-mode generator: every draw is a keyed hash of (seed, stream,
// frame, counter), so any frame's noise is reproducible regardless of how
// frames are scheduled across workers.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t frame)
        : base_(mix(mix(mix(seed) ^ stream) ^ frame)) {}

    std::uint64_t next_u64() {
        return mix(base_ + (++n_) * 0x9e3779b97f4a7c15ULL);
    }

    // Uniform on (0, 1), never returning either endpoint.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; pairs are cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double t = 6.283185307179586476925286766559 * uniform();
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

  private:
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t base_;
    std::uint64_t n_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace efloor
