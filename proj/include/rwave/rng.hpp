#pragma once

#include <cmath>
#include <cstdint>

namespace rwave {

// SplitMix64 finalizer. Counter-based usage below keeps streams splittable
// and bit-identical across platforms and standard libraries.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Derives an independent child seed; used for per-realization streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ (index * 0x9e3779b97f4a7c15ull + 0x632be59bd9b4e019ull));
}

// Deterministic stream of uniforms/normals addressed by (seed, stream_id).
// Box-Muller on top of 53-bit uniforms; no std::normal_distribution, whose
// output differs between standard libraries.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : base_(derive_seed(seed, stream_id)) {}

    std::uint64_t next_u64() { return splitmix64(base_ + counter_++); }

    // Uniform on (0,1), offset keeps it away from 0 so log() below is safe.
    double next_unit() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53; }

    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u = next_unit();
        const double v = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 6.28318530717958647692528676655900577 * v;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace rwave
