#ifndef WDS_RNG_HPP
#define WDS_RNG_HPP

#include <cstdint>
#include <random>

namespace wds {

// Seeded mt19937_64 with hand-rolled value mappings. The standard
// distributions are implementation-defined, so uniforms are derived
// directly from the raw 64-bit stream to keep traces reproducible
// across compilers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi] via rejection sampling.
    long long uniform_int(long long lo, long long hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return lo + static_cast<long long>(eng_());
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return lo + static_cast<long long>(v % span);
    }

    std::uint64_t next_u64() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

} // namespace wds

#endif
