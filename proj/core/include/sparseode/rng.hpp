#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sparseode {

// Deterministic random source. The engine is std::mt19937_64 (its output
// sequence is pinned by the standard); uniforms and normals are generated
// with explicit arithmetic rather than std:: distributions, whose mapping
// from engine output is implementation defined. This keeps runs reproducible
// bit for bit for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // splitmix64 finalizer; decorrelates consecutive integers.
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Seed of the independent stream for one replicate of a batch run.
    static std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
        return mix(seed + index);
    }
    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        return Rng(substream_seed(seed, index));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Marsaglia polar method; one spare value cached between calls.
    double normal(double mean = 0.0, double sd = 1.0) {
        if (has_spare_) {
            has_spare_ = false;
            return mean + sd * spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        has_spare_ = true;
        return mean + sd * u * scale;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace sparseode
