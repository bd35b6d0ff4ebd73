#ifndef FOPID_RNG_HPP
#define FOPID_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace fopid {

// Seeded RNG with hand-rolled distributions. std::uniform_real_distribution
// is implementation-defined, which would break the bitwise reproducibility
// contract across standard libraries; the raw mt19937_64 stream is not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller (one value per call, no cached spare,
    // so the stream position is call-count deterministic).
    double gaussian() {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(engine_() % n);
    }

private:
    std::mt19937_64 engine_;
};

// FNV-1a based mixing for deriving per-job seeds from (master seed, job id).
inline std::uint64_t derive_seed(std::uint64_t master, const std::string& id) {
    std::uint64_t h = 14695981039346656037ull ^ master;
    for (unsigned char c : id) {
        h ^= c;
        h *= 1099511628211ull;
    }
    h ^= master * 0x9e3779b97f4a7c15ull;
    return h;
}

}  // namespace fopid

#endif  // FOPID_RNG_HPP
