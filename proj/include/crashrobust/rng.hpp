#pragma once

// Seeded substreams: one engine per (master seed, stream id, channel). A path's draws
// depend only on these three numbers, never on which worker simulates it.

#include <cstdint>
#include <random>

namespace crashrobust {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct RngSpec {
    std::uint64_t master_seed = 42;
};

class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t channel = 0) {
        std::uint64_t s = master_seed;
        const std::uint64_t a = splitmix64(s);
        s ^= stream * 0xD1B54A32D192ED03ULL;
        const std::uint64_t b = splitmix64(s);
        s ^= channel * 0x8CB92BA72F3D8DD7ULL;
        const std::uint64_t c = splitmix64(s);
        std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                          static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                          static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
        engine_.seed(seq);
    }

    /// Uniform on [0, 1).
    double uniform() { return std::generate_canonical<double, 53>(engine_); }

    double normal() { return normal_(engine_); }

    double gamma(double shape, double scale) {
        if (shape <= 0.0) return 0.0;
        return std::gamma_distribution<double>(shape, scale)(engine_);
    }

    /// Chi-square with `df` degrees of freedom (0 for df == 0).
    double chi_square(double df) { return gamma(0.5 * df, 2.0); }

    std::uint64_t poisson(double mean) {
        if (!(mean > 0.0)) return 0;
        return static_cast<std::uint64_t>(std::poisson_distribution<long long>(mean)(engine_));
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace crashrobust
