#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace hsto {

/// Philox4x32-10 block cipher: maps (counter, key) to four independent 32-bit words.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

/// Stateless Gaussian source keyed by a 64-bit seed; draw (step, mode, stream) is a pure function.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed, std::uint32_t stream = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    std::uint64_t seed() const { return (std::uint64_t{key_[1]} << 32) | key_[0]; }
    std::uint32_t stream() const { return stream_; }

    /// Standard normal draw by Box-Muller from two 53-bit uniforms in (0, 1).
    double normal(std::uint64_t step, std::uint32_t mode) const {
        const auto w = Philox4x32::generate(
            {static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32), mode, stream_},
            key_);
        const double u1 = to_unit((std::uint64_t{w[0]} << 32) | w[1]);
        const double u2 = to_unit((std::uint64_t{w[2]} << 32) | w[3]);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform draw in (0, 1) from the same counter space.
    double uniform(std::uint64_t step, std::uint32_t mode) const {
        const auto w = Philox4x32::generate(
            {static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32), mode, stream_},
            key_);
        return to_unit((std::uint64_t{w[0]} << 32) | w[1]);
    }

private:
    static double to_unit(std::uint64_t x) {
        return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
    }

    Philox4x32::Key key_;
    std::uint32_t stream_;
};

/// Brownian increments of K independent scalar motions on a fine lattice.
///
/// The increment of coarse step n with `substeps` m sums the fine draws
/// n*m .. n*m+m-1, each N(0, dt/m), so paths at dt, dt/2, dt/4 are coupled.
class BrownianPath {
public:
    explicit BrownianPath(std::uint64_t seed, std::uint32_t stream = 0) : gauss_(seed, stream) {}

    std::vector<double> increment(std::uint64_t step, double dt, int K, int substeps = 1) const {
        std::vector<double> dW(static_cast<std::size_t>(K), 0.0);
        const double scale = std::sqrt(dt / substeps);
        for (int k = 0; k < K; ++k) {
            double s = 0.0;
            for (int j = 0; j < substeps; ++j)
                s += gauss_.normal(step * static_cast<std::uint64_t>(substeps) + j,
                                   static_cast<std::uint32_t>(k));
            dW[k] = scale * s;
        }
        return dW;
    }

    const GaussianStream& gaussian() const { return gauss_; }

private:
    GaussianStream gauss_;
};

} // namespace hsto
