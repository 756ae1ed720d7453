// Classical position correlator on the ring and a Monte Carlo estimate of
// the same phase-space average.
//
// Canonical weight exp(-beta l^2 / (2 m R^2)) with phi uniform on [0, 2 pi);
// free motion phi(t) = phi + l t / (m R^2). The average of
// R^2 cos(phi) cos(phi(t)) is (R^2/2) exp(-t^2 / (2 beta m R^2)).
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "ringcorr/errors.hpp"
#include "ringcorr/model.hpp"
#include "ringcorr/summation.hpp"

namespace ringcorr {

/// Identifier of the sampling scheme, recorded in CLI output headers.
inline constexpr std::string_view kGeneratorId = "mt19937_64+splitmix64-substreams+box-muller/v1";

inline double c1_classical(const ModelParams& p, double t) {
    const double r2 = p.radius() * p.radius();
    return 0.5 * r2 * std::exp(-t * t / (2.0 * p.beta() * p.mass() * r2));
}

struct McEstimate {
    double time = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;  // substream seed actually used for this point
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Seed of the independent stream for grid point `index`.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

// Uniform in [0, 1) with 53 random bits. Kept explicit rather than
// std::uniform_real_distribution, whose output is implementation-defined.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Box-Muller; the second variate of each pair is cached.
class NormalSampler {
public:
    double operator()(std::mt19937_64& gen) {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01(gen);  // (0, 1]
        const double u2 = uniform01(gen);
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(kTwoPi * u2);
        has_spare_ = true;
        return r * std::cos(kTwoPi * u2);
    }

private:
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace detail

/// Samples one grid point. Deterministic in (params, t, n_samples, stream_seed).
inline McEstimate mc_classical_point(const ModelParams& p, double t, std::int64_t n_samples,
                                     std::uint64_t stream_seed) {
    if (n_samples < 2) throw domain_error("mc_classical needs at least 2 samples for a standard error");
    const double inertia = p.mass() * p.radius() * p.radius();
    const double sigma_l = std::sqrt(inertia / p.beta());
    const double r2 = p.radius() * p.radius();

    std::mt19937_64 gen(stream_seed);
    detail::NormalSampler normal;
    // Welford running mean / variance.
    double mean = 0.0, m2 = 0.0;
    for (std::int64_t i = 0; i < n_samples; ++i) {
        const double phi = detail::kTwoPi * detail::uniform01(gen);
        const double l = sigma_l * normal(gen);
        const double v = r2 * std::cos(phi) * std::cos(phi + l * t / inertia);
        const double delta = v - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (v - mean);
    }
    const double n = static_cast<double>(n_samples);
    McEstimate est;
    est.time = t;
    est.mean = mean;
    est.std_error = std::sqrt(m2 / (n - 1.0)) / std::sqrt(n);
    est.samples = n_samples;
    est.seed = stream_seed;
    return est;
}

/// One estimate per grid time. Point i draws from the substream
/// substream_seed(seed, i), so results do not depend on evaluation order.
inline std::vector<McEstimate> mc_classical(const ModelParams& p, std::span<const double> t_grid,
                                            std::int64_t n_samples, std::uint64_t seed) {
    if (n_samples < 2) throw domain_error("mc_classical needs at least 2 samples for a standard error");
    std::vector<McEstimate> out;
    out.reserve(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i)
        out.push_back(mc_classical_point(p, t_grid[i], n_samples, detail::substream_seed(seed, i)));
    return out;
}

} // namespace ringcorr
