// Low-level helpers shared by the spectral and theta-type series.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>

#include "ringcorr/errors.hpp"

namespace ringcorr::detail {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Below this a tail bound is treated as zero regardless of the partial sum.
inline constexpr double kTailFloor = 1e-300;

namespace neumaier {

inline void add(double& sum, double& comp, double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
        comp += (sum - t) + x;
    else
        comp += (x - t) + sum;
    sum = t;
}

} // namespace neumaier

/// Neumaier-compensated accumulator for double or std::complex<double>
/// (compensation runs per component).
template <class T>
class CompensatedSum {
public:
    void add(const T& x) {
        if constexpr (std::is_same_v<T, double>) {
            neumaier::add(sum_re_, comp_re_, x);
        } else {
            neumaier::add(sum_re_, comp_re_, x.real());
            neumaier::add(sum_im_, comp_im_, x.imag());
        }
    }

    T value() const {
        if constexpr (std::is_same_v<T, double>)
            return sum_re_ + comp_re_;
        else
            return T(sum_re_ + comp_re_, sum_im_ + comp_im_);
    }

private:
    double sum_re_ = 0.0, comp_re_ = 0.0;
    double sum_im_ = 0.0, comp_im_ = 0.0;
};

/// Upper bound on first + first*r + first*r^2 + ... when successive term
/// ratios never exceed r. Infinite when r >= 1.
inline double geometric_tail(double first, double ratio) {
    if (first == 0.0) return 0.0;
    if (!(ratio < 1.0)) return std::numeric_limits<double>::infinity();
    return first / (1.0 - ratio);
}

inline bool tail_converged(double tail, double eps, double partial_magnitude) {
    return tail <= eps * partial_magnitude || tail < kTailFloor;
}

inline void charge_terms(std::int64_t& used, std::int64_t extra, std::int64_t cap,
                         const char* series) {
    if (used + extra > cap)
        throw resource_limit_error(std::string(series) + ": series did not converge within the term cap", cap);
    used += extra;
}

inline void require_positive_finite(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw domain_error(std::string(name) + " must be positive and finite");
}

inline void require_finite(std::complex<double> z, const char* name) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw domain_error(std::string(name) + " must be finite");
}

} // namespace ringcorr::detail
