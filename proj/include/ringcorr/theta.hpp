// Theta-type kernels of the ring correlator.
//
//   S(alpha, z) = sum_n exp(-alpha n^2 / 2) cos(n z)
//   F(alpha, z) = exp(i z / 2) S(alpha, z)
//   g(alpha, z) = exp(z^2 / (2 alpha)) S(alpha, z),   g(z + i m alpha) = g(z)
//
// S is available in two dual forms. The direct series converges like
// exp(-alpha n^2 / 2); the Poisson-resummed series
//
//   S = sqrt(2 pi / alpha) sum_n exp(-(z + 2 n pi)^2 / (2 alpha))
//
// converges like exp(-2 pi^2 n^2 / alpha). They cost the same at alpha = 2 pi,
// which is where Representation::Auto switches. F additionally has a
// half-integer form
//
//   F = exp(-alpha/8) sum_n exp(-alpha (n+1/2)^2 / 2) cos((n+1/2)(z - i alpha/2)).
//
// Every call reports the number of indices summed and a rigorous bound on the
// truncated tail. Complex cosines are never formed as cos * cosh products:
// each exponential is evaluated once with its full complex exponent so that
// growing and decaying factors cancel before exponentiation.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string_view>

#include "ringcorr/errors.hpp"
#include "ringcorr/model.hpp"
#include "ringcorr/summation.hpp"

namespace ringcorr {

/// Dimensionless time z = t / tau_b; the imaginary part carries KMS shifts.
using ComplexTime = std::complex<double>;

enum class Representation { Auto, Direct, Poisson, HalfInteger };

inline std::string_view to_string(Representation r) {
    switch (r) {
    case Representation::Auto: return "auto";
    case Representation::Direct: return "direct";
    case Representation::Poisson: return "poisson";
    case Representation::HalfInteger: return "half";
    }
    return "?";
}

struct SummationPolicy {
    double eps = 1e-12;
    std::int64_t max_terms = kDefaultMaxTerms;
    Representation representation = Representation::Auto;

    void validate() const {
        if (!(eps > 0.0) || !(eps < 1.0)) throw domain_error("policy eps must lie in (0, 1)");
        if (max_terms < 3) throw domain_error("policy max_terms must be at least 3");
    }

    SummationPolicy with(Representation r) const {
        SummationPolicy p = *this;
        p.representation = r;
        return p;
    }
};

struct KernelValue {
    std::complex<double> value;
    std::int64_t terms_used = 0;
    double tail_bound = 0.0;
    // Sum of |term| over the terms actually added. Rounding in the evaluated
    // value scales with this, not with |value|, when the series cancels.
    double magnitude_sum = 0.0;
};

/// Representation Auto resolves to for a given alpha.
inline Representation select_representation(double alpha, Representation requested) {
    if (requested != Representation::Auto) return requested;
    return alpha >= detail::kTwoPi ? Representation::Direct : Representation::Poisson;
}

namespace detail {

using cplx = std::complex<double>;

inline void check_kernel_args(double alpha, ComplexTime z, const SummationPolicy& policy) {
    require_positive_finite(alpha, "alpha");
    require_finite(z, "z");
    if (std::abs(z.real()) > 1e12) throw domain_error("|Re z| too large for phase reduction");
    policy.validate();
}

// Direct series for S. Real z takes a purely real path so that S is exactly
// real and exactly even in z.
inline KernelValue direct_series(double alpha, ComplexTime z, const SummationPolicy& policy) {
    const double x = z.real();
    const double y = z.imag();
    const double ay = std::abs(y);
    const double half_alpha = 0.5 * alpha;

    // Majorant of the |n| = k pair: 2 exp(-alpha k^2 / 2 + k |y|).
    auto majorant = [&](double k) { return 2.0 * std::exp(-half_alpha * k * k + k * ay); };

    KernelValue out;
    out.terms_used = 1;
    out.magnitude_sum = 1.0;

    if (y == 0.0) {
        CompensatedSum<double> acc;
        acc.add(1.0);
        for (std::int64_t n = 1;; ++n) {
            charge_terms(out.terms_used, 2, policy.max_terms, "theta_direct");
            const double nd = static_cast<double>(n);
            const double w = 2.0 * std::exp(-half_alpha * nd * nd);
            acc.add(w * std::cos(nd * x));
            out.magnitude_sum += w;
            const double ratio = std::exp(-half_alpha * (2.0 * nd + 3.0));
            out.tail_bound = geometric_tail(majorant(nd + 1.0), ratio);
            if (tail_converged(out.tail_bound, policy.eps, std::abs(acc.value()))) break;
        }
        out.value = acc.value();
        return out;
    }

    CompensatedSum<cplx> acc;
    acc.add(cplx(1.0, 0.0));
    for (std::int64_t n = 1;; ++n) {
        charge_terms(out.terms_used, 2, policy.max_terms, "theta_direct");
        const double nd = static_cast<double>(n);
        const double gauss = -half_alpha * nd * nd;
        // exp(-alpha n^2/2) (e^{inz} + e^{-inz}) with i n z = -n y + i n x.
        const cplx plus = std::exp(cplx(gauss - nd * y, nd * x));
        const cplx minus = std::exp(cplx(gauss + nd * y, -nd * x));
        acc.add(plus + minus);
        out.magnitude_sum += std::abs(plus) + std::abs(minus);
        const double ratio = std::exp(-half_alpha * (2.0 * nd + 3.0) + ay);
        out.tail_bound = geometric_tail(majorant(nd + 1.0), ratio);
        if (tail_converged(out.tail_bound, policy.eps, std::abs(acc.value()))) break;
    }
    out.value = acc.value();
    return out;
}

// Sum over shifted Gaussians centred on the index nearest the saddle
// n* = -x / (2 pi), walking outward one step on each side per iteration.
// log_term(n) is the complex log of term n, and |term n| equals
// exp(base - u^2 / (2 alpha)) with u = x + 2 pi n, which is what the tail
// bounds use.
template <class LogTerm>
KernelValue shifted_gaussian_series(double alpha, double x, double base, LogTerm&& log_term,
                                    const SummationPolicy& policy, const char* series) {
    const std::int64_t centre = static_cast<std::int64_t>(std::llround(-x / kTwoPi));
    const double d = x + kTwoPi * static_cast<double>(centre);
    const double inv_two_alpha = 1.0 / (2.0 * alpha);

    // Magnitude of the term at offset u = x + 2 pi n from the saddle.
    auto magnitude = [&](double u) { return std::exp(base - u * u * inv_two_alpha); };
    // Tail beyond the term at offset u (|u| increasing outward by 2 pi per step).
    auto side_tail = [&](double u) {
        const double a = std::abs(u) + kTwoPi;
        const double b = a + kTwoPi;
        const double ratio = std::exp(-(b * b - a * a) * inv_two_alpha);
        return geometric_tail(magnitude(a), ratio);
    };

    KernelValue out;
    CompensatedSum<cplx> acc;
    {
        const cplx t = std::exp(log_term(centre));
        acc.add(t);
        out.magnitude_sum = std::abs(t);
        out.terms_used = 1;
    }
    for (std::int64_t k = 1;; ++k) {
        charge_terms(out.terms_used, 2, policy.max_terms, series);
        const cplx right = std::exp(log_term(centre + k));
        const cplx left = std::exp(log_term(centre - k));
        acc.add(right);
        acc.add(left);
        out.magnitude_sum += std::abs(right) + std::abs(left);
        const double kd = static_cast<double>(k);
        const double u_right = d + kTwoPi * kd;  // >= pi
        const double u_left = d - kTwoPi * kd;   // <= -pi
        out.tail_bound = side_tail(u_right) + side_tail(u_left);
        if (tail_converged(out.tail_bound, policy.eps, std::abs(acc.value()))) break;
    }
    out.value = acc.value();
    return out;
}

inline KernelValue poisson_series(double alpha, ComplexTime z, const SummationPolicy& policy) {
    const double log_prefactor = 0.5 * std::log(kTwoPi / alpha);
    const double y = z.imag();
    const double inv_two_alpha = 1.0 / (2.0 * alpha);
    auto log_term = [&](std::int64_t n) {
        const cplx w = z + kTwoPi * static_cast<double>(n);
        return log_prefactor - w * w * inv_two_alpha;
    };
    // |exp(-(z + 2 pi n)^2 / 2 alpha)| = exp((y^2 - u^2) / 2 alpha), u = x + 2 pi n.
    const double base = log_prefactor + y * y * inv_two_alpha;
    return shifted_gaussian_series(alpha, z.real(), base, log_term, policy, "theta_poisson");
}

// Half-integer series for F. Indices n and -n-1 contribute equally, so the
// sum runs over h = 1/2, 3/2, ... with weight 2.
inline KernelValue half_integer_series(double alpha, ComplexTime z, const SummationPolicy& policy) {
    const cplx w = z - cplx(0.0, 0.5 * alpha);
    const double x = w.real();
    const double v = w.imag();
    const double av = std::abs(v);
    const double offset = -alpha / 8.0;
    auto majorant = [&](double h) { return 2.0 * std::exp(offset - 0.5 * alpha * h * h + h * av); };

    KernelValue out;
    CompensatedSum<cplx> acc;
    for (std::int64_t j = 0;; ++j) {
        charge_terms(out.terms_used, 2, policy.max_terms, "theta_half_integer");
        const double h = static_cast<double>(j) + 0.5;
        const double gauss = offset - 0.5 * alpha * h * h;
        // e^{-alpha/8} e^{-alpha h^2/2} (e^{ihw} + e^{-ihw}),  i h w = -h v + i h x.
        const cplx plus = std::exp(cplx(gauss - h * v, h * x));
        const cplx minus = std::exp(cplx(gauss + h * v, -h * x));
        acc.add(plus + minus);
        out.magnitude_sum += std::abs(plus) + std::abs(minus);
        const double ratio = std::exp(-0.5 * alpha * (2.0 * h + 3.0) + av);
        out.tail_bound = geometric_tail(majorant(h + 1.0), ratio);
        if (tail_converged(out.tail_bound, policy.eps, std::abs(acc.value()))) break;
    }
    out.value = acc.value();
    return out;
}

inline KernelValue scaled(KernelValue k, cplx factor) {
    const double m = std::abs(factor);
    k.value *= factor;
    k.tail_bound *= m;
    k.magnitude_sum *= m;
    return k;
}

// Largest exponent whose exp() is comfortably finite.
inline constexpr double kMaxExponent = 700.0;

} // namespace detail

/// S(alpha, z) by the direct cosine series.
inline KernelValue theta_direct(double alpha, ComplexTime z, const SummationPolicy& policy = {}) {
    detail::check_kernel_args(alpha, z, policy);
    return detail::direct_series(alpha, z, policy);
}

/// S(alpha, z) by the Poisson-resummed series of shifted Gaussians.
inline KernelValue theta_poisson(double alpha, ComplexTime z, const SummationPolicy& policy = {}) {
    detail::check_kernel_args(alpha, z, policy);
    return detail::poisson_series(alpha, z, policy);
}

/// S(alpha, z) using the representation chosen by policy (HalfInteger is
/// routed through F and divided by its phase).
inline KernelValue theta_kernel(double alpha, ComplexTime z, const SummationPolicy& policy = {});

/// F(alpha, z) in the half-integer form.
inline KernelValue F_half_integer(double alpha, ComplexTime z, const SummationPolicy& policy = {}) {
    detail::check_kernel_args(alpha, z, policy);
    return detail::half_integer_series(alpha, z, policy);
}

/// F(alpha, z) = exp(iz/2) S(alpha, z). Auto selects Direct for alpha >= 2 pi
/// and Poisson below.
inline KernelValue F_kernel(double alpha, ComplexTime z, const SummationPolicy& policy = {}) {
    detail::check_kernel_args(alpha, z, policy);
    const detail::cplx phase = std::exp(detail::cplx(0.0, 0.5) * z);
    switch (select_representation(alpha, policy.representation)) {
    case Representation::Direct: return detail::scaled(detail::direct_series(alpha, z, policy), phase);
    case Representation::HalfInteger: return detail::half_integer_series(alpha, z, policy);
    default: return detail::scaled(detail::poisson_series(alpha, z, policy), phase);
    }
}

inline KernelValue theta_kernel(double alpha, ComplexTime z, const SummationPolicy& policy) {
    detail::check_kernel_args(alpha, z, policy);
    switch (select_representation(alpha, policy.representation)) {
    case Representation::Direct: return detail::direct_series(alpha, z, policy);
    case Representation::HalfInteger:
        return detail::scaled(detail::half_integer_series(alpha, z, policy),
                              std::exp(detail::cplx(0.0, -0.5) * z));
    default: return detail::poisson_series(alpha, z, policy);
    }
}

/// g(alpha, z) = exp(z^2 / 2 alpha) S(alpha, z).
///
/// Auto and Poisson fold the Gaussian prefactor into each shifted-Gaussian
/// term, leaving exp(-2 pi n (z + pi n) / alpha); the imaginary period i alpha
/// then shows up term by term as a phase exp(-2 pi i n m). Direct and
/// HalfInteger multiply the prefactor onto S explicitly.
///
/// Throws range_error when the largest term (or the explicit prefactor)
/// would overflow; F_kernel stays finite in those regions.
inline KernelValue g_kernel(double alpha, ComplexTime z, const SummationPolicy& policy = {}) {
    detail::check_kernel_args(alpha, z, policy);
    using detail::cplx;
    const Representation rep = policy.representation;
    if (rep == Representation::Direct || rep == Representation::HalfInteger) {
        const cplx expo = z * z / (2.0 * alpha);
        if (expo.real() > detail::kMaxExponent)
            throw range_error("g_kernel: prefactor exp(z^2/2alpha) overflows; use F_kernel instead");
        return detail::scaled(theta_kernel(alpha, z, policy), std::exp(expo));
    }

    const double x = z.real();
    const double d = x + detail::kTwoPi * std::round(-x / detail::kTwoPi);
    const double peak = (x * x - d * d) / (2.0 * alpha);
    const double log_prefactor = 0.5 * std::log(detail::kTwoPi / alpha);
    if (peak + log_prefactor > detail::kMaxExponent)
        throw range_error("g_kernel: dominant term overflows; use F_kernel instead");

    auto log_term = [&](std::int64_t n) {
        const double nd = static_cast<double>(n);
        return log_prefactor - detail::kTwoPi * nd * (z + detail::kPi * nd) / alpha;
    };
    // |term n| = exp(log_prefactor + (x^2 - u^2) / 2 alpha), u = x + 2 pi n.
    const double base = log_prefactor + x * x / (2.0 * alpha);
    return detail::shifted_gaussian_series(alpha, x, base, log_term, policy, "g_kernel");
}

/// Pre-flight estimate: the smallest N at which the N-th term of the selected
/// representation (relative to its leading term) falls below eps. Everything
/// beyond N is then smaller still.
inline std::int64_t truncation_terms(double alpha, ComplexTime z, double eps,
                                     Representation rep = Representation::Auto) {
    detail::require_positive_finite(alpha, "alpha");
    detail::require_finite(z, "z");
    if (!(eps > 0.0) || !(eps < 1.0)) throw domain_error("eps must lie in (0, 1)");
    const double log_inv_eps = -std::log(eps);

    switch (select_representation(alpha, rep)) {
    case Representation::Direct: {
        // alpha N^2 / 2 - N |y| > ln(1/eps)
        const double ay = std::abs(z.imag());
        const double root = (ay + std::sqrt(ay * ay + 2.0 * alpha * log_inv_eps)) / alpha;
        return static_cast<std::int64_t>(std::floor(root)) + 1;
    }
    case Representation::HalfInteger: {
        // Same quadratic in h = N + 1/2 with |Im(z) - alpha/2| as the linear coefficient.
        const double av = std::abs(z.imag() - 0.5 * alpha);
        const double root = (av + std::sqrt(av * av + 2.0 * alpha * log_inv_eps)) / alpha;
        return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(root - 0.5)) + 1);
    }
    default: {
        // Offset K steps from the centre: ((2 pi K - |d|)^2 - d^2) / (2 alpha) > ln(1/eps).
        const double x = z.real();
        const double ad = std::abs(x + detail::kTwoPi * std::round(-x / detail::kTwoPi));
        const double u = std::sqrt(ad * ad + 2.0 * alpha * log_inv_eps);
        return static_cast<std::int64_t>(std::floor((u + ad) / detail::kTwoPi)) + 1;
    }
    }
}

} // namespace ringcorr
