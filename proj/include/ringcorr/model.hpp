// Particle on a ring: physical parameters, time scales and canonical-ensemble
// thermodynamics.
//
// The single-particle spectrum is E_n = n^2 * eps_scale with
// eps_scale = hbar^2 / (2 m R^2), n in Z. All thermal sums are Gaussian
// series in n with modular parameter alpha = hbar^2 beta / (m R^2), so that
// beta * E_n = alpha n^2 / 2. Units are whatever consistent system the caller
// uses; nothing here converts units.
#pragma once

#include <cmath>
#include <cstdint>

#include "ringcorr/errors.hpp"
#include "ringcorr/summation.hpp"

namespace ringcorr {

inline constexpr std::int64_t kDefaultMaxTerms = 10'000'000;

/// Mass, radius and Planck constant: everything but the temperature.
struct RingConstants {
    double mass;
    double radius;
    double hbar;
};

/// One model instance. All four fields are strictly positive and finite;
/// the constructor throws ringcorr::domain_error otherwise.
class ModelParams {
public:
    ModelParams(double mass, double radius, double hbar, double beta)
        : mass_(mass), radius_(radius), hbar_(hbar), beta_(beta) {
        detail::require_positive_finite(mass, "mass");
        detail::require_positive_finite(radius, "radius");
        detail::require_positive_finite(hbar, "hbar");
        detail::require_positive_finite(beta, "beta");
    }

    ModelParams(const RingConstants& c, double beta)
        : ModelParams(c.mass, c.radius, c.hbar, beta) {}

    double mass() const noexcept { return mass_; }
    double radius() const noexcept { return radius_; }
    double hbar() const noexcept { return hbar_; }
    double beta() const noexcept { return beta_; }

    RingConstants constants() const noexcept { return {mass_, radius_, hbar_}; }

    /// hbar^2 / (2 m R^2), the spacing unit of the spectrum.
    double energy_scale() const noexcept { return hbar_ * hbar_ / (2.0 * mass_ * radius_ * radius_); }

    /// Equal-time correlator <x^2> = R^2 / 2.
    double c1_at_zero() const noexcept { return 0.5 * radius_ * radius_; }

    ModelParams with_hbar(double hbar) const { return {mass_, radius_, hbar, beta_}; }
    ModelParams with_beta(double beta) const { return {mass_, radius_, hbar_, beta}; }

private:
    double mass_;
    double radius_;
    double hbar_;
    double beta_;
};

struct TimeScales {
    double tau_a;   // hbar * beta
    double tau_b;   // m R^2 / hbar
    double alpha;   // tau_a / tau_b
    double period;  // 4 pi tau_b
};

inline TimeScales derive_scales(const ModelParams& p) {
    TimeScales s{};
    s.tau_a = p.hbar() * p.beta();
    s.tau_b = p.mass() * p.radius() * p.radius() / p.hbar();
    s.alpha = s.tau_a / s.tau_b;
    s.period = 2.0 * detail::kTwoPi * s.tau_b;
    return s;
}

namespace detail {

// sum_{n in Z} n^power exp(-coeff n^2) for power 0 or 2, summed in symmetric
// pairs outward from n = 0. Stops once the geometric bound on the remaining
// tail drops below eps times the partial sum.
inline double gaussian_moment(double coeff, int power, double eps, std::int64_t max_terms,
                              const char* series) {
    auto term = [&](double n) {
        const double w = (power == 0) ? 1.0 : n * n;
        return 2.0 * w * std::exp(-coeff * n * n);
    };
    CompensatedSum<double> acc;
    if (power == 0) acc.add(1.0);
    std::int64_t used = 1;
    for (std::int64_t n = 1;; ++n) {
        charge_terms(used, 2, max_terms, series);
        const double nd = static_cast<double>(n);
        acc.add(term(nd));
        // Successive-term ratios of n^power e^{-coeff n^2} decrease with n,
        // so once the first omitted ratio is below one it bounds the rest.
        const double next = term(nd + 1.0);
        const double after = term(nd + 2.0);
        const double tail = next == 0.0 ? 0.0 : geometric_tail(next, after / next);
        if (tail_converged(tail, eps, std::abs(acc.value()))) break;
    }
    return acc.value();
}

inline void require_tolerance(double eps) {
    if (!(eps > 0.0) || !(eps < 1.0)) throw domain_error("tolerance must lie in (0, 1)");
}

} // namespace detail

/// Z(alpha) = sum_n exp(-alpha n^2 / 2) by direct symmetric summation.
inline double partition_sum(double alpha, double eps = 1e-15,
                            std::int64_t max_terms = kDefaultMaxTerms) {
    detail::require_positive_finite(alpha, "alpha");
    detail::require_tolerance(eps);
    return detail::gaussian_moment(alpha / 2.0, 0, eps, max_terms, "partition_sum");
}

/// Z(alpha) through the Poisson dual: sqrt(2 pi / alpha) sum_k exp(-2 pi^2 k^2 / alpha).
inline double partition_sum_poisson(double alpha, double eps = 1e-15,
                                    std::int64_t max_terms = kDefaultMaxTerms) {
    detail::require_positive_finite(alpha, "alpha");
    detail::require_tolerance(eps);
    const double dual = 2.0 * detail::kPi * detail::kPi / alpha;
    return std::sqrt(detail::kTwoPi / alpha) *
           detail::gaussian_moment(dual, 0, eps, max_terms, "partition_sum_poisson");
}

/// Thermal average <n^2> = sum n^2 e^{-alpha n^2/2} / sum e^{-alpha n^2/2}.
/// Uses the direct spectral sums for alpha >= 2 pi and the Poisson-resummed
/// form 1/alpha - (4 pi^2/alpha^2) <k^2>_dual below it.
inline double mean_square_quantum_number(double alpha, double eps = 1e-15,
                                         std::int64_t max_terms = kDefaultMaxTerms) {
    detail::require_positive_finite(alpha, "alpha");
    detail::require_tolerance(eps);
    const double part_eps = eps / 4.0;
    if (alpha >= detail::kTwoPi) {
        const double num = detail::gaussian_moment(alpha / 2.0, 2, part_eps, max_terms, "mean_energy");
        const double den = detail::gaussian_moment(alpha / 2.0, 0, part_eps, max_terms, "mean_energy");
        return num / den;
    }
    const double dual = 2.0 * detail::kPi * detail::kPi / alpha;
    const double num = detail::gaussian_moment(dual, 2, part_eps, max_terms, "mean_energy");
    const double den = detail::gaussian_moment(dual, 0, part_eps, max_terms, "mean_energy");
    return 1.0 / alpha - (4.0 * detail::kPi * detail::kPi / (alpha * alpha)) * (num / den);
}

/// Canonical mean energy -d ln Z / d beta.
inline double mean_energy(const ModelParams& p, double eps = 1e-15,
                          std::int64_t max_terms = kDefaultMaxTerms) {
    return p.energy_scale() * mean_square_quantum_number(derive_scales(p).alpha, eps, max_terms);
}

/// Inverts mean_energy for beta by bisection in log(beta). The bracket is
/// [1e-12, 1e12] / energy_scale; mean_energy is strictly decreasing in beta.
/// Throws domain_error for a non-positive target and numeric_error (with the
/// final bracket) when the target is outside the bracket or the result misses
/// the relative tolerance eps.
inline double beta_from_energy(const RingConstants& c, double target_energy, double eps = 1e-12) {
    detail::require_positive_finite(c.mass, "mass");
    detail::require_positive_finite(c.radius, "radius");
    detail::require_positive_finite(c.hbar, "hbar");
    if (!(target_energy > 0.0) || !std::isfinite(target_energy))
        throw domain_error("target mean energy must be positive and finite");
    detail::require_tolerance(eps);

    const ModelParams unit(c, 1.0);
    const double scale = unit.energy_scale();
    auto energy_at = [&](double beta) { return mean_energy(unit.with_beta(beta)); };

    double log_lo = std::log(1e-12 / scale);
    double log_hi = std::log(1e12 / scale);
    if (energy_at(std::exp(log_lo)) < target_energy || energy_at(std::exp(log_hi)) > target_energy)
        throw numeric_error("target mean energy outside the inversion bracket", std::exp(log_lo),
                            std::exp(log_hi));

    for (int iter = 0; iter < 200; ++iter) {
        const double log_mid = 0.5 * (log_lo + log_hi);
        if (log_mid <= log_lo || log_mid >= log_hi) break;
        if (energy_at(std::exp(log_mid)) > target_energy)
            log_lo = log_mid;
        else
            log_hi = log_mid;
    }

    const double lo = std::exp(log_lo), hi = std::exp(log_hi);
    const double err_lo = std::abs(energy_at(lo) - target_energy);
    const double err_hi = std::abs(energy_at(hi) - target_energy);
    const double beta = err_lo <= err_hi ? lo : hi;
    if (std::min(err_lo, err_hi) > eps * target_energy)
        throw numeric_error("beta inversion did not reach the requested tolerance", lo, hi);
    return beta;
}

} // namespace ringcorr
