// hbar -> 0 at fixed m R^2 beta: how fast the quantum C1 approaches the
// classical Gaussian.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "ringcorr/classical.hpp"
#include "ringcorr/model.hpp"
#include "ringcorr/quantum.hpp"
#include "ringcorr/theta.hpp"

namespace ringcorr {

/// Mass, radius and beta: the quantities held fixed while hbar shrinks.
struct ClassicalConstants {
    double mass;
    double radius;
    double beta;
};

struct LimitRow {
    double hbar = 0.0;
    double alpha = 0.0;
    double sup_deviation = 0.0;          // max_t |C1_q(t) - C1_cl(t)| (complex difference)
    double grid_span = 0.0;              // t_max - t_min
    double sup_modulus_deviation = 0.0;  // max_t ||C1_q(t)| - C1_cl(t)|
    double sup_order_gap = 0.0;          // max_t |C2_q(t) - C1_q(t)|
};

/// Default comparison grid: 61 nodes on [0, 3 sqrt(beta m) R].
inline std::vector<double> default_limit_grid(const ClassicalConstants& c) {
    return linear_grid(0.0, 3.0 * std::sqrt(c.beta * c.mass) * c.radius, 61);
}

/// One row per hbar. The quantum side always uses the Poisson representation
/// (the direct series needs O(1/hbar) terms as alpha -> 0).
inline std::vector<LimitRow> classical_limit_scan(const ClassicalConstants& fixed,
                                                  std::span<const double> hbar_values,
                                                  std::span<const double> t_grid,
                                                  const SummationPolicy& policy = {}) {
    if (hbar_values.empty()) throw domain_error("classical_limit_scan needs at least one hbar value");
    if (t_grid.empty()) throw domain_error("classical_limit_scan needs a non-empty time grid");
    for (std::size_t i = 0; i < hbar_values.size(); ++i) {
        detail::require_positive_finite(hbar_values[i], "hbar");
        if (i > 0 && !(hbar_values[i] < hbar_values[i - 1]))
            throw domain_error("hbar values must be strictly decreasing");
    }
    const SummationPolicy poisson = policy.with(Representation::Poisson);
    const auto [t_lo, t_hi] = std::minmax_element(t_grid.begin(), t_grid.end());

    std::vector<LimitRow> rows;
    rows.reserve(hbar_values.size());
    for (double hbar : hbar_values) {
        const ModelParams p(fixed.mass, fixed.radius, hbar, fixed.beta);
        const QuantumCorrelator q(p, poisson);
        LimitRow row;
        row.hbar = hbar;
        row.alpha = q.scales().alpha;
        row.grid_span = *t_hi - *t_lo;
        for (double t : t_grid) {
            const std::complex<double> a = q.c1(t).value;
            const std::complex<double> b = q.c2(t).value;
            const double cl = c1_classical(p, t);
            row.sup_deviation = std::max(row.sup_deviation, std::abs(a - cl));
            row.sup_modulus_deviation = std::max(row.sup_modulus_deviation, std::abs(std::abs(a) - cl));
            row.sup_order_gap = std::max(row.sup_order_gap, std::abs(b - a));
        }
        rows.push_back(row);
    }
    return rows;
}

/// Least-squares slope of log(value) against log(hbar). Needs at least three
/// rows spanning two decades of hbar, and positive values.
template <class ValueOf>
double log_log_slope(std::span<const LimitRow> rows, ValueOf&& value_of) {
    if (rows.size() < 3) throw domain_error("deviation_order needs at least 3 rows");
    double h_min = rows[0].hbar, h_max = rows[0].hbar;
    for (const auto& r : rows) {
        h_min = std::min(h_min, r.hbar);
        h_max = std::max(h_max, r.hbar);
        if (!(value_of(r) > 0.0)) throw domain_error("deviation_order needs positive deviations");
    }
    if (!(h_max >= 100.0 * h_min)) throw domain_error("deviation_order needs hbar spanning two decades");

    const double n = static_cast<double>(rows.size());
    double sx = 0, sy = 0;
    for (const auto& r : rows) {
        sx += std::log(r.hbar);
        sy += std::log(value_of(r));
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (const auto& r : rows) {
        const double dx = std::log(r.hbar) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(value_of(r)) - my);
    }
    return sxy / sxx;
}

/// Observed order of convergence of sup_deviation in hbar.
inline double deviation_order(std::span<const LimitRow> rows) {
    return log_log_slope(rows, [](const LimitRow& r) { return r.sup_deviation; });
}

/// The n = 0 Poisson term alone: (R^2/2) exp(i z/2) exp(-z^2 / (2 alpha)).
/// Differs from c1 by terms of relative size exp(-(2 pi - |Re z|)^2 / (2 alpha)).
inline std::complex<double> c1_leading_term(const ModelParams& p, std::complex<double> t) {
    const TimeScales s = derive_scales(p);
    const std::complex<double> z = t / s.tau_b;
    return p.c1_at_zero() * std::exp(std::complex<double>(0.0, 0.5) * z - z * z / (2.0 * s.alpha));
}

/// hbar_start * 2^-k for k = 0 .. levels.
inline std::vector<double> halving_sequence(double hbar_start, int levels) {
    std::vector<double> h;
    for (int k = 0; k <= levels; ++k) h.push_back(std::ldexp(hbar_start, -k));
    return h;
}

} // namespace ringcorr
