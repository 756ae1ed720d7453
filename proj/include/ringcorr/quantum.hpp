// Quantum position correlators of a particle on a ring.
//
//   C1(t) = <x(0) x(t)> = (R^2/2) F(t/tau_b) / F(0)
//   C2(t) = <x(t) x(0)> = exp(-i t / tau_b) C1(t)
//
// Times are physical and may be complex; z = t / tau_b is formed internally.
// The y-position correlators coincide with these by rotational symmetry.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ringcorr/model.hpp"
#include "ringcorr/theta.hpp"

namespace ringcorr {

struct CorrelatorValue {
    std::complex<double> value;
    double tail_bound = 0.0;
};

/// Evaluates C1 and C2 for one (params, policy) pair. F(0) is computed once
/// at construction; the object is immutable afterwards and safe to share
/// between threads.
class QuantumCorrelator {
public:
    QuantumCorrelator(const ModelParams& params, const SummationPolicy& policy = {})
        : params_(params), scales_(derive_scales(params)), policy_(policy),
          f0_(F_kernel(scales_.alpha, 0.0, policy)) {}

    const ModelParams& params() const noexcept { return params_; }
    const TimeScales& scales() const noexcept { return scales_; }
    const SummationPolicy& policy() const noexcept { return policy_; }
    const KernelValue& f_at_zero() const noexcept { return f0_; }

    ComplexTime reduced_time(std::complex<double> t) const { return t / scales_.tau_b; }

    CorrelatorValue c1(std::complex<double> t) const {
        const double c0 = params_.c1_at_zero();
        if (t == std::complex<double>(0.0, 0.0)) return {c0, 0.0};
        const KernelValue f = F_kernel(scales_.alpha, reduced_time(t), policy_);
        const double f0 = std::abs(f0_.value);
        CorrelatorValue out;
        out.value = c0 * (f.value / f0_.value);
        out.tail_bound = c0 * (f.tail_bound / f0 + std::abs(f.value) * f0_.tail_bound / (f0 * f0));
        return out;
    }

    CorrelatorValue c2(std::complex<double> t) const {
        if (t == std::complex<double>(0.0, 0.0)) return {params_.c1_at_zero(), 0.0};
        const std::complex<double> phase = std::exp(std::complex<double>(0.0, -1.0) * reduced_time(t));
        CorrelatorValue out = c1(t);
        out.value *= phase;
        out.tail_bound *= std::abs(phase);
        return out;
    }

private:
    ModelParams params_;
    TimeScales scales_;
    SummationPolicy policy_;
    KernelValue f0_;
};

inline CorrelatorValue c1(const ModelParams& params, std::complex<double> t,
                          const SummationPolicy& policy = {}) {
    return QuantumCorrelator(params, policy).c1(t);
}

inline CorrelatorValue c2(const ModelParams& params, std::complex<double> t,
                          const SummationPolicy& policy = {}) {
    return QuantumCorrelator(params, policy).c2(t);
}

struct KmsResiduals {
    double r1 = 0.0;  // |C1(-t) - C1(t + i tau_a)|
    double r2 = 0.0;  // |C1(-t) - C2(t)|
    double tail_bound = 0.0;
};

inline KmsResiduals kms_residuals(const QuantumCorrelator& q, double t) {
    const std::complex<double> shifted(t, q.scales().tau_a);
    const CorrelatorValue back = q.c1(-t);
    const CorrelatorValue kms = q.c1(shifted);
    const CorrelatorValue swapped = q.c2(t);
    KmsResiduals r;
    r.r1 = std::abs(back.value - kms.value);
    r.r2 = std::abs(back.value - swapped.value);
    r.tail_bound = back.tail_bound + std::max(kms.tail_bound, swapped.tail_bound);
    return r;
}

inline KmsResiduals kms_residuals(const ModelParams& params, double t, const SummationPolicy& policy = {}) {
    return kms_residuals(QuantumCorrelator(params, policy), t);
}

struct CorrelationPoint {
    double time = 0.0;
    ComplexTime z;
    std::complex<double> c1;
    std::complex<double> c2;
    double tail_bound = 0.0;
    bool ok = false;
    std::string error;
};

/// Evaluates C1 and C2 at every grid node. The grid must be finite and
/// sorted ascending. A failing node is flagged (ok = false, error message)
/// without aborting the rest of the scan.
inline std::vector<CorrelationPoint> scan(const ModelParams& params, std::span<const double> t_grid,
                                          const SummationPolicy& policy = {}) {
    for (double t : t_grid)
        if (!std::isfinite(t)) throw domain_error("scan grid contains a non-finite time");
    if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw domain_error("scan grid must be sorted");
    policy.validate();

    const TimeScales scales = derive_scales(params);
    std::vector<CorrelationPoint> out(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        out[i].time = t_grid[i];
        out[i].z = t_grid[i] / scales.tau_b;
    }

    std::optional<QuantumCorrelator> q;
    try {
        q.emplace(params, policy);
    } catch (const std::exception& e) {
        for (auto& p : out) p.error = std::string("F(0): ") + e.what();
        return out;
    }

    for (auto& p : out) {
        try {
            const CorrelatorValue a = q->c1(p.time);
            const CorrelatorValue b = q->c2(p.time);
            p.c1 = a.value;
            p.c2 = b.value;
            p.tail_bound = std::max(a.tail_bound, b.tail_bound);
            p.ok = true;
        } catch (const std::exception& e) {
            p.error = e.what();
        }
    }
    return out;
}

/// n_points equally spaced times on [t_min, t_max] (a single point at t_min when n_points == 1).
inline std::vector<double> linear_grid(double t_min, double t_max, std::size_t n_points) {
    std::vector<double> g(n_points);
    if (n_points == 1) {
        g[0] = t_min;
        return g;
    }
    const double step = (t_max - t_min) / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) g[i] = t_min + step * static_cast<double>(i);
    g.back() = t_max;
    return g;
}

} // namespace ringcorr
