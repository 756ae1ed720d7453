// Prints the quantum correlator next to the classical Gaussian for m = R =
// beta = 1 while hbar is halved, then the fitted deviation order.

#include <cstdio>
#include <vector>

#include "ringcorr/ringcorr.hpp"

int main() {
    using namespace ringcorr;
    const ClassicalConstants fixed{1.0, 1.0, 1.0};
    const std::vector<double> grid = default_limit_grid(fixed);
    const std::vector<double> hbars = halving_sequence(1.0, 10);

    std::printf("%-12s %-12s %-14s %-14s\n", "hbar", "alpha", "sup|C1-Ccl|", "sup||C1|-Ccl|");
    const auto rows = classical_limit_scan(fixed, hbars, grid);
    for (const LimitRow& r : rows)
        std::printf("%-12.6g %-12.6g %-14.6e %-14.6e\n", r.hbar, r.alpha, r.sup_deviation, r.sup_modulus_deviation);
    std::printf("deviation order in hbar: %.4f\n\n", deviation_order(rows));

    const ModelParams p(1.0, 1.0, 1.0 / 64, 1.0);
    const QuantumCorrelator q(p);
    std::printf("hbar = 1/64\n%-6s %-24s %-14s\n", "t", "C1(t)", "classical");
    for (double t : {0.0, 0.5, 1.0, 1.5, 2.0, 3.0}) {
        const auto c = q.c1(t).value;
        std::printf("%-6.2f %+.6f %+.6fi     %.6f\n", t, c.real(), c.imag(), c1_classical(p, t));
    }
    return 0;
}
