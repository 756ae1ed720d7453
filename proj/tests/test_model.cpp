#include <cfloat>
#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "oracle_values.hpp"
#include "ringcorr/model.hpp"

using namespace ringcorr;

TEST(ModelParams, RejectsNonPositiveOrNonFinite) {
    EXPECT_THROW(ModelParams(0.0, 1, 1, 1), ringcorr::domain_error);
    EXPECT_THROW(ModelParams(1, -1, 1, 1), ringcorr::domain_error);
    EXPECT_THROW(ModelParams(1, 1, std::numeric_limits<double>::infinity(), 1), ringcorr::domain_error);
    EXPECT_THROW(ModelParams(1, 1, 1, std::nan("")), ringcorr::domain_error);
    EXPECT_NO_THROW(ModelParams(1, 1, 1, 1));
}

TEST(DeriveScales, UnitParameters) {
    const TimeScales s = derive_scales(ModelParams(1, 1, 1, 2));
    EXPECT_DOUBLE_EQ(s.tau_a, 2.0);
    EXPECT_DOUBLE_EQ(s.tau_b, 1.0);
    EXPECT_DOUBLE_EQ(s.alpha, 2.0);
    EXPECT_DOUBLE_EQ(s.period, 4.0 * M_PI);
}

TEST(DeriveScales, MixedParameters) {
    const TimeScales s = derive_scales(ModelParams(2, 3, 0.5, 1));
    EXPECT_DOUBLE_EQ(s.tau_a, 0.5);
    EXPECT_DOUBLE_EQ(s.tau_b, 36.0);
    EXPECT_DOUBLE_EQ(s.alpha, 1.0 / 72.0);
    EXPECT_EQ(s.alpha, s.tau_a / s.tau_b);
}

TEST(DeriveScales, ProductOfTimeScalesIsHbarIndependent) {
    const ModelParams base(1.7, 0.3, 1.0, 2.5);
    const TimeScales ref = derive_scales(base);
    const double expected = base.mass() * base.radius() * base.radius() * base.beta();
    EXPECT_NEAR(ref.tau_a * ref.tau_b, expected, 1e-14 * expected);
    for (double hbar : {1e-6, 1e-3, 0.1, 3.0, 1e4}) {
        const TimeScales s = derive_scales(base.with_hbar(hbar));
        EXPECT_NEAR(s.tau_a * s.tau_b, expected, 1e-14 * expected) << "hbar=" << hbar;
    }
    // hbar -> hbar / 10 at m = R = 1, beta = 2 keeps tau_a tau_b = 2.
    EXPECT_NEAR(derive_scales(ModelParams(1, 1, 0.1, 2)).tau_a * derive_scales(ModelParams(1, 1, 0.1, 2)).tau_b,
                2.0, 1e-14);
}

TEST(PartitionSum, SpotValues) {
    EXPECT_NEAR(partition_sum(2.0), oracle::kThetaAlpha2, 1e-15);
    EXPECT_NEAR(partition_sum(2.0 * M_PI), oracle::kThetaAlpha2Pi, 1e-15);
    // 1 + 2.8e-11 is resolved only to the spacing of doubles near 1.
    EXPECT_NEAR(partition_sum(50.0) - 1.0, oracle::kThetaAlpha50Minus1, DBL_EPSILON);
    EXPECT_NEAR(partition_sum(50.0) - 1.0, 2.0 * std::exp(-25.0), DBL_EPSILON);
    EXPECT_GE(partition_sum(1e3), 1.0);
}

TEST(PartitionSum, AgreesWithPoissonDual) {
    for (double alpha = 1e-2; alpha <= 1e2 * 1.0001; alpha *= std::pow(10.0, 0.25)) {
        const double direct = partition_sum(alpha);
        const double dual = partition_sum_poisson(alpha);
        EXPECT_NEAR(direct, dual, 1e-12 * dual) << "alpha=" << alpha;
    }
}

TEST(PartitionSum, TermCapIsReported) {
    try {
        partition_sum(1e-10, 1e-15, 1000);
        FAIL() << "expected resource_limit_error";
    } catch (const resource_limit_error& e) {
        EXPECT_EQ(e.cap(), 1000);
        EXPECT_NE(std::string(e.what()).find("1000"), std::string::npos);
    }
    EXPECT_THROW(partition_sum(-1.0), ringcorr::domain_error);
}

TEST(MeanEnergy, SpotValues) {
    // m = R = hbar = 1 gives energy_scale 1/2 and alpha = beta.
    const ModelParams p(1, 1, 1, 2);
    EXPECT_NEAR(mean_energy(p), 0.5 * oracle::kMeanN2Alpha2, 1e-15);
    EXPECT_NEAR(mean_energy(p) / p.energy_scale(), 0.4990, 5e-5);

    const ModelParams cold(1, 1, 1, 20);
    EXPECT_NEAR(mean_energy(cold) / cold.energy_scale(), oracle::kMeanN2Alpha20, 1e-15 * oracle::kMeanN2Alpha20 * 10);
    EXPECT_NEAR(mean_energy(cold) / cold.energy_scale(), 2.0 * std::exp(-10.0), 1e-8);

    // Below the representation switch.
    const ModelParams warm(1, 1, 1, 0.5);
    EXPECT_NEAR(mean_energy(warm) / warm.energy_scale(), oracle::kMeanN2Alpha05, 1e-13);
}

TEST(MeanEnergy, EquipartitionLimit) {
    const ModelParams p(1, 1, 1, 1e-6);
    ASSERT_DOUBLE_EQ(derive_scales(p).alpha, 1e-6);
    const double e = mean_energy(p);
    EXPECT_NEAR(e, 1.0 / (2.0 * p.beta()), 1e-4 / (2.0 * p.beta()));
}

TEST(MeanEnergy, StrictlyDecreasingInBeta) {
    const RingConstants c{1, 1, 1};
    double prev = std::numeric_limits<double>::infinity();
    for (int k = -12; k <= 12; ++k) {
        const double beta = std::pow(10.0, k / 4.0);
        const double e = mean_energy(ModelParams(c, beta));
        EXPECT_GT(e, 0.0);
        EXPECT_LT(e, prev) << "beta=" << beta;
        prev = e;
    }
}

TEST(BetaFromEnergy, RoundTrip) {
    const RingConstants c{1, 1, 1};
    for (int k = -12; k <= 12; ++k) {
        const double beta0 = std::pow(10.0, k / 4.0);
        const double target = mean_energy(ModelParams(c, beta0));
        const double beta = beta_from_energy(c, target);
        EXPECT_NEAR(beta, beta0, 1e-10 * beta0) << "beta0=" << beta0;
    }
}

TEST(BetaFromEnergy, SpotValuesAndClassicalRegime) {
    const RingConstants c{1, 1, 1};
    // 0.4990 * eps with eps = 1/2 sits at beta eps ~= 1.
    EXPECT_NEAR(beta_from_energy(c, 0.4990 * 0.5), 2.0, 2e-3);

    const double beta0 = 1e-6;  // alpha = 1e-6
    EXPECT_NEAR(beta_from_energy(c, 1.0 / (2.0 * beta0)), beta0, 1e-4 * beta0);

    const RingConstants other{2.0, 0.7, 0.3};
    const double beta1 = 4.2;
    const double e1 = mean_energy(ModelParams(other, beta1));
    EXPECT_NEAR(beta_from_energy(other, e1), beta1, 1e-10 * beta1);
}

TEST(BetaFromEnergy, Errors) {
    const RingConstants c{1, 1, 1};
    EXPECT_THROW(beta_from_energy(c, 0.0), ringcorr::domain_error);
    EXPECT_THROW(beta_from_energy(c, -1.0), ringcorr::domain_error);
    // Far hotter than the bracket allows.
    try {
        beta_from_energy(c, 1e40);
        FAIL() << "expected numeric_error";
    } catch (const numeric_error& e) {
        EXPECT_LT(e.bracket_lo(), e.bracket_hi());
    }
}
