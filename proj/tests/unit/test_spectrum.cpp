#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "spde/errors.hpp"
#include "spde/spectrum.hpp"

namespace spde {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Eigenvalues, ClosedFormUnitInterval) {
    const OperatorSpec op;
    const auto one = eigenvalues(op, 1);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_DOUBLE_EQ(one[0], kPi * kPi);
    const auto three = eigenvalues(op, 3);
    EXPECT_DOUBLE_EQ(three[1], 4 * kPi * kPi);
    EXPECT_DOUBLE_EQ(three[2], 9 * kPi * kPi);
}

TEST(Eigenvalues, DomainLengthTwo) {
    OperatorSpec op;
    op.domain_length = 2.0;
    EXPECT_NEAR(eigenvalues(op, 1)[0], 2.4674011, 1e-7);
    EXPECT_DOUBLE_EQ(op.lambda_scale(), kPi * kPi / 4.0);
    EXPECT_DOUBLE_EQ(op.beta(), 2.0);
}

TEST(Eigenvalues, StrictlyIncreasingAndPositive) {
    const auto lam = eigenvalues(OperatorSpec{}, 500);
    EXPECT_GT(lam[0], 0.0);
    for (std::size_t k = 1; k < lam.size(); ++k) EXPECT_LT(lam[k - 1], lam[k]);
}

TEST(Eigenvalues, RejectsZeroCountAndBadOperator) {
    EXPECT_THROW(eigenvalues(OperatorSpec{}, 0), ConfigError);
    EXPECT_THROW(operator_kind_from_string("neumann_laplacian"), ConfigError);
    OperatorSpec bad;
    bad.domain_length = -1.0;
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(FracPower, Examples) {
    const OperatorSpec op;
    EXPECT_EQ(frac_power_apply(ModeVector{1, 0, 0}, 0.0, op), (ModeVector{1, 0, 0}));
    const auto y = frac_power_apply(ModeVector{1, 1}, 1.0, op);
    EXPECT_DOUBLE_EQ(y[0], kPi * kPi);
    EXPECT_DOUBLE_EQ(y[1], 4 * kPi * kPi);
    EXPECT_NEAR(frac_power_apply(ModeVector{1}, -0.5, op)[0], 0.3183099, 1e-7);
}

TEST(SobolevNorm, Examples) {
    const OperatorSpec op;
    EXPECT_EQ(sobolev_norm(ModeVector{0, 0, 0}, 1.3, op), 0.0);
    EXPECT_DOUBLE_EQ(sobolev_norm(ModeVector{1}, 0.0, op), 1.0);
    EXPECT_NEAR(sobolev_norm(ModeVector{1, 1}, 0.5, op), kPi * std::sqrt(5.0), 1e-12);
    EXPECT_NEAR(sobolev_norm(ModeVector{1, 1}, 0.5, op), 7.0248, 1e-4);
}

TEST(RegularityLimit, Examples) {
    EXPECT_NEAR(regularity_limit(0.4, 2.0), 0.15, 1e-15);
    EXPECT_NEAR(regularity_limit(0.8, 2.0), 0.55, 1e-15);
    EXPECT_EQ(regularity_limit(0.25, 2.0), 0.0);
    EXPECT_THROW(regularity_limit(0.4, 0.0), DomainError);
    EXPECT_THROW(regularity_limit(0.4, -1.0), DomainError);
}

ModeVector random_modes(std::mt19937_64& rng, std::size_t m) {
    std::normal_distribution<double> g;
    ModeVector x(m);
    for (std::size_t i = 0; i < m; ++i) x[i] = g(rng);
    return x;
}

TEST(SpectrumProperty, PoincareForwardOnLowModes) {
    std::mt19937_64 rng(1);
    const OperatorSpec op;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 64;
        const auto x = random_modes(rng, n);
        for (auto [r1, r2] : {std::pair{0.0, 0.5}, std::pair{0.25, 1.0}}) {
            const double lhs = sobolev_norm(x, r2, op);
            const double rhs = std::pow(op.eigenvalue(n), r2 - r1) * sobolev_norm(x, r1, op);
            EXPECT_LE(lhs, rhs * (1 + 1e-12));
        }
    }
}

TEST(SpectrumProperty, PoincareTailOnHighModes) {
    std::mt19937_64 rng(2);
    const OperatorSpec op;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = rng() % 64;
        const std::size_t m = n + 1 + rng() % 64;
        auto x = random_modes(rng, m);
        for (std::size_t k = 0; k < n; ++k) x[k] = 0.0;
        for (auto [r1, r2] : {std::pair{0.0, 0.5}, std::pair{0.25, 1.0}}) {
            const double lhs = sobolev_norm(x, r1, op);
            const double rhs = std::pow(op.eigenvalue(n + 1), r1 - r2) * sobolev_norm(x, r2, op);
            EXPECT_LE(lhs, rhs * (1 + 1e-12));
        }
    }
}

TEST(SpectrumProperty, FracPowerRoundTrip) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> rho_dist(-2.0, 2.0);
    const OperatorSpec op;
    for (int trial = 0; trial < 100; ++trial) {
        const auto x = random_modes(rng, 1 + rng() % 256);
        const double rho = rho_dist(rng);
        const auto back = frac_power_apply(frac_power_apply(x, rho, op), -rho, op);
        for (std::size_t k = 0; k < x.size(); ++k) {
            EXPECT_NEAR(back[k], x[k], 1e-12 * std::abs(x[k]));
        }
    }
}

TEST(SpectrumProperty, NormIsNormOfPower) {
    std::mt19937_64 rng(4);
    const OperatorSpec op;
    for (int trial = 0; trial < 100; ++trial) {
        const auto x = random_modes(rng, 1 + rng() % 128);
        const double rho = -1.0 + 0.03 * trial;
        EXPECT_EQ(sobolev_norm(x, rho, op), sobolev_norm(frac_power_apply(x, rho, op), 0.0, op));
    }
}

TEST(ModeVectorTest, ValidateRejectsNonFinite) {
    EXPECT_THROW((ModeVector{1.0, NAN}.validate()), ConfigError);
    EXPECT_THROW((ModeVector{INFINITY}.validate()), ConfigError);
    EXPECT_THROW(ModeVector().validate(), ConfigError);
    EXPECT_NO_THROW((ModeVector{1.0, 2.0}.validate()));
    EXPECT_EQ((ModeVector{1.0}.truncated(3)), (ModeVector{1.0, 0.0, 0.0}));
}

}  // namespace
}  // namespace spde
