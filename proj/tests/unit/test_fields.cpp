#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "spde/errors.hpp"
#include "spde/fields.hpp"

namespace spde {
namespace {

using spde::testing::field;
using spde::testing::field_dx;
using spde::testing::polyval;
using spde::testing::project;

constexpr double kPi = std::numbers::pi;

std::vector<double> random_coeffs(std::mt19937_64& rng, std::size_t m, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    std::vector<double> c(m);
    for (auto& v : c) v = g(rng);
    return c;
}

TEST(Transforms, SingleModeOnThreePoints) {
    const auto u = modes_to_grid(ModeVector{1.0}, GridSpec{3, 1}, OperatorSpec{});
    ASSERT_EQ(u.size(), 3u);
    EXPECT_NEAR(u[0], 1.0, 1e-15);
    EXPECT_NEAR(u[1], std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(u[2], 1.0, 1e-15);
}

TEST(Transforms, ZeroInZeroOut) {
    const GridSpec g{63, 10};
    for (double v : modes_to_grid(ModeVector(10), g, OperatorSpec{})) EXPECT_EQ(v, 0.0);
    const auto x = grid_to_modes(std::vector<double>(63, 0.0), g, OperatorSpec{});
    EXPECT_EQ(x, ModeVector(10));
}

TEST(Transforms, RoundTripRandomised) {
    std::mt19937_64 rng(11);
    for (double L : {1.0, 2.5}) {
        OperatorSpec op;
        op.domain_length = L;
        for (std::size_t mg : {63u, 256u, 1024u}) {
            const std::size_t m = 1 + rng() % mg;
            const ModeVector x(random_coeffs(rng, m));
            const GridSpec g{mg, m};
            const auto back = grid_to_modes(modes_to_grid(x, g, op), g, op);
            double err = 0, norm = 0;
            for (std::size_t k = 0; k < m; ++k) {
                err = std::max(err, std::abs(back[k] - x[k]));
                norm = std::max(norm, std::abs(x[k]));
            }
            EXPECT_LT(err, 1e-12 * norm) << "M_g = " << mg;
        }
    }
}

TEST(Transforms, KnownCoefficientsRoundTrip) {
    const GridSpec g{31, 2};
    const auto x = grid_to_modes(modes_to_grid(ModeVector{0.3, -0.1}, g, {}), g, {});
    EXPECT_NEAR(x[0], 0.3, 1e-15);
    EXPECT_NEAR(x[1], -0.1, 1e-15);
}

TEST(Transforms, SampledBasisFunctionIsUnitVector) {
    const std::size_t mg = 63;
    std::vector<double> u(mg);
    for (std::size_t j = 1; j <= mg; ++j) {
        u[j - 1] = spde::testing::basis(2, static_cast<double>(j) / (mg + 1), 1.0);
    }
    const auto x = grid_to_modes(u, GridSpec{mg, 6}, {});
    for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(x[k], k == 1 ? 1.0 : 0.0, 1e-14);
}

TEST(Transforms, SizeErrors) {
    EXPECT_THROW(grid_to_modes(std::vector<double>(10), GridSpec{63, 4}, {}), ConfigError);
    EXPECT_THROW(modes_to_grid(ModeVector(64), GridSpec{63, 64}, {}), ConfigError);
}

TEST(Transforms, Parseval) {
    std::mt19937_64 rng(12);
    const std::size_t mg = 255;
    const auto c = random_coeffs(rng, 40);
    const auto u = modes_to_grid(ModeVector(c), GridSpec{mg, 40}, {});
    double grid_sum = 0, mode_sum = 0;
    for (double v : u) grid_sum += v * v;
    for (double v : c) mode_sum += v * v;
    EXPECT_NEAR(grid_sum / (mg + 1), mode_sum, 1e-10 * mode_sum);
}

TEST(Nemytskii, IdentityMap) {
    const ModeVector x{0.4, -0.2, 0.1};
    const auto y = nemytskii_modes(x, NonlinearitySpec::polynomial({0, 1}), GridSpec{15, 3}, 3);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(y[k], x[k], 1e-15);
}

TEST(Nemytskii, CubeOfFirstMode) {
    const auto y =
        nemytskii_modes(ModeVector{1.0}, NonlinearitySpec::polynomial({0, 0, 0, 1}), GridSpec{31, 4}, 4);
    EXPECT_NEAR(y[0], 1.5, 1e-13);
    EXPECT_NEAR(y[1], 0.0, 1e-13);
    EXPECT_NEAR(y[2], -0.5, 1e-13);
    EXPECT_NEAR(y[3], 0.0, 1e-13);
}

TEST(Nemytskii, TravellingWaveCubicVanishesAtZero) {
    const auto nl = NonlinearitySpec::polynomial({0, -0.5, 1.5, -1});
    const auto y = nemytskii_modes(ModeVector(5), nl, GridSpec{31, 5}, 5);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(y[k], 0.0);
}

TEST(Nemytskii, DealiasingViolationRejected) {
    const auto nl = NonlinearitySpec::polynomial({0, 0, 0, 1});
    EXPECT_THROW(nemytskii_modes(ModeVector(10), nl, GridSpec{20, 10}, 10), ConfigError);
    EXPECT_THROW(burgers_modes(ModeVector(10), GridSpec{15, 10}, 10), ConfigError);
}

TEST(Nemytskii, GridRefinementChangesNothing) {
    std::mt19937_64 rng(13);
    const auto nl = NonlinearitySpec::polynomial({0.3, 1, -0.7, -1});
    for (int t = 0; t < 20; ++t) {
        const ModeVector x(random_coeffs(rng, 1 + rng() % 20));
        const std::size_t mg = transform_friendly_size(3 * x.size());
        const auto a = nemytskii_modes(x, nl, GridSpec{mg, x.size()}, x.size());
        const auto b = nemytskii_modes(x, nl, GridSpec{2 * mg + 1, x.size()}, x.size());
        for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
    }
}

TEST(Burgers, SingleModes) {
    const auto y = burgers_modes(ModeVector{1.0}, GridSpec{15, 4}, 4);
    EXPECT_NEAR(y[1], -kPi / std::sqrt(2.0), 1e-13);
    EXPECT_NEAR(y[1], -2.2214415, 1e-7);
    for (std::size_t k : {0u, 2u, 3u}) EXPECT_NEAR(y[k], 0.0, 1e-13);

    const auto z = burgers_modes(ModeVector{0.0, 1.0}, GridSpec{31, 6}, 6);
    EXPECT_NEAR(z[3], -2.0 * kPi / std::sqrt(2.0), 1e-12);
    for (std::size_t k : {0u, 1u, 2u, 4u, 5u}) EXPECT_NEAR(z[k], 0.0, 1e-12);
    EXPECT_EQ(burgers_modes(ModeVector(3), GridSpec{15, 3}, 3), ModeVector(3));
}

TEST(Fhn, LinearParts) {
    FHNParams p;
    p.epsilon = 0.1;
    p.b = 0.5;
    const auto [fv0, fw0] = fhn_drift(ModeVector{0.0}, ModeVector{0.0}, p, GridSpec{7, 1}, 1);
    EXPECT_EQ(fv0[0], 0.0);
    EXPECT_EQ(fw0[0], 0.0);
    const auto [fv, fw] = fhn_drift(ModeVector{0.0}, ModeVector{1.0}, p, GridSpec{7, 1}, 1);
    EXPECT_NEAR(fv[0], -1.0, 1e-15);
    EXPECT_NEAR(fw[0], -0.05, 1e-15);
}

TEST(Fhn, CubicAgainstQuadrature) {
    FHNParams p;
    p.a = 0.5;
    p.epsilon = 0.1;
    const auto [fv, fw] = fhn_drift(ModeVector{1.0}, ModeVector{0.0}, p, GridSpec{63, 6}, 6);
    const std::vector<double> c{1.0};
    const auto oracle = project(
        [&](double x) { return polyval({0, -0.5, 1.5, -1}, field(c, x, 1.0)); }, 6, 1.0);
    for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(fv[k], oracle[k], 1e-8);
    EXPECT_NEAR(fw[0], 0.1, 1e-15);
}

TEST(OracleEquivalence, RandomLowModeFields) {
    std::mt19937_64 rng(14);
    for (double L : {1.0, 3.0}) {
        OperatorSpec op;
        op.domain_length = L;
        for (int t = 0; t < 10; ++t) {
            const auto c = random_coeffs(rng, 1 + rng() % 8, 0.7);
            const std::size_t n_out = 12;
            const std::size_t mg = dealiased_grid_size(3, c.size(), n_out);
            const std::vector<double> f{0.2, 1.0, 0.5, -1.0};
            const auto y = nemytskii_modes(ModeVector(c), NonlinearitySpec::polynomial(f),
                                           GridSpec{mg, n_out}, n_out, op);
            const auto ref = project([&](double x) { return polyval(f, field(c, x, L)); }, n_out, L);
            for (std::size_t k = 0; k < n_out; ++k) EXPECT_NEAR(y[k], ref[k], 1e-8);

            const auto b = burgers_modes(ModeVector(c), GridSpec{mg, n_out}, n_out, op);
            const auto bref = project(
                [&](double x) { return -field(c, x, L) * field_dx(c, x, L); }, n_out, L);
            for (std::size_t k = 0; k < n_out; ++k) EXPECT_NEAR(b[k], bref[k], 1e-8);
        }
    }
}

TEST(DriftEvaluatorTest, MatchesFreeFunctions) {
    std::mt19937_64 rng(15);
    const auto c = random_coeffs(rng, 30, 0.5);
    const auto nl = NonlinearitySpec::polynomial({0, 1, 0, -1});
    DriftEvaluator ev(nl, OperatorSpec{}, 30);
    std::vector<double> out(30);
    ev.evaluate(c, {}, out);
    const auto ref = nemytskii_modes(ModeVector(c), nl, GridSpec{255, 30}, 30);
    for (std::size_t k = 0; k < 30; ++k) EXPECT_NEAR(out[k], ref[k], 1e-13);

    // Truncated input uses its own smaller grid.
    std::vector<double> part(5);
    ev.evaluate(std::span<const double>(c).first(5), {}, part);
    const auto pref = nemytskii_modes(ModeVector(std::vector<double>(c.begin(), c.begin() + 5)),
                                      nl, GridSpec{63, 5}, 5);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(part[k], pref[k], 1e-13);
}

TEST(NonlinearitySpecTest, Validation) {
    EXPECT_THROW(NonlinearitySpec::polynomial({1.0}).validate(), ConfigError);
    EXPECT_THROW(NonlinearitySpec::polynomial({0, 1, 0}).validate(), ConfigError);
    FHNParams p;
    p.a = 1.5;
    EXPECT_THROW(NonlinearitySpec::fitzhugh_nagumo(p).validate(), ConfigError);
    p.a = 0.5;
    p.epsilon = -1.0;
    EXPECT_THROW(NonlinearitySpec::fitzhugh_nagumo(p).validate(), ConfigError);
    EXPECT_EQ(NonlinearitySpec::burgers().degree(), 2u);
    EXPECT_EQ(transform_friendly_size(300), 511u);
    EXPECT_EQ(transform_friendly_size(600), 1023u);
}

}  // namespace
}  // namespace spde
