#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "spde/errors.hpp"
#include "spde/noise.hpp"
#include "spde/simulate.hpp"

namespace spde {
namespace {

constexpr double kPi = std::numbers::pi;

EstimatorRequest linear_request(std::vector<std::size_t> n_list, double alpha = 0.0) {
    EstimatorRequest r;
    r.alpha = alpha;
    r.n_list = std::move(n_list);
    r.variants = {Variant::linear};
    return r;
}

ModelSpec allen_cahn(std::size_t n_sim) {
    ModelSpec m;
    m.theta_true = 0.02;
    m.gamma = 0.4;
    m.nonlinearity = NonlinearitySpec::polynomial({0, 1, 0, -1});
    m.initial_modes = ModeVector{1.0 / std::sqrt(2.0)};
    m.n_sim = n_sim;
    return m;
}

// Kolmogorov distance of a sample from N(0, var).
double ks_normal(std::vector<double> xs, double var) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = 0.5 * std::erfc(-xs[i] / std::sqrt(2.0 * var));
        d = std::max({d, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
    }
    return d;
}

TEST(SimulateSemilinear, NoiselessDecayMatchesScalarRecursion) {
    ModelSpec m;
    m.theta_true = 1.0;
    m.gamma = 1.0;
    m.sigma = 0.0;
    m.initial_modes = ModeVector{1.0};
    m.n_sim = 1;
    SchemeSpec s;
    s.dt = 1e-3;
    s.t_final = 1.0;
    const auto out = simulate_semilinear(m, s, linear_request({1}));
    double x = 1.0;
    for (int j = 0; j < 1000; ++j) x /= 1.0 + 1e-3 * kPi * kPi;
    EXPECT_DOUBLE_EQ(out.xT[0], x);
    EXPECT_NEAR(out.xT[0], std::pow(1.0 + 1e-3 * kPi * kPi, -1000.0), 1e-15);
    EXPECT_NEAR(out.xT[0], 5.4287e-5, 1e-9);
}

TEST(SimulateSemilinear, TerminalLawMatchesExactOu) {
    ModelSpec m;
    m.theta_true = 0.1;
    m.gamma = 0.5;
    m.n_sim = 1;
    SchemeSpec s;
    s.dt = 1e-4;
    s.t_final = 1.0;
    std::vector<double> xs;
    for (std::uint64_t i = 0; i < 2000; ++i) {
        s.seed = mix_seed(101, i);
        xs.push_back(simulate_semilinear(m, s, linear_request({1})).xT[0]);
    }
    const double lam = kPi * kPi;
    const double var = std::pow(lam, -1.0) * -std::expm1(-2.0 * 0.1 * lam) / (2.0 * 0.1 * lam);
    EXPECT_LT(ks_normal(xs, var), 0.05);
}

TEST(SimulateSemilinear, AllenCahnRunsToCompletion) {
    const auto m = allen_cahn(100);
    SchemeSpec s;
    s.dt = 1e-4;
    s.t_final = 1.0;
    s.seed = 20240601;
    const auto out = simulate_semilinear(m, s, linear_request({4, 20, 100}, 0.4));
    for (std::size_t k = 0; k < 100; ++k) EXPECT_TRUE(std::isfinite(out.xT[k]));
    for (const auto& row : out.accumulators.rows) {
        EXPECT_TRUE(std::isfinite(row.denominator));
        EXPECT_GT(row.denominator, 0.0);
    }
}

TEST(SimulateSemilinear, Deterministic) {
    const auto m = allen_cahn(16);
    SchemeSpec s;
    s.dt = 1e-3;
    s.t_final = 0.2;
    s.seed = 5;
    s.snapshot_stride = 10;
    EstimatorRequest r;
    r.alpha = 0.4;
    r.n_list = {4, 16};
    const auto a = simulate_semilinear(m, s, r);
    const auto b = simulate_semilinear(m, s, r);
    EXPECT_EQ(a.xT, b.xT);
    EXPECT_EQ(a.trajectory.states, b.trajectory.states);
    for (std::size_t i = 0; i < a.accumulators.rows.size(); ++i) {
        EXPECT_EQ(a.accumulators.rows[i].denominator, b.accumulators.rows[i].denominator);
        EXPECT_EQ(a.accumulators.rows[i].bias_full, b.accumulators.rows[i].bias_full);
    }
    EXPECT_EQ(a.trajectory.states.size(), 21u);
}

TEST(SimulateSemilinear, ImplicitLinearStepContracts) {
    std::mt19937_64 rng(3);
    for (double h : {1e-4, 1e-2, 0.5, 10.0}) {
        ModelSpec m;
        m.theta_true = 0.3;
        m.gamma = 1.0;
        m.sigma = 0.0;
        m.n_sim = 8;
        std::normal_distribution<double> g;
        std::vector<double> x0(8);
        for (auto& v : x0) v = g(rng);
        m.initial_modes = ModeVector(x0);
        SchemeSpec s;
        s.dt = h;
        s.t_final = 20 * h;
        s.snapshot_stride = 1;
        const auto out = simulate_semilinear(m, s, linear_request({8}));
        for (std::size_t j = 1; j < out.trajectory.states.size(); ++j) {
            for (std::size_t k = 0; k < 8; ++k) {
                EXPECT_LE(std::abs(out.trajectory.states[j][k]),
                          std::abs(out.trajectory.states[j - 1][k]));
            }
        }
    }
}

TEST(SimulateSemilinear, BlowUpNamesStepAndMode) {
    ModelSpec m;
    m.theta_true = 0.01;
    m.gamma = 1.0;
    m.sigma = 0.0;
    m.nonlinearity = NonlinearitySpec::polynomial({0, 0, 0, 1});
    m.initial_modes = ModeVector{10.0};
    m.n_sim = 2;
    SchemeSpec s;
    s.dt = 0.1;
    s.t_final = 10.0;
    try {
        simulate_semilinear(m, s, linear_request({2}));
        FAIL() << "expected blow-up";
    } catch (const BlowUpError& e) {
        EXPECT_GE(e.step(), 1u);
        EXPECT_GE(e.mode(), 1u);
        const std::string msg = e.what();
        EXPECT_NE(msg.find("step " + std::to_string(e.step())), std::string::npos);
        EXPECT_NE(msg.find("mode " + std::to_string(e.mode())), std::string::npos);
    }
}

TEST(SimulateSemilinear, WeakAccuracyOfLinearCase) {
    // alpha = -1 makes D_N the plain sum of int (x^k)^2 dt, so per-mode
    // integrals are differences of consecutive rows.
    ModelSpec m;
    m.theta_true = 0.1;
    m.gamma = 0.5;
    m.n_sim = 20;
    SchemeSpec s;
    s.dt = 1e-4;
    s.t_final = 1.0;
    const auto req = linear_request({1, 4, 5, 19, 20}, -1.0);
    double sum1 = 0, sum5 = 0, sum20 = 0;
    const int M = 2000;
    for (int i = 0; i < M; ++i) {
        s.seed = mix_seed(202, i);
        const auto acc = simulate_semilinear(m, s, req).accumulators;
        sum1 += acc.row(1).denominator;
        sum5 += acc.row(5).denominator - acc.row(4).denominator;
        sum20 += acc.row(20).denominator - acc.row(19).denominator;
    }
    for (auto [k, sum] : {std::pair{1, sum1}, {5, sum5}, {20, sum20}}) {
        const double lam = kPi * kPi * k * k;
        const double exact = spde::testing::ou_mean_integral(0.1, 0.5, lam, 1.0);
        EXPECT_NEAR(sum / M, exact, 0.05 * exact) << "k = " << k;
    }
}

TEST(SimulateOuExact, StationaryVariance) {
    const int n = 100000;
    double s2 = 0, s4 = 0;
    const std::vector<double> times{200.0};
    for (int i = 0; i < n; ++i) {
        const double x = simulate_ou_exact(0.1, 0.5, {}, 1, times, mix_seed(9, i))[0][0];
        s2 += x * x;
        s4 += x * x * x * x;
    }
    const double var = s2 / n;
    const double se = std::sqrt((s4 / n - var * var) / n);
    const double target = std::pow(kPi, -4.0) / 0.2;
    EXPECT_NEAR(target, 0.0513299, 1e-7);
    EXPECT_NEAR(var, target, 3.0 * se);
}

TEST(SimulateOuExact, ZeroElapsedTimeKeepsState) {
    const std::vector<double> times{0.0, 0.5, 0.5 + 1e-13};
    const auto p = simulate_ou_exact(0.1, 0.5, {}, 4, times, 1);
    EXPECT_EQ(p[0], ModeVector(4));
    // a 1e-13 step moves the state by noise of size about sqrt(1e-13)
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(p[2][k], p[1][k], 2e-6);
    EXPECT_THROW(simulate_ou_exact(0.1, 0.5, {}, 4, std::vector<double>{0.5, 0.5}, 1),
                 ConfigError);
}

ModelSpec fhn_model(double sigma, double sigma_w, double eps) {
    FHNParams p;
    p.a = 0.5;
    p.b = 1.0;
    p.epsilon = eps;
    p.sigma_w = sigma_w;
    ModelSpec m;
    m.theta_true = 0.02;
    m.gamma = 0.8;
    m.sigma = sigma;
    m.nonlinearity = NonlinearitySpec::fitzhugh_nagumo(p);
    m.initial_modes = ModeVector{0.5};
    m.n_sim = 32;
    return m;
}

EstimatorRequest fhn_request(std::vector<std::size_t> n_list) {
    EstimatorRequest r;
    r.alpha = 0.8;
    r.n_list = std::move(n_list);
    r.variants = {Variant::full, Variant::partial1, Variant::partial2, Variant::linear};
    return r;
}

TEST(SimulateFhn, DecoupledLimitIsCubicModelBitwise) {
    const auto fm = fhn_model(1.0, 0.0, 0.0);
    ModelSpec cm = fm;
    cm.nonlinearity = NonlinearitySpec::polynomial({0, -0.5, 1.5, -1});
    SchemeSpec s;
    s.dt = 1e-3;
    s.t_final = 0.5;
    s.seed = 77;
    const auto a = simulate_fhn(fm, s, fhn_request({8, 32}));
    EstimatorRequest r = fhn_request({8, 32});
    r.variants = {Variant::full, Variant::partial, Variant::linear};
    const auto b = simulate_semilinear(cm, s, r);
    EXPECT_EQ(a.xT, b.xT);
    EXPECT_EQ(a.wT, ModeVector(32));
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(a.accumulators.rows[i].denominator, b.accumulators.rows[i].denominator);
        EXPECT_EQ(a.accumulators.rows[i].bias_full, b.accumulators.rows[i].bias_full);
        EXPECT_EQ(a.accumulators.rows[i].bias_partial, b.accumulators.rows[i].bias_partial);
    }
}

TEST(SimulateFhn, ZeroDataGivesZeroPath) {
    auto m = fhn_model(0.0, 0.0, 0.1);
    m.initial_modes = ModeVector{};
    SchemeSpec s;
    s.dt = 1e-3;
    s.t_final = 0.1;
    const auto out = simulate_fhn(m, s, fhn_request({32}));
    EXPECT_EQ(out.xT, ModeVector(32));
    EXPECT_EQ(out.wT, ModeVector(32));
    EXPECT_EQ(out.accumulators.rows[0].denominator, 0.0);
}

TEST(SimulateFhn, DeskRunStaysFinite) {
    const auto m = fhn_model(1.0, 0.05, 0.1);
    SchemeSpec s;
    s.dt = 1e-4;
    s.t_final = 1.0;
    s.seed = 2024;
    s.snapshot_stride = 100;
    const auto out = simulate_fhn(m, s, fhn_request({4, 32}));
    double vmax = 0;
    for (const auto& st : out.trajectory.states) {
        for (std::size_t k = 0; k < st.size(); ++k) vmax = std::max(vmax, std::abs(st[k]));
    }
    EXPECT_TRUE(std::isfinite(vmax));
    EXPECT_LT(vmax, 10.0);
    EXPECT_EQ(out.w_trajectory.states.size(), out.trajectory.states.size());
}

TEST(SimulateFhn, RejectsForeignBiasModel) {
    auto r = fhn_request({32});
    r.bias_model = NonlinearitySpec::burgers();
    SchemeSpec s;
    s.dt = 1e-3;
    s.t_final = 0.01;
    EXPECT_THROW(simulate_fhn(fhn_model(1.0, 0.05, 0.1), s, r), ConfigError);
}

TEST(Validation, ModelAndScheme) {
    auto m = allen_cahn(8);
    SchemeSpec s;
    s.dt = 1e-3;
    s.t_final = 0.01;
    m.theta_true = -1.0;
    try {
        simulate(m, s, linear_request({8}));
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("theta"), std::string::npos);
    }
    m = allen_cahn(8);
    m.gamma = 0.0;
    EXPECT_THROW(simulate(m, s, linear_request({8})), ConfigError);
    m = allen_cahn(8);
    EXPECT_THROW(simulate(m, s, linear_request({9})), ConfigError);
    EXPECT_THROW(simulate(m, s, linear_request({8, 4})), ConfigError);
    m.n_grid = 15;
    EXPECT_THROW(simulate(m, s, linear_request({8})), ConfigError);
    m = allen_cahn(8);
    s.dt = 0.3;
    s.t_final = 1.0;
    EXPECT_THROW(simulate(m, s, linear_request({8})), ConfigError);
    s.dt = 2.0;
    EXPECT_THROW(simulate(m, s, linear_request({8})), ConfigError);
    s.dt = 0.1;
    EXPECT_EQ(s.steps(), 10u);
}

}  // namespace
}  // namespace spde
