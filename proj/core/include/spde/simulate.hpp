#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spde/estimate.hpp"
#include "spde/fields.hpp"
#include "spde/spectrum.hpp"

namespace spde {

/// dX = (theta A X + F(X)) dt + sigma (-A)^{-gamma} dW, truncated to n_sim modes.
/// For the FitzHugh-Nagumo variant X is the v component and initial_w holds
/// the recovery variable.
struct ModelSpec {
    OperatorSpec op;
    double theta_true = 1.0;
    double gamma = 1.0;
    NonlinearitySpec nonlinearity;
    ModeVector initial_modes;
    ModeVector initial_w;
    std::size_t n_sim = 1;
    /// Collocation points for F at full resolution; 0 picks the smallest
    /// 2^p - 1 >= 2 m_F n_sim.
    std::size_t n_grid = 0;
    /// Noise amplitude sigma; 0 switches the noise off.
    double sigma = 1.0;

    std::size_t resolved_grid() const;
    void validate() const;
};

struct SchemeSpec {
    double dt = 1e-4;
    double t_final = 1.0;
    std::uint64_t seed = 0;
    /// Keep every k-th state in the returned trajectory; 0 keeps none.
    std::size_t snapshot_stride = 0;

    std::size_t steps() const;
    void validate() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ModeVector> states;

    bool empty() const noexcept { return times.empty(); }
};

struct SimOutput {
    ModeVector x0;
    ModeVector xT;
    EstimatorAccumulator accumulators;
    Trajectory trajectory;
    // FitzHugh-Nagumo recovery variable.
    ModeVector w0;
    ModeVector wT;
    Trajectory w_trajectory;
};

/// Linear-implicit Euler in mode space:
///   x_{j+1}^k = (x_j^k + h F^k(X_j) + sigma lambda_k^{-gamma} dW_j^k) / (1 + h theta lambda_k)
/// with dW_j^k ~ N(0, h) addressed by (seed, k, j). Estimator integrals are
/// accumulated on the fly at every step.
SimOutput simulate_semilinear(const ModelSpec& model, const SchemeSpec& scheme,
                              const EstimatorRequest& req);

/// FitzHugh-Nagumo: v stepped as above, w by explicit Euler
///   w_{j+1} = w_j + h eps (v_j - b w_j) + sigma_w lambda_k^{-gamma_w} dW2_j^k.
SimOutput simulate_fhn(const ModelSpec& model, const SchemeSpec& scheme,
                       const EstimatorRequest& req);

/// Dispatches on the model's nonlinearity.
SimOutput simulate(const ModelSpec& model, const SchemeSpec& scheme, const EstimatorRequest& req);

/// Exact Gaussian transitions of the linear equation (F = 0) started at 0:
///   x_{t+h} = e^{-theta lambda h} x_t + lambda^{-gamma} sqrt((1 - e^{-2 theta lambda h}) / (2 theta lambda)) xi.
/// Returns the states at `times` (strictly increasing, times[0] >= 0).
std::vector<ModeVector> simulate_ou_exact(double theta, double gamma, const OperatorSpec& spec,
                                          std::size_t n_modes, std::span<const double> times,
                                          std::uint64_t seed, double sigma = 1.0);

/// Exact-OU backend on the uniform grid of `scheme`, with estimator integrals
/// accumulated from the exact samples. Uses theta, gamma, sigma, op and n_sim
/// of the model; the nonlinearity must be none and the path starts at 0.
SimOutput simulate_ou_exact_run(const ModelSpec& model, const SchemeSpec& scheme,
                                const EstimatorRequest& req);

}  // namespace spde
