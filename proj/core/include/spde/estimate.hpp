#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spde/fields.hpp"
#include "spde/spectrum.hpp"

namespace spde {

/// Estimator variants. `partial1`/`partial2` only exist for the coupled
/// (FitzHugh-Nagumo) system, where `partial` is not used.
enum class Variant { full, partial, linear, partial1, partial2 };

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view name);

enum class NumeratorMode { robust, ito_sum };

std::string_view to_string(NumeratorMode m);
NumeratorMode numerator_mode_from_string(std::string_view name);

struct EstimatorRequest {
    double alpha = 0.0;
    std::vector<std::size_t> n_list;
    std::vector<Variant> variants{Variant::full, Variant::partial, Variant::linear};
    /// F used inside the bias terms; empty means the simulated (true) F.
    std::optional<NonlinearitySpec> bias_model;
    NumeratorMode numerator_mode = NumeratorMode::robust;

    bool wants(Variant v) const;
    std::size_t max_n() const { return n_list.empty() ? 0 : n_list.back(); }
    /// Throws ConfigError unless n_list is nonempty, strictly ascending, and
    /// bounded by n_sim.
    void validate(std::size_t n_sim) const;
};

/// Time integrals for one truncation level N (left-endpoint Riemann sums).
struct AccumulatorRow {
    std::size_t n = 0;
    /// D_N = int sum_{k<=N} lambda_k^{2+2 alpha} (x^k)^2 dt
    double denominator = 0.0;
    /// int sum_{k<=N} lambda_k^{1+2 alpha} x^k F^k(X) dt
    double bias_full = 0.0;
    /// Same with F evaluated at X^N (coupled: at (X^N, X_perp)).
    double bias_partial = 0.0;
    /// Coupled only: F evaluated at (X^N, 0).
    double bias_partial2 = 0.0;
    /// sum_j sum_{k<=N} lambda_k^{1+2 alpha} x_j^k (x_{j+1}^k - x_j^k)
    double ito_numerator = 0.0;
};

struct EstimatorAccumulator {
    OperatorSpec op;
    double alpha = 0.0;
    double gamma = 0.0;
    double t_final = 0.0;
    /// sigma^2 of the observed equation's noise (1 unless rescaled).
    double noise_variance = 1.0;
    bool coupled = false;
    ModeVector x0;
    ModeVector xT;
    std::vector<AccumulatorRow> rows;

    const AccumulatorRow& row(std::size_t n) const;
};

struct EstimateResult {
    Variant variant = Variant::full;
    std::size_t n = 0;
    double alpha = 0.0;
    double theta_hat = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    /// The bias increment actually added to the linear estimate.
    double bias = 0.0;
    std::optional<double> z;
};

/// Feeds a discretely observed path into the estimator integrals.
///
/// Call observe() once per step with the state at the left endpoint, and
/// observe_increment() with consecutive states when the Ito-sum numerator is
/// wanted.
class PathAccumulator {
public:
    PathAccumulator(const OperatorSpec& op, const EstimatorRequest& req,
                    const NonlinearitySpec& true_f, std::size_t n_sim, std::size_t n_grid,
                    double gamma, double noise_variance = 1.0, bool coupled = false);

    /// `f_true` may hold F(x, w) on all n_sim modes; it is reused for the full
    /// bias when the bias model is the true F, otherwise pass an empty span.
    void observe(std::span<const double> x, std::span<const double> w,
                 std::span<const double> f_true, double dt);
    void observe_increment(std::span<const double> x_now, std::span<const double> x_next);

    /// True when the full bias needs its own evaluation of F.
    bool needs_own_full_evaluation() const noexcept { return !reuse_true_f_; }

    EstimatorAccumulator finish(ModeVector x0, ModeVector xT, double t_final) const;

private:
    OperatorSpec op_;
    EstimatorRequest req_;
    std::size_t n_sim_;
    double gamma_;
    double noise_variance_;
    bool coupled_;
    bool reuse_true_f_;
    bool want_partial_;
    std::vector<double> w_denom_;  // lambda_k^{2+2 alpha}
    std::vector<double> w_bias_;   // lambda_k^{1+2 alpha}
    std::vector<AccumulatorRow> rows_;
    std::optional<DriftEvaluator> bias_eval_;
    std::vector<double> f_buf_;
    std::vector<double> partial_buf_;
};

/// Ito-formula form of int <(-A)^{1+2a} X^N, dX^N>:
///   1/2 sum_{k<=N} lambda_k^{1+2a} ((x_T^k)^2 - (x_0^k)^2 - T sigma^2 lambda_k^{-2 gamma}).
double robust_numerator(const ModeVector& x0, const ModeVector& xT, double t_final,
                        double alpha, double gamma, std::size_t n, const OperatorSpec& spec,
                        double noise_variance = 1.0);

/// Numerator selected by the request (robust or Ito sum).
double numerator(const EstimatorAccumulator& acc, const EstimatorRequest& req, std::size_t n);

EstimateResult estimate_theta(const EstimatorAccumulator& acc, const EstimatorRequest& req,
                              Variant variant, std::size_t n);

struct Decomposition {
    std::size_t n = 0;
    double theta_full = 0.0;
    double theta_partial = 0.0;
    double theta_linear = 0.0;
    /// theta_full - theta_linear, exactly as evaluated.
    double bias_full = 0.0;
    /// theta_partial - theta_linear, exactly as evaluated.
    double bias_partial = 0.0;
};

/// All three estimators at once; the bias fields satisfy
/// theta_full - theta_linear == bias_full bit for bit (same for partial).
Decomposition decompose(const EstimatorAccumulator& acc, const EstimatorRequest& req,
                        std::size_t n);

/// full, partial1, partial2, linear for the coupled system.
std::array<EstimateResult, 4> coupled_estimates(const EstimatorAccumulator& acc,
                                                const EstimatorRequest& req, std::size_t n);

/// z = N^{(beta+1)/2} (theta_hat - theta_true) / sqrt(V).
double standardize(const EstimateResult& result, double theta_true, double variance,
                   double beta);
double standardize(double theta_hat, std::size_t n, double theta_true, double variance,
                   double beta);

/// alpha > gamma - (1 + 1/beta)/8, the hypothesis of the asymptotic theory.
bool alpha_admissible(double alpha, double gamma, double beta);
/// Human-readable warning when alpha is not admissible, empty otherwise.
std::optional<std::string> alpha_warning(double alpha, double gamma, double beta);

/// Denominators below this are treated as zero.
inline constexpr double kDegenerateDenominator = 1e-300;

}  // namespace spde
