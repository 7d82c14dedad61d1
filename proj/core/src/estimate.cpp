#include "spde/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spde/errors.hpp"

namespace spde {

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::full: return "full";
        case Variant::partial: return "partial";
        case Variant::linear: return "linear";
        case Variant::partial1: return "partial1";
        case Variant::partial2: return "partial2";
    }
    return "full";
}

Variant variant_from_string(std::string_view name) {
    if (name == "full") return Variant::full;
    if (name == "partial") return Variant::partial;
    if (name == "linear") return Variant::linear;
    if (name == "partial1") return Variant::partial1;
    if (name == "partial2") return Variant::partial2;
    throw ConfigError("unknown estimator variant '" + std::string(name) + "'");
}

std::string_view to_string(NumeratorMode m) {
    return m == NumeratorMode::robust ? "robust" : "ito_sum";
}

NumeratorMode numerator_mode_from_string(std::string_view name) {
    if (name == "robust") return NumeratorMode::robust;
    if (name == "ito_sum") return NumeratorMode::ito_sum;
    throw ConfigError("unknown numerator_mode '" + std::string(name) + "'");
}

bool EstimatorRequest::wants(Variant v) const {
    return std::find(variants.begin(), variants.end(), v) != variants.end();
}

void EstimatorRequest::validate(std::size_t n_sim) const {
    if (!std::isfinite(alpha)) throw ConfigError("alpha must be finite");
    if (n_list.empty()) throw ConfigError("N_list must be nonempty");
    if (n_list.front() == 0) throw ConfigError("N_list entries must be >= 1");
    for (std::size_t i = 1; i < n_list.size(); ++i) {
        if (n_list[i] <= n_list[i - 1]) throw ConfigError("N_list must be strictly ascending");
    }
    if (n_list.back() > n_sim) {
        throw ConfigError("N_list maximum " + std::to_string(n_list.back()) +
                          " exceeds n_sim " + std::to_string(n_sim));
    }
    if (variants.empty()) throw ConfigError("variants must be nonempty");
    if (bias_model) bias_model->validate();
}

const AccumulatorRow& EstimatorAccumulator::row(std::size_t n) const {
    for (const auto& r : rows) {
        if (r.n == n) return r;
    }
    throw ConfigError("truncation level N = " + std::to_string(n) + " was not accumulated");
}

// ---------------------------------------------------------------------------

PathAccumulator::PathAccumulator(const OperatorSpec& op, const EstimatorRequest& req,
                                 const NonlinearitySpec& true_f, std::size_t n_sim,
                                 std::size_t n_grid, double gamma, double noise_variance,
                                 bool coupled)
    : op_(op),
      req_(req),
      n_sim_(n_sim),
      gamma_(gamma),
      noise_variance_(noise_variance),
      coupled_(coupled) {
    req_.validate(n_sim);
    const NonlinearitySpec model = req_.bias_model.value_or(true_f);
    reuse_true_f_ = model == true_f;
    want_partial_ = req_.wants(Variant::partial) || req_.wants(Variant::partial1) ||
                    req_.wants(Variant::partial2);
    const std::size_t m = req_.max_n();
    w_denom_.resize(m);
    w_bias_.resize(m);
    for (std::size_t k = 1; k <= m; ++k) {
        const double lam = op_.eigenvalue(k);
        w_denom_[k - 1] = std::pow(lam, 2.0 + 2.0 * req_.alpha);
        w_bias_[k - 1] = std::pow(lam, 1.0 + 2.0 * req_.alpha);
    }
    rows_.resize(req_.n_list.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) rows_[i].n = req_.n_list[i];
    bias_eval_.emplace(model, op_, n_sim_, n_grid);
    f_buf_.resize(m);
}

void PathAccumulator::observe(std::span<const double> x, std::span<const double> w,
                              std::span<const double> f_true, double dt) {
    const std::size_t m = req_.max_n();
    const bool zero_model = bias_eval_->is_zero();
    std::span<const double> f_full;
    if (!zero_model) {
        if (reuse_true_f_ && f_true.size() >= m) {
            f_full = f_true.first(m);
        } else {
            bias_eval_->evaluate(x, w, f_buf_);
            f_full = f_buf_;
        }
    }

    double s_denom = 0.0;
    double s_bias = 0.0;
    std::size_t next = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const double xk = x[k];
        s_denom += w_denom_[k] * xk * xk;
        if (!zero_model) s_bias += w_bias_[k] * xk * f_full[k];
        if (k + 1 == rows_[next].n) {
            rows_[next].denominator += dt * s_denom;
            rows_[next].bias_full += dt * s_bias;
            ++next;
        }
    }

    if (!want_partial_ || zero_model) return;
    const bool subtract_w = coupled_ && bias_eval_->spec().variant == NonlinearityKind::fhn;
    for (auto& row : rows_) {
        const std::size_t n = row.n;
        partial_buf_.resize(n);
        // F(X^N) for scalar models; for the coupled system this is F(v^N, 0).
        bias_eval_->evaluate(x.first(n), {}, partial_buf_);
        double s_trunc = 0.0;
        double s_coupling = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            s_trunc += w_bias_[k] * x[k] * partial_buf_[k];
            if (subtract_w && k < w.size()) s_coupling += w_bias_[k] * x[k] * w[k];
        }
        if (coupled_) {
            row.bias_partial += dt * (s_trunc - s_coupling);
            row.bias_partial2 += dt * s_trunc;
        } else {
            row.bias_partial += dt * s_trunc;
        }
    }
}

void PathAccumulator::observe_increment(std::span<const double> x_now,
                                        std::span<const double> x_next) {
    double s = 0.0;
    std::size_t next = 0;
    for (std::size_t k = 0; k < req_.max_n(); ++k) {
        s += w_bias_[k] * x_now[k] * (x_next[k] - x_now[k]);
        if (k + 1 == rows_[next].n) {
            rows_[next].ito_numerator += s;
            ++next;
        }
    }
}

EstimatorAccumulator PathAccumulator::finish(ModeVector x0, ModeVector xT, double t_final) const {
    EstimatorAccumulator acc;
    acc.op = op_;
    acc.alpha = req_.alpha;
    acc.gamma = gamma_;
    acc.t_final = t_final;
    acc.noise_variance = noise_variance_;
    acc.coupled = coupled_;
    acc.x0 = std::move(x0);
    acc.xT = std::move(xT);
    acc.rows = rows_;
    return acc;
}

// ---------------------------------------------------------------------------

double robust_numerator(const ModeVector& x0, const ModeVector& xT, double t_final,
                        double alpha, double gamma, std::size_t n, const OperatorSpec& spec,
                        double noise_variance) {
    if (x0.size() < n || xT.size() < n) {
        throw ConfigError("robust_numerator: endpoints need at least N modes");
    }
    double sum = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double lam = spec.eigenvalue(k);
        const double a = x0[k - 1];
        const double b = xT[k - 1];
        const double qv = t_final * noise_variance * std::pow(lam, -2.0 * gamma);
        sum += std::pow(lam, 1.0 + 2.0 * alpha) * (b * b - a * a - qv);
    }
    return 0.5 * sum;
}

double numerator(const EstimatorAccumulator& acc, const EstimatorRequest& req, std::size_t n) {
    if (req.numerator_mode == NumeratorMode::ito_sum) return acc.row(n).ito_numerator;
    return robust_numerator(acc.x0, acc.xT, acc.t_final, acc.alpha, acc.gamma, n, acc.op,
                            acc.noise_variance);
}

namespace {

struct LinearPart {
    double numerator;
    double denominator;
    double theta;
};

LinearPart linear_part(const EstimatorAccumulator& acc, const EstimatorRequest& req,
                       std::size_t n) {
    const auto& row = acc.row(n);
    const double d = row.denominator;
    if (!std::isfinite(d)) {
        throw BlowUpError(0, n, "non-finite denominator D_N at N = " + std::to_string(n));
    }
    if (!(d > kDegenerateDenominator)) {
        throw DegenerateTrajectoryError("zero denominator D_N at N = " + std::to_string(n) +
                                        " (degenerate trajectory)");
    }
    const double num = numerator(acc, req, n);
    return {num, d, -num / d};
}

EstimateResult make_result(Variant v, std::size_t n, double alpha, const LinearPart& lin,
                           double bias_integral) {
    EstimateResult r;
    r.variant = v;
    r.n = n;
    r.alpha = alpha;
    r.numerator = lin.numerator;
    r.denominator = lin.denominator;
    r.theta_hat = lin.theta + bias_integral / lin.denominator;
    r.bias = r.theta_hat - lin.theta;
    return r;
}

}  // namespace

EstimateResult estimate_theta(const EstimatorAccumulator& acc, const EstimatorRequest& req,
                              Variant variant, std::size_t n) {
    const LinearPart lin = linear_part(acc, req, n);
    const auto& row = acc.row(n);
    switch (variant) {
        case Variant::linear:
            return make_result(variant, n, acc.alpha, lin, 0.0);
        case Variant::full:
            return make_result(variant, n, acc.alpha, lin, row.bias_full);
        case Variant::partial:
            if (acc.coupled) throw ConfigError("coupled system: use partial1 or partial2");
            return make_result(variant, n, acc.alpha, lin, row.bias_partial);
        case Variant::partial1:
            if (!acc.coupled) throw ConfigError("partial1 requires a coupled system");
            return make_result(variant, n, acc.alpha, lin, row.bias_partial);
        case Variant::partial2:
            if (!acc.coupled) throw ConfigError("partial2 requires a coupled system");
            return make_result(variant, n, acc.alpha, lin, row.bias_partial2);
    }
    throw ConfigError("unknown variant");
}

Decomposition decompose(const EstimatorAccumulator& acc, const EstimatorRequest& req,
                        std::size_t n) {
    const LinearPart lin = linear_part(acc, req, n);
    const auto& row = acc.row(n);
    const auto full = make_result(Variant::full, n, acc.alpha, lin, row.bias_full);
    const auto partial = make_result(Variant::partial, n, acc.alpha, lin, row.bias_partial);
    Decomposition d;
    d.n = n;
    d.theta_linear = lin.theta;
    d.theta_full = full.theta_hat;
    d.theta_partial = partial.theta_hat;
    d.bias_full = full.bias;
    d.bias_partial = partial.bias;
    return d;
}

std::array<EstimateResult, 4> coupled_estimates(const EstimatorAccumulator& acc,
                                                const EstimatorRequest& req, std::size_t n) {
    if (!acc.coupled) throw ConfigError("coupled_estimates requires a coupled run");
    const LinearPart lin = linear_part(acc, req, n);
    const auto& row = acc.row(n);
    return {make_result(Variant::full, n, acc.alpha, lin, row.bias_full),
            make_result(Variant::partial1, n, acc.alpha, lin, row.bias_partial),
            make_result(Variant::partial2, n, acc.alpha, lin, row.bias_partial2),
            make_result(Variant::linear, n, acc.alpha, lin, 0.0)};
}

double standardize(double theta_hat, std::size_t n, double theta_true, double variance,
                   double beta) {
    if (!(variance > 0.0)) throw DomainError("standardize: variance V must be positive");
    const double rate = std::pow(static_cast<double>(n), 0.5 * (beta + 1.0));
    return rate * (theta_hat - theta_true) / std::sqrt(variance);
}

double standardize(const EstimateResult& result, double theta_true, double variance,
                   double beta) {
    return standardize(result.theta_hat, result.n, theta_true, variance, beta);
}

bool alpha_admissible(double alpha, double gamma, double beta) {
    return alpha > gamma - (1.0 + 1.0 / beta) / 8.0;
}

std::optional<std::string> alpha_warning(double alpha, double gamma, double beta) {
    if (alpha_admissible(alpha, gamma, beta)) return std::nullopt;
    std::ostringstream os;
    os << "alpha = " << alpha << " violates alpha > gamma - (1+1/beta)/8 = "
       << gamma - (1.0 + 1.0 / beta) / 8.0
       << "; consistency and asymptotic normality are not guaranteed";
    return os.str();
}

}  // namespace spde
