#include "spde/simulate.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "spde/errors.hpp"
#include "spde/noise.hpp"

namespace spde {
namespace {

[[noreturn]] void blow_up(std::size_t step, std::size_t mode, std::string_view what) {
    throw BlowUpError(step, mode,
                      "blow-up: non-finite " + std::string(what) + " at step " +
                          std::to_string(step) + ", mode " + std::to_string(mode));
}

void record(Trajectory& traj, double t, std::span<const double> x) {
    traj.times.push_back(t);
    traj.states.emplace_back(std::vector<double>(x.begin(), x.end()));
}

}  // namespace

std::size_t ModelSpec::resolved_grid() const {
    if (n_grid != 0) return n_grid;
    const std::size_t degree = std::max<std::size_t>(1, nonlinearity.degree());
    return transform_friendly_size(2 * degree * n_sim);
}

void ModelSpec::validate() const {
    op.validate();
    if (!(theta_true > 0.0) || !std::isfinite(theta_true)) {
        throw ConfigError("theta_true must be positive");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be positive");
    if (n_sim == 0) throw ConfigError("n_sim must be >= 1");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be nonnegative");
    nonlinearity.validate();
    if (initial_modes.size() > n_sim) {
        throw ConfigError("initial_modes has more entries than n_sim");
    }
    if (!initial_modes.empty()) initial_modes.validate("initial_modes");
    if (initial_w.size() > n_sim) throw ConfigError("initial_w_modes has more entries than n_sim");
    if (!initial_w.empty()) initial_w.validate("initial_w_modes");
    if (n_grid != 0 && nonlinearity.variant != NonlinearityKind::none) {
        const std::size_t need = nonlinearity.degree() * n_sim;
        if (n_grid < need) {
            throw ConfigError("n_grid = " + std::to_string(n_grid) +
                              " violates the dealiasing bound n_grid >= " + std::to_string(need));
        }
    }
}

std::size_t SchemeSpec::steps() const {
    validate();
    const double ratio = t_final / dt;
    return static_cast<std::size_t>(std::llround(ratio));
}

void SchemeSpec::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final must be positive");
    if (dt > t_final) throw ConfigError("dt must not exceed t_final");
    const double ratio = t_final / dt;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 4.0 * std::numeric_limits<double>::epsilon() * ratio) {
        throw ConfigError("t_final / dt must be an integer number of steps");
    }
}

SimOutput simulate_semilinear(const ModelSpec& model, const SchemeSpec& scheme,
                              const EstimatorRequest& req) {
    model.validate();
    scheme.validate();
    req.validate(model.n_sim);
    if (model.nonlinearity.variant == NonlinearityKind::fhn) {
        throw ConfigError("simulate_semilinear: use simulate_fhn for the coupled system");
    }
    const std::size_t n = model.n_sim;
    const std::size_t steps = scheme.steps();
    const double h = scheme.dt;
    const std::size_t grid = model.resolved_grid();

    std::vector<double> implicit(n), noise_scale(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = model.op.eigenvalue(k + 1);
        implicit[k] = 1.0 + h * model.theta_true * lam;
        noise_scale[k] = model.sigma * std::pow(lam, -model.gamma) * std::sqrt(h);
    }

    ModeVector x = model.initial_modes.truncated(n);
    ModeVector x_next(n);
    std::vector<double> fx(n, 0.0);
    DriftEvaluator drift(model.nonlinearity, model.op, n, grid);
    PathAccumulator acc(model.op, req, model.nonlinearity, n, grid, model.gamma,
                        model.sigma * model.sigma);
    const CounterNormal rng(scheme.seed);
    const bool noisy = model.sigma != 0.0;
    const bool ito = req.numerator_mode == NumeratorMode::ito_sum;
    std::vector<double> z(n, 0.0);

    SimOutput out;
    out.x0 = x;
    if (scheme.snapshot_stride != 0) record(out.trajectory, 0.0, x.span());

    for (std::size_t j = 0; j < steps; ++j) {
        if (!drift.is_zero()) drift.evaluate(x.span(), {}, fx);
        acc.observe(x.span(), {}, drift.is_zero() ? std::span<const double>{} : fx, h);
        if (noisy) rng.fill(j, z);
        for (std::size_t k = 0; k < n; ++k) {
            double rhs = x[k] + h * fx[k];
            if (noisy) rhs += noise_scale[k] * z[k];
            x_next[k] = rhs / implicit[k];
            if (!std::isfinite(x_next[k])) blow_up(j + 1, k + 1, "state");
        }
        if (ito) acc.observe_increment(x.span(), x_next.span());
        std::swap(x, x_next);
        if (scheme.snapshot_stride != 0 && (j + 1) % scheme.snapshot_stride == 0) {
            record(out.trajectory, static_cast<double>(j + 1) * h, x.span());
        }
    }
    out.xT = x;
    out.accumulators = acc.finish(out.x0, out.xT, scheme.t_final);
    return out;
}

SimOutput simulate_fhn(const ModelSpec& model, const SchemeSpec& scheme,
                       const EstimatorRequest& req) {
    model.validate();
    scheme.validate();
    req.validate(model.n_sim);
    if (model.nonlinearity.variant != NonlinearityKind::fhn) {
        throw ConfigError("simulate_fhn requires the fhn nonlinearity");
    }
    if (req.bias_model && req.bias_model->variant != NonlinearityKind::fhn &&
        req.bias_model->variant != NonlinearityKind::none) {
        throw ConfigError("coupled system: bias_model must be fhn or none");
    }
    const FHNParams& p = model.nonlinearity.fhn;
    const std::size_t n = model.n_sim;
    const std::size_t steps = scheme.steps();
    const double h = scheme.dt;
    const std::size_t grid = model.resolved_grid();

    std::vector<double> implicit(n), noise_v(n), noise_w(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = model.op.eigenvalue(k + 1);
        implicit[k] = 1.0 + h * model.theta_true * lam;
        noise_v[k] = model.sigma * std::pow(lam, -model.gamma) * std::sqrt(h);
        noise_w[k] = p.sigma_w * std::pow(lam, -p.gamma_w) * std::sqrt(h);
    }

    ModeVector v = model.initial_modes.truncated(n);
    ModeVector w = model.initial_w.truncated(n);
    ModeVector v_next(n), w_next(n);
    std::vector<double> fv(n, 0.0);
    DriftEvaluator drift(model.nonlinearity, model.op, n, grid);
    PathAccumulator acc(model.op, req, model.nonlinearity, n, grid, model.gamma,
                        model.sigma * model.sigma, /*coupled=*/true);
    const CounterNormal rng(scheme.seed);
    const bool noisy_v = model.sigma != 0.0;
    const bool noisy_w = p.sigma_w != 0.0;
    const bool ito = req.numerator_mode == NumeratorMode::ito_sum;
    std::vector<double> zv(n, 0.0), zw(n, 0.0);

    SimOutput out;
    out.x0 = v;
    out.w0 = w;
    if (scheme.snapshot_stride != 0) {
        record(out.trajectory, 0.0, v.span());
        record(out.w_trajectory, 0.0, w.span());
    }

    for (std::size_t j = 0; j < steps; ++j) {
        drift.evaluate(v.span(), w.span(), fv);
        acc.observe(v.span(), w.span(), fv, h);
        if (noisy_v) rng.fill(j, zv);
        if (noisy_w) rng.fill_auxiliary(j, zw);
        for (std::size_t k = 0; k < n; ++k) {
            double rhs = v[k] + h * fv[k];
            double w_new = w[k] + h * p.epsilon * (v[k] - p.b * w[k]);
            if (noisy_v) rhs += noise_v[k] * zv[k];
            if (noisy_w) w_new += noise_w[k] * zw[k];
            v_next[k] = rhs / implicit[k];
            w_next[k] = w_new;
            if (!std::isfinite(v_next[k])) blow_up(j + 1, k + 1, "v state");
            if (!std::isfinite(w_next[k])) blow_up(j + 1, k + 1, "w state");
        }
        if (ito) acc.observe_increment(v.span(), v_next.span());
        std::swap(v, v_next);
        std::swap(w, w_next);
        if (scheme.snapshot_stride != 0 && (j + 1) % scheme.snapshot_stride == 0) {
            const double t = static_cast<double>(j + 1) * h;
            record(out.trajectory, t, v.span());
            record(out.w_trajectory, t, w.span());
        }
    }
    out.xT = v;
    out.wT = w;
    out.accumulators = acc.finish(out.x0, out.xT, scheme.t_final);
    return out;
}

SimOutput simulate(const ModelSpec& model, const SchemeSpec& scheme, const EstimatorRequest& req) {
    if (model.nonlinearity.variant == NonlinearityKind::fhn) {
        return simulate_fhn(model, scheme, req);
    }
    return simulate_semilinear(model, scheme, req);
}

namespace {

struct OuTransition {
    double decay;
    double scale;
};

OuTransition ou_transition(double theta, double lam, double gamma, double sigma, double h) {
    const double rate = theta * lam;
    const double var = -std::expm1(-2.0 * rate * h) / (2.0 * rate);
    return {std::exp(-rate * h), sigma * std::pow(lam, -gamma) * std::sqrt(var)};
}

}  // namespace

std::vector<ModeVector> simulate_ou_exact(double theta, double gamma, const OperatorSpec& spec,
                                          std::size_t n_modes, std::span<const double> times,
                                          std::uint64_t seed, double sigma) {
    spec.validate();
    if (!(theta > 0.0)) throw ConfigError("theta must be positive");
    if (n_modes == 0) throw ConfigError("n_modes must be >= 1");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0) || (i > 0 && !(times[i] > times[i - 1]))) {
            throw ConfigError("times must be nonnegative and strictly increasing");
        }
    }
    const CounterNormal rng(seed);
    std::vector<double> lam = eigenvalues(spec, n_modes);
    ModeVector x(n_modes);
    std::vector<double> z(n_modes);
    std::vector<ModeVector> path;
    path.reserve(times.size());
    double t_prev = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double h = times[i] - t_prev;
        rng.fill(i, z);
        for (std::size_t k = 0; k < n_modes; ++k) {
            const auto tr = ou_transition(theta, lam[k], gamma, sigma, h);
            x[k] = tr.decay * x[k] + tr.scale * z[k];
        }
        path.push_back(x);
        t_prev = times[i];
    }
    return path;
}

SimOutput simulate_ou_exact_run(const ModelSpec& model, const SchemeSpec& scheme,
                                const EstimatorRequest& req) {
    model.validate();
    scheme.validate();
    req.validate(model.n_sim);
    if (model.nonlinearity.variant != NonlinearityKind::none) {
        throw ConfigError("the exact OU backend requires nonlinearity = none");
    }
    const std::size_t n = model.n_sim;
    const std::size_t steps = scheme.steps();
    const double h = scheme.dt;

    std::vector<OuTransition> tr(n);
    for (std::size_t k = 0; k < n; ++k) {
        tr[k] = ou_transition(model.theta_true, model.op.eigenvalue(k + 1), model.gamma,
                              model.sigma, h);
    }
    ModeVector x(n), x_next(n);
    PathAccumulator acc(model.op, req, NonlinearitySpec::none(), n, 0, model.gamma,
                        model.sigma * model.sigma);
    const CounterNormal rng(scheme.seed);
    const bool ito = req.numerator_mode == NumeratorMode::ito_sum;
    std::vector<double> z(n);

    SimOutput out;
    out.x0 = x;
    if (scheme.snapshot_stride != 0) record(out.trajectory, 0.0, x.span());
    for (std::size_t j = 0; j < steps; ++j) {
        acc.observe(x.span(), {}, {}, h);
        rng.fill(j, z);
        for (std::size_t k = 0; k < n; ++k) {
            x_next[k] = tr[k].decay * x[k] + tr[k].scale * z[k];
        }
        if (ito) acc.observe_increment(x.span(), x_next.span());
        std::swap(x, x_next);
        if (scheme.snapshot_stride != 0 && (j + 1) % scheme.snapshot_stride == 0) {
            record(out.trajectory, static_cast<double>(j + 1) * h, x.span());
        }
    }
    out.xT = x;
    out.accumulators = acc.finish(out.x0, out.xT, scheme.t_final);
    return out;
}

}  // namespace spde
