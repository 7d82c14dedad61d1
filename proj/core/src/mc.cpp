#include "spde/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "spde/noise.hpp"
#include "spde/theory.hpp"

namespace spde {

std::string_view to_string(Backend b) {
    return b == Backend::ou_exact ? "ou_exact" : "auto";
}

Backend backend_from_string(std::string_view name) {
    if (name == "auto") return Backend::automatic;
    if (name == "ou_exact") return Backend::ou_exact;
    throw ConfigError("unknown backend '" + std::string(name) + "' (expected auto or ou_exact)");
}

std::size_t StudySpec::resolved_histogram_N() const {
    return histogram_N == 0 ? req.max_n() : histogram_N;
}

void StudySpec::validate() const {
    model.validate();
    scheme.validate();
    req.validate(model.n_sim);
    if (n_trials == 0) throw ConfigError("n_trials must be >= 1");
    const std::size_t hn = resolved_histogram_N();
    if (std::find(req.n_list.begin(), req.n_list.end(), hn) == req.n_list.end()) {
        throw ConfigError("histogram_N = " + std::to_string(hn) + " is not in N_list");
    }
    if (!(histogram_bin_width > 0.0)) throw ConfigError("histogram_bin_width must be positive");
    if (!(histogram_hi > histogram_lo)) throw ConfigError("histogram_range must be increasing");
    const bool coupled = model.nonlinearity.variant == NonlinearityKind::fhn;
    for (Variant v : req.variants) {
        if (coupled && v == Variant::partial) {
            throw ConfigError("variants: the coupled system uses partial1/partial2, not partial");
        }
        if (!coupled && (v == Variant::partial1 || v == Variant::partial2)) {
            throw ConfigError("variants: partial1/partial2 require the fhn nonlinearity");
        }
    }
    if (backend == Backend::ou_exact && model.nonlinearity.variant != NonlinearityKind::none) {
        throw ConfigError("backend = ou_exact requires nonlinearity = none");
    }
}

const VariantSummary* MCReport::find(Variant v) const {
    for (const auto& s : variants) {
        if (s.variant == v) return &s;
    }
    return nullptr;
}

const SummaryRow* MCReport::row(Variant v, std::size_t n) const {
    const auto* s = find(v);
    if (!s) return nullptr;
    for (const auto& r : s->rows) {
        if (r.n == n) return &r;
    }
    return nullptr;
}

double percentile_type7(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw DomainError("percentile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_distance_normal(std::vector<double> sample) {
    if (sample.empty()) throw DomainError("KS distance of an empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = normal_cdf(sample[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw DomainError("log-log slope needs at least two (x, y) pairs");
    }
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("log-log slope needs positive data");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx == 0.0) throw DomainError("log-log slope needs distinct x values");
    return sxy / sxx;
}

Histogram make_histogram(std::span<const double> z, double lo, double hi, double width) {
    Histogram h;
    h.lo = lo;
    h.width = width;
    const auto bins = static_cast<std::size_t>(std::max(1.0, std::round((hi - lo) / width)));
    h.counts.assign(bins, 0);
    for (double v : z) {
        if (std::isnan(v)) continue;
        const double pos = std::floor((v - lo) / width);
        std::size_t idx = 0;
        if (pos >= static_cast<double>(bins)) {
            idx = bins - 1;
        } else if (pos > 0.0) {
            idx = static_cast<std::size_t>(pos);
        }
        ++h.counts[idx];
    }
    return h;
}

namespace {

SummaryRow summarize_sample(std::vector<double> theta_hat, const std::vector<double>& z,
                            double theta_true, std::size_t n) {
    SummaryRow row;
    row.n = n;
    row.count = theta_hat.size();
    const double m = static_cast<double>(theta_hat.size());
    double sum = 0.0, sq_err = 0.0;
    for (double t : theta_hat) {
        sum += t;
        sq_err += (t - theta_true) * (t - theta_true);
    }
    row.mean = sum / m;
    double ss = 0.0;
    for (double t : theta_hat) ss += (t - row.mean) * (t - row.mean);
    row.variance = ss / m;
    row.mse = sq_err / m;
    std::sort(theta_hat.begin(), theta_hat.end());
    row.median = percentile_type7(theta_hat, 0.5);
    row.p025 = percentile_type7(theta_hat, 0.025);
    row.p975 = percentile_type7(theta_hat, 0.975);
    if (!z.empty()) {
        const double zm = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
        row.z_mean = zm;
        if (z.size() > 1) {
            double zs = 0.0;
            for (double v : z) zs += (v - zm) * (v - zm);
            row.z_variance = zs / static_cast<double>(z.size() - 1);
        }
    }
    return row;
}

}  // namespace

MCReport summarize(std::vector<EstimateRecord> estimates, double theta_true,
                   const std::map<std::size_t, double>& V_by_N, double beta,
                   const SummaryOptions& opts) {
    if (estimates.empty()) throw DomainError("summarize: no estimates");
    MCReport rep;
    rep.theta_true = theta_true;
    rep.beta = beta;
    rep.alpha = estimates.front().alpha;
    rep.histogram_N = opts.histogram_N;
    if (!V_by_N.empty()) rep.V = V_by_N.begin()->second;

    for (auto& e : estimates) {
        const auto it = V_by_N.find(e.n);
        if (it != V_by_N.end()) {
            e.z = standardize(e.theta_hat, e.n, theta_true, it->second, beta);
        } else {
            e.z.reset();
        }
    }

    // Variants in first-seen order, N ascending.
    std::vector<Variant> order;
    for (const auto& e : estimates) {
        if (std::find(order.begin(), order.end(), e.variant) == order.end()) {
            order.push_back(e.variant);
        }
    }
    std::set<std::size_t> trials;
    for (const auto& e : estimates) trials.insert(e.trial);
    rep.n_trials = trials.size();

    for (Variant v : order) {
        VariantSummary vs;
        vs.variant = v;
        std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> by_n;
        for (const auto& e : estimates) {
            if (e.variant != v) continue;
            if (!std::isfinite(e.theta_hat)) continue;
            auto& slot = by_n[e.n];
            slot.first.push_back(e.theta_hat);
            if (e.z) slot.second.push_back(*e.z);
        }
        if (by_n.empty()) {
            rep.warnings.push_back("variant " + std::string(to_string(v)) +
                                   " has no finite estimates and was omitted");
            continue;
        }
        std::vector<double> ns, mses;
        for (auto& [n, data] : by_n) {
            vs.rows.push_back(summarize_sample(data.first, data.second, theta_true, n));
            if (vs.rows.back().mse > 0.0) {
                ns.push_back(static_cast<double>(n));
                mses.push_back(vs.rows.back().mse);
            }
            if (n == opts.histogram_N && !data.second.empty()) {
                vs.ks_distance = ks_distance_normal(data.second);
                auto h = make_histogram(data.second, opts.lo, opts.hi, opts.bin_width);
                h.n = n;
                vs.histogram = std::move(h);
            }
        }
        if (ns.size() >= 2) vs.mse_slope = loglog_slope(ns, mses);
        rep.variants.push_back(std::move(vs));
    }
    rep.estimates = std::move(estimates);
    return rep;
}

std::vector<EstimateRecord> run_trial(const StudySpec& spec, std::size_t trial) {
    SchemeSpec scheme = spec.scheme;
    scheme.seed = mix_seed(spec.scheme.seed, trial);
    scheme.snapshot_stride = 0;
    const SimOutput out = spec.backend == Backend::ou_exact
                              ? simulate_ou_exact_run(spec.model, scheme, spec.req)
                              : simulate(spec.model, scheme, spec.req);
    std::vector<EstimateRecord> recs;
    recs.reserve(spec.req.n_list.size() * spec.req.variants.size());
    for (std::size_t n : spec.req.n_list) {
        for (Variant v : spec.req.variants) {
            const EstimateResult r = estimate_theta(out.accumulators, spec.req, v, n);
            if (!std::isfinite(r.theta_hat)) {
                throw BlowUpError(0, 0, "non-finite estimate for " + std::string(to_string(v)) +
                                            " at N = " + std::to_string(n));
            }
            recs.push_back({trial, v, n, r.alpha, r.theta_hat, std::nullopt});
        }
    }
    return recs;
}

MCReport run_study(const StudySpec& spec, unsigned threads) {
    spec.validate();
    const std::size_t m = spec.n_trials;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, m));

    std::vector<std::vector<EstimateRecord>> results(m);
    std::vector<std::optional<std::string>> failed(m);
    std::atomic<std::size_t> next{0};
    std::exception_ptr fatal;
    std::mutex fatal_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= m) return;
            try {
                results[i] = run_trial(spec, i);
            } catch (const BlowUpError& e) {
                failed[i] = e.what();
            } catch (const DegenerateTrajectoryError& e) {
                failed[i] = e.what();
            } catch (...) {
                std::lock_guard lock(fatal_mutex);
                if (!fatal) fatal = std::current_exception();
                next.store(m);
                return;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (fatal) std::rethrow_exception(fatal);

    std::vector<EstimateRecord> all;
    std::vector<TrialFailure> failures;
    for (std::size_t i = 0; i < m; ++i) {
        if (failed[i]) {
            failures.push_back({i, *failed[i]});
        } else {
            all.insert(all.end(), results[i].begin(), results[i].end());
        }
    }

    const double beta = spec.model.op.beta();
    std::map<std::size_t, double> V_by_N;
    std::vector<std::string> warnings;
    if (auto w = alpha_warning(spec.req.alpha, spec.model.gamma, beta)) {
        warnings.push_back(*w + "; z statistics omitted");
    } else {
        const double V = asymptotic_constants(spec.model.theta_true, spec.scheme.t_final,
                                              spec.model.op.lambda_scale(), beta,
                                              spec.model.gamma, spec.req.alpha)
                             .V;
        for (std::size_t n : spec.req.n_list) V_by_N[n] = V;
    }
    if (spec.model.sigma != 1.0) {
        warnings.emplace_back("sigma != 1: z uses the sigma = 1 asymptotic variance");
    }

    SummaryOptions opts{spec.resolved_histogram_N(), spec.histogram_bin_width,
                        spec.histogram_lo, spec.histogram_hi};
    MCReport rep;
    if (!all.empty()) {
        rep = summarize(std::move(all), spec.model.theta_true, V_by_N, beta, opts);
    } else {
        rep.theta_true = spec.model.theta_true;
        rep.beta = beta;
        rep.alpha = spec.req.alpha;
        rep.histogram_N = opts.histogram_N;
    }
    if (!V_by_N.empty()) rep.V = V_by_N.begin()->second;
    rep.n_trials = m;
    rep.failures = std::move(failures);
    rep.warnings.insert(rep.warnings.begin(), warnings.begin(), warnings.end());

    if (10 * rep.failures.size() > m) {
        auto partial = std::make_shared<MCReport>(std::move(rep));
        throw StudyError(std::to_string(partial->failures.size()) + " of " + std::to_string(m) +
                             " trials failed (more than 10%)",
                         partial);
    }
    return rep;
}

}  // namespace spde
