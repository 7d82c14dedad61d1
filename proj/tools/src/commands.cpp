#include "commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "config.hpp"
#include "spde/errors.hpp"
#include "spde/report_io.hpp"
#include "spde/theory.hpp"

namespace spde::cli {
namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "'");
    }
}

std::optional<double> variance_for(const ModelSpec& m, const EstimatorRequest& r, double T,
                                   std::ostream& err) {
    const double beta = m.op.beta();
    if (auto w = alpha_warning(r.alpha, m.gamma, beta)) {
        err << "warning: " << *w << "\n";
        return std::nullopt;
    }
    return asymptotic_constants(m.theta_true, T, m.op.lambda_scale(), beta, m.gamma, r.alpha).V;
}

std::vector<EstimateRecord> single_run_records(const EstimatorAccumulator& acc,
                                               const ModelSpec& m, const EstimatorRequest& r,
                                               std::optional<double> V) {
    std::vector<EstimateRecord> recs;
    for (std::size_t n : r.n_list) {
        for (Variant v : r.variants) {
            const auto res = estimate_theta(acc, r, v, n);
            EstimateRecord rec{0, v, n, res.alpha, res.theta_hat, std::nullopt};
            if (V) rec.z = standardize(res, m.theta_true, *V, m.op.beta());
            recs.push_back(rec);
        }
    }
    return recs;
}

int cmd_simulate(const std::string& config, const std::string& out_dir, std::ostream& out,
                 std::ostream& err) {
    RunConfig cfg = load_config(config);
    const StudySpec& s = cfg.study;
    SchemeSpec scheme = s.scheme;
    if (scheme.snapshot_stride == 0) {
        scheme.snapshot_stride = std::max<std::size_t>(1, scheme.steps() / 100);
    }
    const SimOutput sim = s.backend == Backend::ou_exact
                              ? simulate_ou_exact_run(s.model, scheme, s.req)
                              : simulate(s.model, scheme, s.req);
    const auto V = variance_for(s.model, s.req, scheme.t_final, err);
    const auto recs = single_run_records(sim.accumulators, s.model, s.req, V);

    const fs::path dir(out_dir);
    ensure_dir(dir);
    write_text_file(dir / "trajectory.csv", trajectory_csv(sim.trajectory));
    if (!sim.w_trajectory.empty()) {
        write_text_file(dir / "w_trajectory.csv", trajectory_csv(sim.w_trajectory));
    }
    write_text_file(dir / "estimates.csv", estimates_csv(recs));
    out << "wrote " << (dir / "trajectory.csv").string() << " and "
        << (dir / "estimates.csv").string() << "\n";
    return kOk;
}

int cmd_estimate(const std::string& config, const std::string& trajectory,
                 const std::string& out_file, std::ostream& out, std::ostream& err) {
    RunConfig cfg = load_config(config);
    const StudySpec& s = cfg.study;
    if (s.model.nonlinearity.variant == NonlinearityKind::fhn) {
        throw ConfigError("estimate: the fhn recovery variable is not part of a trajectory file; "
                          "use mc or simulate for the coupled system");
    }
    const Trajectory traj = parse_trajectory_csv(read_text_file(trajectory));
    if (traj.times.size() < 2) throw ConfigError("estimate: trajectory needs at least two times");
    const std::size_t modes = traj.states.front().size();
    ModelSpec model = s.model;
    model.n_sim = modes;
    if (model.initial_modes.size() > modes) model.initial_modes = ModeVector();
    s.req.validate(modes);

    PathAccumulator acc(model.op, s.req, model.nonlinearity, modes, model.resolved_grid(),
                        model.gamma, model.sigma * model.sigma);
    const bool ito = s.req.numerator_mode == NumeratorMode::ito_sum;
    for (std::size_t i = 0; i + 1 < traj.times.size(); ++i) {
        acc.observe(traj.states[i].span(), {}, {}, traj.times[i + 1] - traj.times[i]);
        if (ito) acc.observe_increment(traj.states[i].span(), traj.states[i + 1].span());
    }
    const double T = traj.times.back() - traj.times.front();
    const auto result = acc.finish(traj.states.front(), traj.states.back(), T);
    const auto V = variance_for(model, s.req, T, err);
    const std::string csv = estimates_csv(single_run_records(result, model, s.req, V));
    if (out_file.empty() || out_file == "-") {
        out << csv;
    } else {
        write_text_file(out_file, csv);
    }
    return kOk;
}

void write_study_outputs(const MCReport& rep, const fs::path& dir) {
    write_text_file(dir / "estimates.csv", estimates_csv(rep.estimates));
    write_text_file(dir / "summary.json", report_json(rep));
    for (const auto& v : rep.variants) {
        const std::string name(to_string(v.variant));
        write_text_file(dir / ("band_" + name + ".svg"), band_svg(v, rep.theta_true));
        write_text_file(dir / ("mse_" + name + ".svg"), mse_svg(v, rep.V, rep.beta));
        if (v.histogram) {
            write_text_file(dir / ("hist_" + name + ".svg"), histogram_svg(*v.histogram, v.variant));
        }
    }
}

unsigned resolve_threads(int flag) {
    if (flag > 0) return static_cast<unsigned>(flag);
    if (const char* env = std::getenv("SPDE_DRIFT_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
        throw ConfigError(std::string("SPDE_DRIFT_THREADS must be a positive integer, got '") +
                          env + "'");
    }
    return 1;
}

int cmd_mc(const std::string& config, const std::string& out_dir, int threads_flag,
           std::ostream& out, std::ostream& err) {
    RunConfig cfg = load_config(config);
    const unsigned threads = resolve_threads(threads_flag);
    const fs::path dir(out_dir);
    ensure_dir(dir);
    try {
        const MCReport rep = run_study(cfg.study, threads);
        for (const auto& w : rep.warnings) err << "warning: " << w << "\n";
        write_study_outputs(rep, dir);
        out << "mc: " << rep.n_trials << " trials (" << rep.failures.size() << " failed), outputs in "
            << dir.string() << "\n";
    } catch (const StudyError& e) {
        write_study_outputs(e.partial_report(), dir);
        throw;
    }
    return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectral Galerkin simulation and drift estimation for semilinear SPDEs",
                 "spde-drift"};
    app.require_subcommand(1);

    std::string config, out_path, traj_path, est_out;
    int threads = 0;

    auto* sim = app.add_subcommand("simulate", "simulate one trajectory and estimate theta");
    sim->add_option("config", config, "INI configuration")->required();
    sim->add_option("--out", out_path, "output directory")->default_val("sim_out");

    auto* est = app.add_subcommand("estimate", "estimate theta from a t,k,x trajectory CSV");
    est->add_option("config", config, "INI configuration (model and estimators)")->required();
    est->add_option("--trajectory", traj_path, "trajectory CSV")->required();
    est->add_option("--out", est_out, "estimates CSV (default: standard output)");

    auto* mc = app.add_subcommand("mc", "Monte Carlo study");
    mc->add_option("config", config, "INI configuration")->required();
    mc->add_option("--out-dir", out_path, "output directory")->default_val("mc_out");
    mc->add_option("--threads", threads, "worker threads (fallback: SPDE_DRIFT_THREADS)")
        ->check(CLI::PositiveNumber);

    AdvisorQuery q;
    std::string example;
    double theta = 0.0, lambda = 0.0;
    auto* adv = app.add_subcommand("advise", "rates and variances from the example corollaries");
    adv->add_option("--example", example, "reaction-diffusion | burgers | cahn-hilliard")
        ->required();
    adv->add_option("--n", q.n, "spatial dimension")->default_val(1);
    adv->add_option("--mf", q.m_F, "polynomial degree m_F")->default_val(3);
    adv->add_option("--gamma", q.gamma, "noise smoothing exponent")->required();
    adv->add_option("--alpha", q.alpha, "contrast parameter")->required();
    adv->add_flag("--odd", q.m_F_odd, "m_F is odd");
    adv->add_flag("--neg-leading", q.leading_coeff_negative, "leading coefficient is negative");
    auto* adv_theta = adv->add_option("--theta", theta, "theta for the variance V");
    adv->add_option("--T", q.T, "observation horizon")->default_val(1.0);
    auto* adv_lambda = adv->add_option("--Lambda", lambda, "eigenvalue growth constant");

    double t_theta = 0, t_T = 1, t_Lambda = 0, t_beta = 0, t_gamma = 0, t_alpha = 0;
    auto* th = app.add_subcommand("theory", "asymptotic constants");
    th->add_option("--theta", t_theta)->required();
    th->add_option("--T", t_T)->default_val(1.0);
    th->add_option("--Lambda", t_Lambda)->required();
    th->add_option("--beta", t_beta)->required();
    th->add_option("--gamma", t_gamma)->required();
    th->add_option("--alpha", t_alpha)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*sim) return cmd_simulate(config, out_path, out, err);
        if (*est) return cmd_estimate(config, traj_path, est_out, out, err);
        if (*mc) return cmd_mc(config, out_path, threads, out, err);
        if (*adv) {
            q.example = example_from_string(example);
            if (*adv_theta) q.theta = theta;
            if (*adv_lambda) q.Lambda = lambda;
            const Advice a = advise(q);
            out << advice_json(a);
            for (const auto& h : a.failed_hypotheses()) {
                err << "hypothesis not satisfied: " << h << "\n";
            }
            return kOk;
        }
        if (*th) {
            out << constants_json(
                asymptotic_constants(t_theta, t_T, t_Lambda, t_beta, t_gamma, t_alpha));
            return kOk;
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIo;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kValidation;
}

}  // namespace spde::cli
