#include "spde/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spde/errors.hpp"

namespace spde {
namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(name) + " must be positive and finite");
    }
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

double asymptotic_variance(double theta, double T, double Lambda, double beta, double gamma,
                           double alpha) {
    return asymptotic_constants(theta, T, Lambda, beta, gamma, alpha).V;
}

AsymptoticConstants asymptotic_constants(double theta, double T, double Lambda, double beta,
                                         double gamma, double alpha) {
    require_positive(theta, "theta");
    require_positive(T, "T");
    require_positive(Lambda, "Lambda");
    require_positive(beta, "beta");
    if (!std::isfinite(gamma) || !std::isfinite(alpha)) {
        throw DomainError("gamma and alpha must be finite");
    }
    if (!(alpha > gamma - (1.0 + 1.0 / beta) / 8.0)) {
        throw DomainError("hypothesis violated: alpha > gamma - (1+1/beta)/8 (alpha = " +
                          fmt(alpha) + ", bound = " + fmt(gamma - (1.0 + 1.0 / beta) / 8.0) +
                          ")");
    }
    const double e1 = 2.0 * alpha - 2.0 * gamma + 1.0;
    const double e2 = 4.0 * alpha - 4.0 * gamma + 1.0;
    const double b1 = beta * e1 + 1.0;
    const double b2 = beta * e2 + 1.0;
    AsymptoticConstants c;
    c.c_mean = T * std::pow(Lambda, e1) / (2.0 * theta * b1);
    c.c_var = T * std::pow(Lambda, e2) / (2.0 * theta * theta * theta * b2);
    c.V = 2.0 * theta * b1 * b1 / (T * std::pow(Lambda, e1) * b2);
    c.rate_exponent = (beta + 1.0) / 2.0;
    return c;
}

OuMoments::OuMoments(double theta, double gamma, double lambda, double T)
    : theta_(theta), lambda_(lambda) {
    require_positive(theta, "theta");
    require_positive(lambda, "lambda");
    if (!(T >= 0.0)) throw DomainError("T must be nonnegative");
    scale_ = std::pow(lambda, -(2.0 * gamma + 1.0)) / (2.0 * theta);
    const double r = 2.0 * theta * lambda;
    // T - (1 - e^{-rT})/r, written to stay accurate for small rT.
    mean_integral_ = scale_ * (T + std::expm1(-r * T) / r);
    var_leading_ = T * std::pow(lambda, -(4.0 * gamma + 3.0)) / (2.0 * theta * theta * theta);
}

double OuMoments::cov(double s, double t) const noexcept {
    if (s > t) std::swap(s, t);
    const double r = theta_ * lambda_;
    return scale_ * (std::exp(-r * (t - s)) - std::exp(-r * (t + s)));
}

OuMoments ou_moment_oracle(double theta, double gamma, double lambda_k, double T) {
    return OuMoments(theta, gamma, lambda_k, T);
}

std::string_view to_string(Example e) {
    switch (e) {
        case Example::reaction_diffusion: return "reaction_diffusion";
        case Example::burgers: return "burgers";
        case Example::cahn_hilliard: return "cahn_hilliard";
    }
    return "unknown";
}

Example example_from_string(std::string_view name) {
    std::string s(name);
    std::replace(s.begin(), s.end(), '-', '_');
    if (s == "reaction_diffusion") return Example::reaction_diffusion;
    if (s == "burgers") return Example::burgers;
    if (s == "cahn_hilliard") return Example::cahn_hilliard;
    throw ConfigError("unknown example '" + std::string(name) +
                      "' (expected reaction_diffusion, burgers or cahn_hilliard)");
}

std::string_view to_string(AdviceStatus s) {
    switch (s) {
        case AdviceStatus::asymptotically_normal: return "asymptotically_normal";
        case AdviceStatus::consistent_with_rate: return "consistent_with_rate";
        case AdviceStatus::consistent: return "consistent";
        case AdviceStatus::not_covered: return "not_covered";
    }
    return "unknown";
}

std::vector<std::string> Advice::failed_hypotheses() const {
    std::vector<std::string> out;
    for (const auto& h : hypotheses) {
        if (!h.satisfied) out.push_back(h.name);
    }
    return out;
}

namespace {

EstimatorAdvice normal_advice(double rate, std::optional<double> V, std::string reason) {
    return {AdviceStatus::asymptotically_normal, rate, V, std::move(reason)};
}

EstimatorAdvice rate_advice(double rate, std::string reason) {
    return {AdviceStatus::consistent_with_rate, rate, std::nullopt, std::move(reason)};
}

EstimatorAdvice uncovered(std::string reason) {
    return {AdviceStatus::not_covered, std::nullopt, std::nullopt, std::move(reason)};
}

/// Rates from the perturbation argument: AN when the available excess
/// regularity beats (1+1/beta)/2, otherwise every a < beta * regularity.
EstimatorAdvice perturbation_verdict(double regularity, double beta, double an_rate,
                                     std::optional<double> V, const std::string& source) {
    const double threshold = (1.0 + 1.0 / beta) / 2.0;
    if (regularity > threshold) {
        return normal_advice(an_rate, V, source + " = " + fmt(regularity) + " > (1+1/beta)/2");
    }
    return rate_advice(beta * regularity,
                       source + " = " + fmt(regularity) + " <= (1+1/beta)/2; a < beta * " + source);
}

std::optional<double> variance_or_note(const AdvisorQuery& q, Advice& adv, double default_lambda,
                                       double (*formula)(double, double, double, double, double,
                                                         int)) {
    if (!q.theta) {
        adv.notes.emplace_back("V omitted: pass theta to evaluate the asymptotic variance");
        return std::nullopt;
    }
    double lambda = default_lambda;
    if (q.Lambda) {
        lambda = *q.Lambda;
    } else if (q.n != 1) {
        adv.notes.emplace_back("V omitted: Lambda has no default for n != 1");
        return std::nullopt;
    }
    require_positive(*q.theta, "theta");
    require_positive(q.T, "T");
    require_positive(lambda, "Lambda");
    return formula(*q.theta, q.T, lambda, q.gamma, q.alpha, q.n);
}

double rd_variance(double theta, double T, double Lambda, double gamma, double alpha, int n) {
    const double num = 4.0 * alpha - 4.0 * gamma + n + 2.0;
    const double den = 8.0 * alpha - 8.0 * gamma + n + 2.0;
    return 2.0 * theta * num * num /
           (T * std::pow(Lambda, 2.0 * alpha - 2.0 * gamma + 1.0) * n * den);
}

double burgers_variance(double theta, double T, double Lambda, double gamma, double alpha, int) {
    const double num = 4.0 * alpha - 4.0 * gamma + 3.0;
    const double den = 8.0 * alpha - 8.0 * gamma + 3.0;
    return 2.0 * theta * num * num / (T * std::pow(Lambda, 2.0 * alpha - 2.0 * gamma + 1.0) * den);
}

double ch_variance(double theta, double T, double Lambda, double gamma, double alpha, int n) {
    const double num = 8.0 * alpha - 8.0 * gamma + n + 4.0;
    const double den = 16.0 * alpha - 16.0 * gamma + n + 4.0;
    return 2.0 * theta * num * num /
           (T * std::pow(Lambda, 2.0 * alpha - 2.0 * gamma + 1.0) * n * den);
}

void advise_reaction_diffusion(const AdvisorQuery& q, Advice& adv) {
    const double n = q.n;
    const double mf = q.m_F;
    adv.beta = 2.0 / n;
    adv.rho_star = q.gamma - n / 4.0;
    const double rs = adv.rho_star;
    const double an_rate = (adv.beta + 1.0) / 2.0;
    const bool odd = (q.m_F % 2) == 1;

    const bool alpha_ok = q.alpha > q.gamma - (n + 2.0) / 16.0;

    // (S_rho) must cover every rho in [0, rho*).
    bool s_all = false;
    double eps_s = 0.0;
    if (q.m_F <= 3) {
        // rho > n/4 - 1/2 from the algebra property, rho = 0 from H^1 in L^6.
        s_all = (n / 4.0 - 0.5 <= 0.0) && (n / 4.0 - 0.5 < 0.0 || q.n <= 3);
        eps_s = 1.0;
    } else {
        s_all = 0.0 > n / 4.0 - 2.0 / mf;
        eps_s = 0.5 + 2.0 / mf;
    }
    const bool c_ok = odd && q.leading_coeff_negative && rs > std::max(0.0, n / 4.0 - 0.5);
    const bool t_ok = rs > n / 4.0 + 0.5;
    const bool a_rho = rs > std::max(0.0, n / 4.0 - 1.0 / mf);

    adv.hypotheses = {
        {"alpha > gamma - (n+2)/16", alpha_ok, true},
        {"(S_rho) for all 0 <= rho < rho*", s_all && rs > 0.0, true},
        {"(C_rho) for some rho < rho*: m_F odd, leading coefficient negative, rho* > n/4 - 1/2",
         c_ok, true},
        {"gamma > n/2 + 1/2, i.e. (T_rho) with delta = 1 for some rho < rho*", t_ok, true},
        {"(A_rho) for some rho in (n/4 - 1/m_F, rho*)", a_rho, false},
    };

    const bool assumption1 = s_all && rs > 0.0 && c_ok && t_ok;
    const bool assumption2 = a_rho;
    if (!alpha_ok || (!assumption1 && !assumption2)) {
        const std::string why = !alpha_ok ? "alpha > gamma - (n+2)/16 fails"
                                          : "neither Assumption 1 nor Assumption 2 holds";
        adv.full = adv.partial = adv.linear = uncovered(why);
        return;
    }

    double eta = 0.0;
    std::string eta_source;
    if (assumption1) {
        eta = eps_s;
        eta_source = "sup eta (from S_rho)";
    }
    if (assumption2 && 0.5 + 1.0 / mf > eta) {
        eta = 0.5 + 1.0 / mf;
        eta_source = "sup eta (from S'_rho)";
    }
    if (!assumption1) {
        adv.notes.emplace_back("(A_rho) is a regularity assumption on the solution and is not "
                               "checked");
    }
    adv.epsilon = eta;

    const auto V = variance_or_note(q, adv, std::numbers::pi * std::numbers::pi, rd_variance);
    adv.full = normal_advice(an_rate, V, "full estimator asymptotically normal for admissible alpha");
    adv.linear = perturbation_verdict(eta, adv.beta, an_rate, V, eta_source);
    adv.partial = adv.linear;
    if (t_ok) {
        adv.delta = 1.0;
        const auto via_t = perturbation_verdict(1.0, adv.beta, an_rate, V, "delta");
        if (via_t.status == AdviceStatus::asymptotically_normal ||
            (adv.partial.status == AdviceStatus::consistent_with_rate &&
             *via_t.rate > *adv.partial.rate)) {
            adv.partial = via_t;
        }
    }
}

void advise_burgers(const AdvisorQuery& q, Advice& adv) {
    adv.beta = 2.0;
    adv.rho_star = q.gamma - 0.25;
    const bool gamma_ok = q.gamma > 0.5;
    const bool alpha_ok = q.alpha > q.gamma - 3.0 / 16.0;
    adv.hypotheses = {
        {"gamma > 1/2", gamma_ok, true},
        {"alpha > gamma - 3/16", alpha_ok, true},
    };
    if (!gamma_ok || !alpha_ok) {
        adv.full = adv.partial = adv.linear =
            uncovered(!gamma_ok ? "gamma > 1/2 fails" : "alpha > gamma - 3/16 fails");
        return;
    }
    adv.epsilon = 0.5;
    adv.delta = 0.5;
    const auto V = variance_or_note(q, adv, std::numbers::pi * std::numbers::pi, burgers_variance);
    adv.full = normal_advice(1.5, V, "Burgers: full estimator asymptotically normal");
    adv.partial = rate_advice(1.0, "delta = 1/2 for rho > 1/4; a < beta * delta");
    adv.linear = rate_advice(1.0, "epsilon = 1/2 for all rho; a < beta * epsilon");
}

void advise_cahn_hilliard(const AdvisorQuery& q, Advice& adv) {
    const double n = q.n;
    adv.beta = 4.0 / n;
    adv.rho_star = q.gamma - n / 8.0;
    const bool alpha_ok = q.alpha > q.gamma - (n + 4.0) / 32.0;
    const bool gamma_ok = q.n != 3 || q.gamma > 10.0 / 24.0;
    const bool improved = adv.rho_star > n / 8.0;
    adv.hypotheses = {
        {"alpha > gamma - (n+4)/32", alpha_ok, true},
        {"n in {1,2} or gamma > 10/24", gamma_ok, true},
        {"rho* > n/8 (improved rate for partial)", improved, true},
    };
    if (!alpha_ok) {
        adv.full = adv.partial = adv.linear = uncovered("alpha > gamma - (n+4)/32 fails");
        return;
    }
    const auto V =
        variance_or_note(q, adv, std::pow(std::numbers::pi, 4.0), ch_variance);
    adv.full = normal_advice(0.5 + 2.0 / n, V, "Cahn-Hilliard: full estimator asymptotically normal");
    if (!gamma_ok) {
        adv.partial = adv.linear = uncovered("n = 3 requires gamma > 10/24");
        return;
    }
    adv.epsilon = 1.0 / 3.0;
    adv.linear = rate_advice(4.0 / (3.0 * n), "epsilon = 1/3; a < 4/(3n)");
    if (improved) {
        adv.delta = 0.5;
        adv.partial = rate_advice(2.0 / n, "delta = 1/2 for rho >= n/8; a < 2/n");
    } else {
        adv.partial = rate_advice(4.0 / (3.0 * n), "epsilon = 1/3; a < 4/(3n)");
    }
}

}  // namespace

Advice advise(const AdvisorQuery& q) {
    if (!std::isfinite(q.gamma) || !(q.gamma > 0.0)) throw ConfigError("gamma must be positive");
    if (!std::isfinite(q.alpha)) throw ConfigError("alpha must be finite");
    if (q.n < 1) throw ConfigError("n must be >= 1");
    if (q.m_F_odd && q.m_F % 2 == 0) throw ConfigError("--odd given but m_F is even");

    Advice adv;
    adv.example = q.example;
    adv.n = q.n;
    switch (q.example) {
        case Example::reaction_diffusion:
            if (q.m_F < 2) throw ConfigError("reaction_diffusion requires m_F >= 2");
            advise_reaction_diffusion(q, adv);
            break;
        case Example::burgers:
            if (q.n != 1) throw ConfigError("burgers is defined on an interval: n must be 1");
            advise_burgers(q, adv);
            break;
        case Example::cahn_hilliard:
            if (q.n > 3) throw ConfigError("cahn_hilliard requires n <= 3");
            advise_cahn_hilliard(q, adv);
            break;
    }
    return adv;
}

}  // namespace spde
