#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spde {

struct AsymptoticConstants {
    double c_mean = 0.0;  ///< cumulative mean constant C^E_alpha
    double c_var = 0.0;   ///< cumulative variance constant C^var_alpha
    double V = 0.0;       ///< asymptotic variance of N^{(beta+1)/2}(theta_hat - theta)
    double rate_exponent = 0.0;
};

/// Throws DomainError naming the inequality when alpha is inadmissible,
/// i.e. unless alpha > gamma - (1+1/beta)/8.
AsymptoticConstants asymptotic_constants(double theta, double T, double Lambda, double beta,
                                         double gamma, double alpha);

/// V alone (same admissibility check as asymptotic_constants).
double asymptotic_variance(double theta, double T, double Lambda, double beta, double gamma,
                           double alpha);

/// Second moments of a single stationary-started-at-zero OU mode
/// dx = -theta lambda x dt + lambda^{-gamma} dW.
class OuMoments {
public:
    OuMoments(double theta, double gamma, double lambda, double T);

    /// int_0^T E x_t^2 dt
    double mean_integral() const noexcept { return mean_integral_; }
    /// T lambda^{-(4 gamma + 3)} / (2 theta^3)
    double var_integral_leading() const noexcept { return var_leading_; }
    /// E x_s x_t
    double cov(double s, double t) const noexcept;

private:
    double theta_;
    double lambda_;
    double scale_;  // lambda^{-(2 gamma + 1)} / (2 theta)
    double mean_integral_;
    double var_leading_;
};

OuMoments ou_moment_oracle(double theta, double gamma, double lambda_k, double T);

enum class Example { reaction_diffusion, burgers, cahn_hilliard };

std::string_view to_string(Example e);
/// Accepts both "reaction_diffusion" and "reaction-diffusion" spellings.
Example example_from_string(std::string_view name);

struct AdvisorQuery {
    Example example = Example::reaction_diffusion;
    int n = 1;
    int m_F = 3;
    double gamma = 1.0;
    double alpha = 1.0;
    bool leading_coeff_negative = false;
    bool m_F_odd = false;
    // Optional inputs for V; Lambda defaults to the unit interval value for n = 1.
    std::optional<double> theta;
    double T = 1.0;
    std::optional<double> Lambda;
};

enum class AdviceStatus { asymptotically_normal, consistent_with_rate, consistent, not_covered };

std::string_view to_string(AdviceStatus s);

struct EstimatorAdvice {
    AdviceStatus status = AdviceStatus::not_covered;
    /// AN: the exponent (beta+1)/2. consistent_with_rate: every a below this works.
    std::optional<double> rate;
    std::optional<double> V;
    std::string reason;
};

struct Hypothesis {
    std::string name;
    bool satisfied = false;
    /// false when the condition is taken as an assumption rather than checked.
    bool checked = true;
};

struct Advice {
    Example example = Example::reaction_diffusion;
    int n = 1;
    double beta = 0.0;
    double rho_star = 0.0;
    std::vector<Hypothesis> hypotheses;
    EstimatorAdvice full;
    EstimatorAdvice partial;
    EstimatorAdvice linear;
    /// Condition parameters the verdicts were derived from.
    std::optional<double> epsilon;  ///< sup eta available for the linear/partial perturbation
    std::optional<double> delta;
    std::vector<std::string> notes;

    std::vector<std::string> failed_hypotheses() const;
};

/// Throws ConfigError for queries that do not describe a supported setting
/// (e.g. Burgers with n != 1, m_F < 2). Failed hypotheses are not
/// errors: they are listed in Advice::hypotheses and the affected estimators
/// are reported as not_covered.
Advice advise(const AdvisorQuery& q);

}  // namespace spde
