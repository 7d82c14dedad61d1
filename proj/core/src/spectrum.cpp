#include "spde/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spde/errors.hpp"

namespace spde {

std::string_view to_string(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::dirichlet_laplacian_1d:
            return "dirichlet_laplacian_1d";
    }
    throw ConfigError("unsupported operator kind");
}

OperatorKind operator_kind_from_string(std::string_view name) {
    if (name == "dirichlet_laplacian_1d") return OperatorKind::dirichlet_laplacian_1d;
    throw ConfigError("unsupported operator kind '" + std::string(name) + "'");
}

void OperatorSpec::validate() const {
    if (kind != OperatorKind::dirichlet_laplacian_1d) {
        throw ConfigError("unsupported operator kind");
    }
    if (!(domain_length > 0.0) || !std::isfinite(domain_length)) {
        throw ConfigError("domain_length must be positive and finite");
    }
}

double OperatorSpec::beta() const {
    validate();
    return 2.0;
}

double OperatorSpec::lambda_scale() const {
    validate();
    const double s = std::numbers::pi / domain_length;
    return s * s;
}

double OperatorSpec::eigenvalue(std::size_t k) const {
    validate();
    const double s = std::numbers::pi * static_cast<double>(k) / domain_length;
    return s * s;
}

ModeVector ModeVector::truncated(std::size_t n) const {
    std::vector<double> out(n, 0.0);
    const std::size_t m = std::min(n, coeffs_.size());
    std::copy_n(coeffs_.begin(), m, out.begin());
    return ModeVector(std::move(out));
}

void ModeVector::validate(std::string_view what) const {
    if (coeffs_.empty()) {
        throw ConfigError(std::string(what) + ": at least one mode required");
    }
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (!std::isfinite(coeffs_[i])) {
            throw ConfigError(std::string(what) + ": non-finite coefficient at mode " +
                              std::to_string(i + 1));
        }
    }
}

std::vector<double> eigenvalues(const OperatorSpec& spec, std::size_t count) {
    spec.validate();
    if (count == 0) throw ConfigError("eigenvalues: count must be >= 1");
    std::vector<double> out(count);
    for (std::size_t k = 1; k <= count; ++k) out[k - 1] = spec.eigenvalue(k);
    return out;
}

ModeVector frac_power_apply(const ModeVector& x, double rho, const OperatorSpec& spec) {
    spec.validate();
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = std::pow(spec.eigenvalue(i + 1), rho) * x[i];
    }
    return ModeVector(std::move(out));
}

double sobolev_norm(const ModeVector& x, double rho, const OperatorSpec& spec) {
    // Same expression as frac_power_apply so that |x|_rho == |(-A)^rho x|_0.
    const ModeVector y = frac_power_apply(x, rho, spec);
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) sum += y[i] * y[i];
    return std::sqrt(sum);
}

double regularity_limit(double gamma, double beta) {
    if (!(beta > 0.0)) throw DomainError("regularity_limit: beta must be positive");
    return gamma - 0.5 / beta;
}

}  // namespace spde
