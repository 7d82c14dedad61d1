#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace spde {

enum class OperatorKind { dirichlet_laplacian_1d };

std::string_view to_string(OperatorKind kind);
OperatorKind operator_kind_from_string(std::string_view name);

/// Diagonal negative definite operator A with known spectrum of -A.
///
/// For the 1D Dirichlet Laplacian on [0, L] the eigenpairs are
/// lambda_k = (pi k / L)^2 and Phi_k(x) = sqrt(2/L) sin(k pi x / L), so the
/// growth law lambda_k ~ Lambda k^beta holds exactly with beta = 2 and
/// Lambda = (pi / L)^2.
struct OperatorSpec {
    OperatorKind kind = OperatorKind::dirichlet_laplacian_1d;
    double domain_length = 1.0;

    double beta() const;
    double lambda_scale() const;
    /// k-th eigenvalue of -A, k >= 1.
    double eigenvalue(std::size_t k) const;

    void validate() const;
};

/// Coefficients of a field in the eigenbasis; coeffs[k - 1] multiplies Phi_k.
class ModeVector {
public:
    ModeVector() = default;
    explicit ModeVector(std::size_t modes, double value = 0.0) : coeffs_(modes, value) {}
    explicit ModeVector(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}
    ModeVector(std::initializer_list<double> coeffs) : coeffs_(coeffs) {}

    std::size_t size() const noexcept { return coeffs_.size(); }
    bool empty() const noexcept { return coeffs_.empty(); }

    double& operator[](std::size_t i) { return coeffs_[i]; }
    double operator[](std::size_t i) const { return coeffs_[i]; }

    std::span<double> span() noexcept { return coeffs_; }
    std::span<const double> span() const noexcept { return coeffs_; }
    const std::vector<double>& values() const noexcept { return coeffs_; }

    /// First n coefficients, zero padded when n exceeds size().
    ModeVector truncated(std::size_t n) const;

    /// Throws ConfigError if empty or any entry is NaN/Inf.
    void validate(std::string_view what = "mode vector") const;

    friend bool operator==(const ModeVector&, const ModeVector&) = default;

private:
    std::vector<double> coeffs_;
};

/// lambda_1 ... lambda_count of -A.
std::vector<double> eigenvalues(const OperatorSpec& spec, std::size_t count);

/// (-A)^rho x, i.e. entry k scaled by lambda_k^rho. Negative rho smooths.
ModeVector frac_power_apply(const ModeVector& x, double rho, const OperatorSpec& spec);

/// |x|_rho = |(-A)^rho x|_H.
double sobolev_norm(const ModeVector& x, double rho, const OperatorSpec& spec);

/// rho* = gamma - 1/(2 beta): the solution lives in D((-A)^{rho + 1/2}) exactly
/// for rho < rho*.
double regularity_limit(double gamma, double beta);

}  // namespace spde
