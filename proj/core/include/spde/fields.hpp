#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "spde/spectrum.hpp"

namespace spde {

/// Parameters of the FitzHugh-Nagumo recovery variable.
///   dv = (theta Lap v + v(1-v)(v-a) - w) dt + sigma (-Lap)^{-gamma} dW1
///   dw = eps (v - b w) dt + sigma_w (-Lap)^{-gamma_w} dW2
struct FHNParams {
    double a = 0.5;
    double b = 1.0;
    double epsilon = 0.1;
    double sigma_w = 0.05;
    double gamma_w = 1.0;

    void validate() const;
};

enum class NonlinearityKind { none, polynomial, burgers, fhn };

std::string_view to_string(NonlinearityKind kind);
NonlinearityKind nonlinearity_kind_from_string(std::string_view name);

/// Drift nonlinearity F of the semilinear equation.
struct NonlinearitySpec {
    NonlinearityKind variant = NonlinearityKind::none;
    /// c_0 ... c_m with f(u) = sum_j c_j u^j (polynomial only).
    std::vector<double> poly_coeffs;
    FHNParams fhn;

    static NonlinearitySpec none() { return {}; }
    static NonlinearitySpec polynomial(std::vector<double> coeffs);
    static NonlinearitySpec burgers();
    static NonlinearitySpec fitzhugh_nagumo(FHNParams params);

    /// Polynomial degree m_F of the pointwise part (2 for Burgers, 3 for FHN,
    /// 0 for none).
    std::size_t degree() const;

    /// Coefficients of the pointwise polynomial part; for FHN this is the
    /// cubic u(1-u)(u-a) = -a u + (1+a) u^2 - u^3.
    std::vector<double> pointwise_coeffs() const;

    void validate() const;

    friend bool operator==(const NonlinearitySpec& l, const NonlinearitySpec& r) {
        return l.variant == r.variant && l.poly_coeffs == r.poly_coeffs &&
               l.fhn.a == r.fhn.a && l.fhn.b == r.fhn.b && l.fhn.epsilon == r.fhn.epsilon &&
               l.fhn.sigma_w == r.fhn.sigma_w && l.fhn.gamma_w == r.fhn.gamma_w;
    }
};

/// Interior collocation grid x_j = j L / (n_grid + 1), j = 1..n_grid.
struct GridSpec {
    std::size_t n_grid = 1023;
    std::size_t n_modes_keep = 0;

    void validate() const;
};

/// Smallest 2^p - 1 that is >= `minimum` (and >= 3).
std::size_t transform_friendly_size(std::size_t minimum);

/// Grid that represents products of `degree` fields with `modes` modes, and
/// returns `n_out` modes, without aliasing.
std::size_t dealiased_grid_size(std::size_t degree, std::size_t modes, std::size_t n_out);

/// Type-I sine/cosine transforms on a fixed interior grid, normalised to the
/// orthonormal basis Phi_k = sqrt(2/L) sin(k pi x / L).
///
/// Owns its FFTW plans and buffers. Plan creation is serialised internally;
/// an instance must not be used by two threads at once.
class SineTransform {
public:
    SineTransform(std::size_t n_grid, double domain_length);
    ~SineTransform();
    SineTransform(SineTransform&&) noexcept;
    SineTransform& operator=(SineTransform&&) noexcept;
    SineTransform(const SineTransform&) = delete;
    SineTransform& operator=(const SineTransform&) = delete;

    std::size_t size() const noexcept;
    double domain_length() const noexcept;

    /// u(x_j) = sum_k c_k Phi_k(x_j); modes.size() <= size().
    void modes_to_grid(std::span<const double> modes, std::span<double> grid);
    /// c_k = (u, Phi_k) by DST-I quadrature for k = 1..modes.size().
    void grid_to_modes(std::span<const double> grid, std::span<double> modes);
    /// u'(x_j) of the sine series via its cosine series (DCT-I).
    void derivative_to_grid(std::span<const double> modes, std::span<double> grid);
    /// Sine coefficients of a cosine series of degree <= max_wavenumber (<= size()),
    /// given its interior samples and its values at x = 0 and x = L. Exact up to
    /// round-off; this is how even powers of u are projected.
    void cosine_series_to_modes(std::span<const double> grid, double left, double right,
                                std::size_t max_wavenumber, std::span<double> modes);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Per-thread transform for (n_grid, L); plans are built once per thread.
SineTransform& thread_local_transform(std::size_t n_grid, double domain_length);

std::vector<double> modes_to_grid(const ModeVector& x, const GridSpec& grid,
                                  const OperatorSpec& spec);
ModeVector grid_to_modes(std::span<const double> u, const GridSpec& grid,
                         const OperatorSpec& spec);

/// First n_out modes of f(u) for polynomial f; requires
/// n_grid >= degree * max(x.size(), n_out).
ModeVector nemytskii_modes(const ModeVector& x, const NonlinearitySpec& nl,
                           const GridSpec& grid, std::size_t n_out,
                           const OperatorSpec& spec = {});

/// First n_out modes of -v v_x; requires n_grid >= 2 * max(x.size(), n_out).
ModeVector burgers_modes(const ModeVector& x, const GridSpec& grid, std::size_t n_out,
                         const OperatorSpec& spec = {});

/// (F_v, F_w) = (f(v) - w, eps (v - b w)) on the first n_out modes.
std::pair<ModeVector, ModeVector> fhn_drift(const ModeVector& v, const ModeVector& w,
                                            const FHNParams& p, const GridSpec& grid,
                                            std::size_t n_out,
                                            const OperatorSpec& spec = {});

struct SplitPolynomial;

/// Hot-loop evaluator of F in mode space. Chooses a dealiased grid per
/// (input modes, output modes) pair and caches the transforms; one instance
/// per trajectory/thread.
class DriftEvaluator {
public:
    /// `preferred_grid` (0 = automatic) is used for inputs with at least
    /// `full_modes` modes and must satisfy the dealiasing bound.
    DriftEvaluator(NonlinearitySpec nl, OperatorSpec op, std::size_t full_modes,
                   std::size_t preferred_grid = 0);

    const NonlinearitySpec& spec() const noexcept { return nl_; }
    bool is_zero() const noexcept { return nl_.variant == NonlinearityKind::none; }

    /// out[k] = F^k(x, w) for k < out.size(). `w` is only read for FHN and may
    /// be empty (treated as zero).
    void evaluate(std::span<const double> x, std::span<const double> w, std::span<double> out);

private:
    SineTransform& transform_for(std::size_t modes, std::size_t n_out);

    NonlinearitySpec nl_;
    OperatorSpec op_;
    std::size_t full_modes_;
    std::size_t preferred_grid_;
    std::shared_ptr<const SplitPolynomial> split_;
    std::map<std::size_t, std::unique_ptr<SineTransform>> transforms_;
    std::vector<double> grid_buf_;
    std::vector<double> deriv_buf_;
    std::vector<double> even_buf_;
};

}  // namespace spde
