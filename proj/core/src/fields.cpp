#include "spde/fields.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "spde/errors.hpp"

namespace spde {

/// f = f_odd + f_even. Odd powers of a sine series are sine series and the
/// DST projects them exactly; even powers are cosine series and need the
/// cosine route.
struct SplitPolynomial {
    std::vector<double> odd;   // coefficients of u, u^3, ... as a polynomial in u^2, times u
    std::vector<double> even;  // coefficients of 1, u^2, ... as a polynomial in u^2
    std::size_t even_degree = 0;
    bool has_even = false;

    explicit SplitPolynomial(std::span<const double> c) {
        for (std::size_t j = 0; j < c.size(); ++j) {
            (j % 2 ? odd : even).push_back(c[j]);
            if (j % 2 == 0 && c[j] != 0.0) {
                has_even = true;
                even_degree = j;
            }
        }
    }
};

namespace {

// FFTW's planner is not thread safe; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

double horner(std::span<const double> coeffs, double u) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * u + *it;
    return acc;
}

/// out = first out.size() modes of f(u) where `u` holds the grid values of a
/// field with `modes` modes; `u` is overwritten.
void pointwise_to_modes(SineTransform& tr, const SplitPolynomial& f, std::vector<double>& u,
                        std::vector<double>& even_buf, std::size_t modes, std::span<double> out) {
    if (!f.has_even) {
        for (double& v : u) v = v * horner(f.odd, v * v);
        tr.grid_to_modes(u, out);
        return;
    }
    even_buf.resize(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double v = u[j], v2 = v * v;
        even_buf[j] = horner(f.even, v2);
        u[j] = v * horner(f.odd, v2);
    }
    tr.grid_to_modes(u, out);
    const double edge = f.even.empty() ? 0.0 : f.even.front();
    tr.cosine_series_to_modes(even_buf, edge, edge, std::min(tr.size(), f.even_degree * modes),
                              out);
}

void require_dealiased(std::size_t n_grid, std::size_t degree, std::size_t modes,
                       std::size_t n_out, std::string_view what) {
    const std::size_t need = degree * std::max(modes, n_out);
    if (n_grid < need || n_grid < std::max(modes, n_out)) {
        throw ConfigError(std::string(what) + ": dealiasing requires n_grid >= " +
                          std::to_string(need) + " but n_grid = " + std::to_string(n_grid));
    }
}

}  // namespace

void FHNParams::validate() const {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("fhn parameter 'a' must lie in (0,1)");
    if (!(b >= 0.0)) throw ConfigError("fhn parameter 'b' must be nonnegative");
    if (!(epsilon >= 0.0)) throw ConfigError("fhn parameter 'epsilon' must be nonnegative");
    if (!(sigma_w >= 0.0)) throw ConfigError("fhn parameter 'sigma_w' must be nonnegative");
    if (!(gamma_w >= 0.0)) throw ConfigError("fhn parameter 'gamma_w' must be nonnegative");
}

std::string_view to_string(NonlinearityKind kind) {
    switch (kind) {
        case NonlinearityKind::none: return "none";
        case NonlinearityKind::polynomial: return "polynomial";
        case NonlinearityKind::burgers: return "burgers";
        case NonlinearityKind::fhn: return "fhn";
    }
    return "none";
}

NonlinearityKind nonlinearity_kind_from_string(std::string_view name) {
    if (name == "none") return NonlinearityKind::none;
    if (name == "polynomial") return NonlinearityKind::polynomial;
    if (name == "burgers") return NonlinearityKind::burgers;
    if (name == "fhn") return NonlinearityKind::fhn;
    throw ConfigError("unknown nonlinearity '" + std::string(name) + "'");
}

NonlinearitySpec NonlinearitySpec::polynomial(std::vector<double> coeffs) {
    NonlinearitySpec nl;
    nl.variant = NonlinearityKind::polynomial;
    nl.poly_coeffs = std::move(coeffs);
    return nl;
}

NonlinearitySpec NonlinearitySpec::burgers() {
    NonlinearitySpec nl;
    nl.variant = NonlinearityKind::burgers;
    return nl;
}

NonlinearitySpec NonlinearitySpec::fitzhugh_nagumo(FHNParams params) {
    NonlinearitySpec nl;
    nl.variant = NonlinearityKind::fhn;
    nl.fhn = params;
    return nl;
}

std::size_t NonlinearitySpec::degree() const {
    switch (variant) {
        case NonlinearityKind::none: return 0;
        case NonlinearityKind::polynomial: return poly_coeffs.empty() ? 0 : poly_coeffs.size() - 1;
        case NonlinearityKind::burgers: return 2;
        case NonlinearityKind::fhn: return 3;
    }
    return 0;
}

std::vector<double> NonlinearitySpec::pointwise_coeffs() const {
    switch (variant) {
        case NonlinearityKind::polynomial: return poly_coeffs;
        case NonlinearityKind::fhn: return {0.0, -fhn.a, 1.0 + fhn.a, -1.0};
        default: return {};
    }
}

void NonlinearitySpec::validate() const {
    switch (variant) {
        case NonlinearityKind::none:
        case NonlinearityKind::burgers:
            return;
        case NonlinearityKind::polynomial:
            if (poly_coeffs.size() < 2) {
                throw ConfigError("poly_coeffs: polynomial degree must be >= 1");
            }
            if (poly_coeffs.back() == 0.0) {
                throw ConfigError("poly_coeffs: leading coefficient must be nonzero");
            }
            for (double c : poly_coeffs) {
                if (!std::isfinite(c)) throw ConfigError("poly_coeffs: non-finite coefficient");
            }
            return;
        case NonlinearityKind::fhn:
            fhn.validate();
            return;
    }
}

void GridSpec::validate() const {
    if (n_grid == 0) throw ConfigError("n_grid must be positive");
    if (n_modes_keep == 0 || n_modes_keep > n_grid) {
        throw ConfigError("n_modes_keep must lie in [1, n_grid]");
    }
}

std::size_t transform_friendly_size(std::size_t minimum) {
    std::size_t n = 3;
    while (n < minimum) n = 2 * n + 1;
    return n;
}

std::size_t dealiased_grid_size(std::size_t degree, std::size_t modes, std::size_t n_out) {
    const std::size_t m = std::max(modes, n_out);
    return transform_friendly_size(std::max<std::size_t>(1, degree) * m);
}

// ---------------------------------------------------------------------------

struct SineTransform::Impl {
    std::size_t n;
    double length;
    double synth_scale;   // modes -> DST input
    double analysis_scale;  // DST output -> modes
    double* sin_in = nullptr;
    double* sin_out = nullptr;
    double* cos_in = nullptr;
    double* cos_out = nullptr;
    fftw_plan sin_plan = nullptr;
    fftw_plan cos_plan = nullptr;

    Impl(std::size_t n_grid, double L) : n(n_grid), length(L) {
        const double root = std::sqrt(2.0 / L);
        synth_scale = 0.5 * root;
        analysis_scale = 0.5 * root * L / static_cast<double>(n + 1);
        sin_in = fftw_alloc_real(n);
        sin_out = fftw_alloc_real(n);
        cos_in = fftw_alloc_real(n + 2);
        cos_out = fftw_alloc_real(n + 2);
        std::lock_guard lock(planner_mutex());
        sin_plan = fftw_plan_r2r_1d(static_cast<int>(n), sin_in, sin_out, FFTW_RODFT00,
                                    FFTW_ESTIMATE);
        cos_plan = fftw_plan_r2r_1d(static_cast<int>(n + 2), cos_in, cos_out, FFTW_REDFT00,
                                    FFTW_ESTIMATE);
    }

    ~Impl() {
        {
            std::lock_guard lock(planner_mutex());
            if (sin_plan) fftw_destroy_plan(sin_plan);
            if (cos_plan) fftw_destroy_plan(cos_plan);
        }
        fftw_free(sin_in);
        fftw_free(sin_out);
        fftw_free(cos_in);
        fftw_free(cos_out);
    }
};

SineTransform::SineTransform(std::size_t n_grid, double domain_length) {
    if (n_grid == 0) throw ConfigError("transform size must be positive");
    if (!(domain_length > 0.0)) throw ConfigError("domain_length must be positive");
    impl_ = std::make_unique<Impl>(n_grid, domain_length);
}

SineTransform::~SineTransform() = default;
SineTransform::SineTransform(SineTransform&&) noexcept = default;
SineTransform& SineTransform::operator=(SineTransform&&) noexcept = default;

std::size_t SineTransform::size() const noexcept { return impl_->n; }
double SineTransform::domain_length() const noexcept { return impl_->length; }

void SineTransform::modes_to_grid(std::span<const double> modes, std::span<double> grid) {
    auto& s = *impl_;
    if (modes.size() > s.n) {
        throw ConfigError("modes_to_grid: " + std::to_string(modes.size()) +
                          " modes exceed " + std::to_string(s.n) + " grid points");
    }
    if (grid.size() != s.n) throw ConfigError("modes_to_grid: grid size mismatch");
    std::size_t i = 0;
    for (; i < modes.size(); ++i) s.sin_in[i] = s.synth_scale * modes[i];
    for (; i < s.n; ++i) s.sin_in[i] = 0.0;
    fftw_execute(s.sin_plan);
    std::copy_n(s.sin_out, s.n, grid.begin());
}

void SineTransform::grid_to_modes(std::span<const double> grid, std::span<double> modes) {
    auto& s = *impl_;
    if (grid.size() != s.n) {
        throw ConfigError("grid_to_modes: expected " + std::to_string(s.n) +
                          " grid values, got " + std::to_string(grid.size()));
    }
    if (modes.size() > s.n) throw ConfigError("grid_to_modes: too many modes requested");
    std::copy(grid.begin(), grid.end(), s.sin_in);
    fftw_execute(s.sin_plan);
    for (std::size_t k = 0; k < modes.size(); ++k) modes[k] = s.analysis_scale * s.sin_out[k];
}

void SineTransform::derivative_to_grid(std::span<const double> modes, std::span<double> grid) {
    auto& s = *impl_;
    if (modes.size() > s.n) throw ConfigError("derivative_to_grid: too many modes");
    if (grid.size() != s.n) throw ConfigError("derivative_to_grid: grid size mismatch");
    const double wave = std::numbers::pi / s.length;
    s.cos_in[0] = 0.0;
    std::size_t k = 1;
    for (; k <= modes.size(); ++k) {
        s.cos_in[k] = s.synth_scale * wave * static_cast<double>(k) * modes[k - 1];
    }
    for (; k < s.n + 2; ++k) s.cos_in[k] = 0.0;
    fftw_execute(s.cos_plan);
    std::copy_n(s.cos_out + 1, s.n, grid.begin());
}

void SineTransform::cosine_series_to_modes(std::span<const double> grid, double left,
                                           double right, std::size_t max_wavenumber,
                                           std::span<double> modes) {
    auto& s = *impl_;
    if (grid.size() != s.n) throw ConfigError("cosine_series_to_modes: grid size mismatch");
    if (max_wavenumber > s.n) throw ConfigError("cosine_series_to_modes: degree exceeds grid");
    s.cos_in[0] = left;
    std::copy(grid.begin(), grid.end(), s.cos_in + 1);
    s.cos_in[s.n + 1] = right;
    fftw_execute(s.cos_plan);
    // a_m = Y_m / (n+1), halved for m = 0.
    const double inv = 1.0 / static_cast<double>(s.n + 1);
    const double proj = std::sqrt(2.0 / s.length) * s.length / std::numbers::pi;
    for (std::size_t k = 1; k <= modes.size(); ++k) {
        // int_0^L cos(m pi x/L) Phi_k dx vanishes unless k + m is odd.
        double acc = 0.0;
        for (std::size_t m = (k % 2 == 0) ? 1 : 0; m <= max_wavenumber; m += 2) {
            const double a = (m == 0 ? 0.5 : 1.0) * s.cos_out[m] * inv;
            const double kk = static_cast<double>(k), mm = static_cast<double>(m);
            acc += a * 2.0 * kk / (kk * kk - mm * mm);
        }
        modes[k - 1] += proj * acc;
    }
}

SineTransform& thread_local_transform(std::size_t n_grid, double domain_length) {
    thread_local std::map<std::pair<std::size_t, double>, std::unique_ptr<SineTransform>> cache;
    auto& slot = cache[{n_grid, domain_length}];
    if (!slot) slot = std::make_unique<SineTransform>(n_grid, domain_length);
    return *slot;
}

// ---------------------------------------------------------------------------

std::vector<double> modes_to_grid(const ModeVector& x, const GridSpec& grid,
                                  const OperatorSpec& spec) {
    spec.validate();
    if (x.size() > grid.n_grid) {
        throw ConfigError("modes_to_grid: " + std::to_string(x.size()) + " modes exceed " +
                          std::to_string(grid.n_grid) + " grid points");
    }
    std::vector<double> u(grid.n_grid);
    thread_local_transform(grid.n_grid, spec.domain_length).modes_to_grid(x.span(), u);
    return u;
}

ModeVector grid_to_modes(std::span<const double> u, const GridSpec& grid,
                         const OperatorSpec& spec) {
    spec.validate();
    grid.validate();
    if (u.size() != grid.n_grid) {
        throw ConfigError("grid_to_modes: expected " + std::to_string(grid.n_grid) +
                          " grid values, got " + std::to_string(u.size()));
    }
    ModeVector out(grid.n_modes_keep);
    thread_local_transform(grid.n_grid, spec.domain_length).grid_to_modes(u, out.span());
    return out;
}

ModeVector nemytskii_modes(const ModeVector& x, const NonlinearitySpec& nl,
                           const GridSpec& grid, std::size_t n_out, const OperatorSpec& spec) {
    if (nl.variant != NonlinearityKind::polynomial && nl.variant != NonlinearityKind::fhn) {
        throw ConfigError("nemytskii_modes: polynomial nonlinearity required");
    }
    nl.validate();
    spec.validate();
    require_dealiased(grid.n_grid, nl.degree(), x.size(), n_out, "nemytskii_modes");
    const SplitPolynomial f(nl.pointwise_coeffs());
    auto& tr = thread_local_transform(grid.n_grid, spec.domain_length);
    std::vector<double> u(grid.n_grid), even;
    tr.modes_to_grid(x.span(), u);
    ModeVector out(n_out);
    pointwise_to_modes(tr, f, u, even, x.size(), out.span());
    return out;
}

ModeVector burgers_modes(const ModeVector& x, const GridSpec& grid, std::size_t n_out,
                         const OperatorSpec& spec) {
    spec.validate();
    require_dealiased(grid.n_grid, 2, x.size(), n_out, "burgers_modes");
    auto& tr = thread_local_transform(grid.n_grid, spec.domain_length);
    std::vector<double> u(grid.n_grid), ux(grid.n_grid);
    tr.modes_to_grid(x.span(), u);
    tr.derivative_to_grid(x.span(), ux);
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = -u[j] * ux[j];
    ModeVector out(n_out);
    tr.grid_to_modes(u, out.span());
    return out;
}

std::pair<ModeVector, ModeVector> fhn_drift(const ModeVector& v, const ModeVector& w,
                                            const FHNParams& p, const GridSpec& grid,
                                            std::size_t n_out, const OperatorSpec& spec) {
    const auto nl = NonlinearitySpec::fitzhugh_nagumo(p);
    ModeVector fv = nemytskii_modes(v, nl, grid, n_out, spec);
    ModeVector fw(n_out);
    for (std::size_t k = 0; k < n_out; ++k) {
        const double vk = k < v.size() ? v[k] : 0.0;
        const double wk = k < w.size() ? w[k] : 0.0;
        fv[k] -= wk;
        fw[k] = p.epsilon * (vk - p.b * wk);
    }
    return {std::move(fv), std::move(fw)};
}

// ---------------------------------------------------------------------------

DriftEvaluator::DriftEvaluator(NonlinearitySpec nl, OperatorSpec op, std::size_t full_modes,
                               std::size_t preferred_grid)
    : nl_(std::move(nl)), op_(op), full_modes_(full_modes), preferred_grid_(preferred_grid) {
    nl_.validate();
    op_.validate();
    split_ = std::make_shared<const SplitPolynomial>(nl_.pointwise_coeffs());
}

SineTransform& DriftEvaluator::transform_for(std::size_t modes, std::size_t n_out) {
    const std::size_t degree = nl_.degree();
    std::size_t n = dealiased_grid_size(degree, modes, n_out);
    // The configured grid serves the full-resolution field; truncated fields
    // get the smallest exact grid.
    if (preferred_grid_ != 0 && modes >= full_modes_) {
        require_dealiased(preferred_grid_, degree, modes, n_out, "n_grid");
        n = preferred_grid_;
    }
    auto& slot = transforms_[n];
    if (!slot) slot = std::make_unique<SineTransform>(n, op_.domain_length);
    return *slot;
}

void DriftEvaluator::evaluate(std::span<const double> x, std::span<const double> w,
                              std::span<double> out) {
    if (nl_.variant == NonlinearityKind::none) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    auto& tr = transform_for(x.size(), out.size());
    const std::size_t n = tr.size();
    grid_buf_.resize(n);
    tr.modes_to_grid(x, grid_buf_);
    if (nl_.variant == NonlinearityKind::burgers) {
        deriv_buf_.resize(n);
        tr.derivative_to_grid(x, deriv_buf_);
        for (std::size_t j = 0; j < n; ++j) grid_buf_[j] = -grid_buf_[j] * deriv_buf_[j];
        tr.grid_to_modes(grid_buf_, out);
    } else {
        pointwise_to_modes(tr, *split_, grid_buf_, even_buf_, x.size(), out);
    }
    if (nl_.variant == NonlinearityKind::fhn) {
        const std::size_t m = std::min(out.size(), w.size());
        for (std::size_t k = 0; k < m; ++k) out[k] -= w[k];
    }
}

}  // namespace spde
