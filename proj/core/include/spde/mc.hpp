#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spde/errors.hpp"
#include "spde/estimate.hpp"
#include "spde/simulate.hpp"

namespace spde {

enum class Backend { automatic, ou_exact };

std::string_view to_string(Backend b);
Backend backend_from_string(std::string_view name);

struct StudySpec {
    ModelSpec model;
    SchemeSpec scheme;  ///< scheme.seed is the master seed
    EstimatorRequest req;
    std::size_t n_trials = 1;
    /// 0 selects the largest N of the request.
    std::size_t histogram_N = 0;
    double histogram_bin_width = 0.4;
    double histogram_lo = -5.0;
    double histogram_hi = 5.0;
    Backend backend = Backend::automatic;

    std::size_t resolved_histogram_N() const;
    void validate() const;
};

struct EstimateRecord {
    std::size_t trial = 0;
    Variant variant = Variant::full;
    std::size_t n = 0;
    double alpha = 0.0;
    double theta_hat = 0.0;
    std::optional<double> z;
};

struct TrialFailure {
    std::size_t trial = 0;
    std::string reason;
};

struct SummaryRow {
    std::size_t n = 0;
    std::size_t count = 0;
    double median = 0.0;
    double p025 = 0.0;
    double p975 = 0.0;
    double mean = 0.0;
    double variance = 0.0;  ///< population variance (divide by count)
    double mse = 0.0;       ///< (1/M) sum (theta_hat - theta)^2
    std::optional<double> z_mean;
    std::optional<double> z_variance;  ///< sample variance (divide by count - 1)
};

struct Histogram {
    std::size_t n = 0;
    double lo = -5.0;
    double width = 0.4;
    /// Bin i covers [lo + i width, lo + (i+1) width); outliers go to the edge bins.
    std::vector<std::size_t> counts;
};

struct VariantSummary {
    Variant variant = Variant::full;
    std::vector<SummaryRow> rows;
    std::optional<double> mse_slope;  ///< least squares slope of log MSE vs log N
    std::optional<double> ks_distance;
    std::optional<Histogram> histogram;
};

struct MCReport {
    double theta_true = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    std::optional<double> V;
    std::size_t n_trials = 0;
    std::size_t histogram_N = 0;
    std::vector<TrialFailure> failures;
    std::vector<VariantSummary> variants;
    std::vector<EstimateRecord> estimates;  ///< sorted by (trial, N, variant order)
    std::vector<std::string> warnings;

    const VariantSummary* find(Variant v) const;
    const SummaryRow* row(Variant v, std::size_t n) const;
};

/// Raised when more than 10% of the trials fail; carries the partial report.
class StudyError : public Error {
public:
    StudyError(const std::string& what, std::shared_ptr<const MCReport> partial)
        : Error(what), partial_(std::move(partial)) {}
    const MCReport& partial_report() const noexcept { return *partial_; }

private:
    std::shared_ptr<const MCReport> partial_;
};

struct SummaryOptions {
    std::size_t histogram_N = 0;
    double bin_width = 0.4;
    double lo = -5.0;
    double hi = 5.0;
};

/// Per-(variant, N) statistics. z is recomputed from theta_hat whenever
/// V_by_N holds an entry for that N.
MCReport summarize(std::vector<EstimateRecord> estimates, double theta_true,
                   const std::map<std::size_t, double>& V_by_N, double beta,
                   const SummaryOptions& opts = {});

/// Runs the trials on `threads` workers (0 = hardware concurrency). The
/// report does not depend on the thread count.
MCReport run_study(const StudySpec& spec, unsigned threads = 1);

/// One trial: simulation plus all requested estimators.
std::vector<EstimateRecord> run_trial(const StudySpec& spec, std::size_t trial);

// Statistics helpers.
double percentile_type7(std::span<const double> sorted, double p);
double normal_cdf(double x);
double ks_distance_normal(std::vector<double> sample);
double loglog_slope(std::span<const double> x, std::span<const double> y);
Histogram make_histogram(std::span<const double> z, double lo, double hi, double width);

}  // namespace spde
