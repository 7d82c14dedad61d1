#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spde/mc.hpp"
#include "spde/simulate.hpp"
#include "spde/theory.hpp"

namespace spde {

/// Shortest round-trip decimal form of a double ("%.17g").
std::string format_double(double v);

std::string estimates_csv(std::span<const EstimateRecord> records);
std::string trajectory_csv(const Trajectory& traj);
/// Parses the long `t,k,x` format back; modes must be 1..M with every
/// snapshot complete.
Trajectory parse_trajectory_csv(const std::string& text);

std::string report_json(const MCReport& report);
std::string advice_json(const Advice& advice);
std::string constants_json(const AsymptoticConstants& c);

/// Median with the [p2.5, p97.5] band against N, with theta marked.
std::string band_svg(const VariantSummary& s, double theta_true);
/// log-log MSE against N with the squared-rate reference V N^{-(beta+1)}.
std::string mse_svg(const VariantSummary& s, std::optional<double> V, double beta);
std::string histogram_svg(const Histogram& h, Variant v);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace spde
