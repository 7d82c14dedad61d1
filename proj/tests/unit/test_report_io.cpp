#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "json.hpp"
#include "spde/errors.hpp"
#include "spde/report_io.hpp"

namespace spde {
namespace {

using nlohmann::json;

std::set<std::string> keys(const json& j) {
    std::set<std::string> out;
    for (auto it = j.begin(); it != j.end(); ++it) out.insert(it.key());
    return out;
}

TEST(Csv, EstimatesHeaderAndRows) {
    const std::vector<EstimateRecord> recs{{0, Variant::full, 20, 0.4, 0.021, 0.8},
                                           {1, Variant::linear, 4, 0.4, 0.5, std::nullopt}};
    const auto csv = estimates_csv(recs);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "trial,variant,N,alpha,theta_hat,z");
    EXPECT_NE(csv.find("\n0,full,20,0.40000000000000002,0.021000000000000001,0.80000000000000004\n"),
              std::string::npos);
    EXPECT_NE(csv.find("\n1,linear,4,0.40000000000000002,0.5,\n"), std::string::npos);
}

TEST(Csv, FormatDoubleRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678}) {
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
}

TEST(Csv, TrajectoryRoundTrip) {
    Trajectory t;
    t.times = {0.0, 0.01, 0.02};
    t.states = {ModeVector{1.0, -0.5}, ModeVector{0.25, 1.0 / 3.0}, ModeVector{-1e-9, 2.0}};
    const auto csv = trajectory_csv(t);
    EXPECT_EQ(csv.substr(0, 6), "t,k,x\n");
    const auto back = parse_trajectory_csv(csv);
    EXPECT_EQ(back.times, t.times);
    EXPECT_EQ(back.states, t.states);
}

TEST(Csv, TrajectoryRejectsMalformedInput) {
    EXPECT_THROW(parse_trajectory_csv("a,b,c\n0,1,1\n"), ConfigError);
    EXPECT_THROW(parse_trajectory_csv("t,k,x\n"), ConfigError);
    EXPECT_THROW(parse_trajectory_csv("t,k,x\n0,2,1\n"), ConfigError);
    EXPECT_THROW(parse_trajectory_csv("t,k,x\n0,1,1\n0,2,1\n0.1,1,1\n"), ConfigError);
    EXPECT_THROW(parse_trajectory_csv("t,k,x\n0,1,oops\n"), ConfigError);
}

MCReport sample_report() {
    std::vector<EstimateRecord> recs;
    for (std::size_t i = 0; i < 10; ++i) {
        for (std::size_t n : {4u, 8u}) {
            recs.push_back({i, Variant::full, n, 0.4, 0.02 + 0.001 * (i % 3) / n, {}});
        }
    }
    SummaryOptions opts;
    opts.histogram_N = 8;
    return summarize(recs, 0.02, {{4, 0.012}, {8, 0.012}}, 2.0, opts);
}

TEST(Json, ReportKeySet) {
    const auto j = json::parse(report_json(sample_report()));
    EXPECT_EQ(keys(j), (std::set<std::string>{"theta_true", "alpha", "beta", "V", "rate_exponent",
                                              "n_trials", "n_failed", "histogram_N", "failures",
                                              "variants", "warnings", "estimates_file"}));
    const auto& full = j["variants"]["full"];
    EXPECT_EQ(keys(full),
              (std::set<std::string>{"rows", "mse_loglog_slope", "ks_distance", "histogram"}));
    EXPECT_EQ(keys(full["rows"][0]),
              (std::set<std::string>{"N", "count", "median", "p2_5", "p97_5", "mean", "variance",
                                     "mse", "z_mean", "z_variance"}));
    EXPECT_EQ(keys(full["histogram"]), (std::set<std::string>{"N", "lo", "bin_width", "counts"}));
}

TEST(Json, AdviceAndConstantsKeySets) {
    AdvisorQuery q;
    q.example = Example::burgers;
    q.gamma = q.alpha = 0.8;
    const auto a = json::parse(advice_json(advise(q)));
    EXPECT_EQ(keys(a), (std::set<std::string>{"example", "n", "beta", "rho_star", "hypotheses",
                                              "estimators", "conditions", "notes"}));
    EXPECT_EQ(keys(a["estimators"]), (std::set<std::string>{"full", "partial", "linear"}));
    EXPECT_EQ(keys(a["estimators"]["full"]),
              (std::set<std::string>{"status", "rate", "V", "reason"}));
    EXPECT_EQ(keys(a["hypotheses"][0]), (std::set<std::string>{"name", "satisfied", "checked"}));
    EXPECT_EQ(a["estimators"]["full"]["status"], "asymptotically_normal");

    const auto c = json::parse(constants_json({1, 2, 3, 1.5}));
    EXPECT_EQ(keys(c), (std::set<std::string>{"c_mean", "c_var", "V", "rate_exponent"}));
}

void expect_svg(const std::string& s) {
    EXPECT_EQ(s.rfind("<svg", 0), 0u);
    EXPECT_NE(s.find("</svg>"), std::string::npos);
    EXPECT_EQ(s.find("nan"), std::string::npos);
    EXPECT_EQ(s.find("inf"), std::string::npos);
}

TEST(Svg, PanelsAreWellFormed) {
    const auto rep = sample_report();
    const auto& v = *rep.find(Variant::full);
    expect_svg(band_svg(v, 0.02));
    const auto mse = mse_svg(v, 0.012, 2.0);
    expect_svg(mse);
    EXPECT_NE(mse.find("polyline"), std::string::npos);
    ASSERT_TRUE(v.histogram.has_value());
    expect_svg(histogram_svg(*v.histogram, Variant::full));
}

TEST(Files, MissingFileIsIoError) {
    EXPECT_THROW(read_text_file("/nonexistent/dir/file.txt"), IoError);
    EXPECT_THROW(write_text_file("/nonexistent/dir/file.txt", "x"), IoError);
    const auto p = std::filesystem::temp_directory_path() / "spde_drift_io_test.txt";
    write_text_file(p, "hello\n");
    EXPECT_EQ(read_text_file(p), "hello\n");
    std::filesystem::remove(p);
}

}  // namespace
}  // namespace spde
