#include "spde/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "spde/errors.hpp"

namespace spde {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string estimates_csv(std::span<const EstimateRecord> records) {
    std::string out = "trial,variant,N,alpha,theta_hat,z\n";
    for (const auto& r : records) {
        out += std::to_string(r.trial);
        out += ',';
        out += to_string(r.variant);
        out += ',';
        out += std::to_string(r.n);
        out += ',';
        out += format_double(r.alpha);
        out += ',';
        out += format_double(r.theta_hat);
        out += ',';
        if (r.z) out += format_double(*r.z);
        out += '\n';
    }
    return out;
}

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,k,x\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const std::string t = format_double(traj.times[i]);
        const auto& s = traj.states[i];
        for (std::size_t k = 0; k < s.size(); ++k) {
            out += t;
            out += ',';
            out += std::to_string(k + 1);
            out += ',';
            out += format_double(s[k]);
            out += '\n';
        }
    }
    return out;
}

Trajectory parse_trajectory_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,k,x", 0) != 0) {
        throw ConfigError("trajectory CSV must start with the header t,k,x");
    }
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        double t = 0.0, x = 0.0;
        long long k = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ls(line);
        if (!(ls >> t >> c1 >> k >> c2 >> x) || c1 != ',' || c2 != ',' || k < 1) {
            throw ConfigError("trajectory CSV line " + std::to_string(lineno) + " is malformed");
        }
        if (times.empty() || t != times.back()) {
            if (!times.empty() && !(t > times.back())) {
                throw ConfigError("trajectory CSV times must increase (line " +
                                  std::to_string(lineno) + ")");
            }
            times.push_back(t);
            states.emplace_back();
        }
        auto& s = states.back();
        if (static_cast<std::size_t>(k) != s.size() + 1) {
            throw ConfigError("trajectory CSV modes must be listed 1..M (line " +
                              std::to_string(lineno) + ")");
        }
        s.push_back(x);
    }
    if (times.empty()) throw ConfigError("trajectory CSV holds no data");
    Trajectory traj;
    const std::size_t modes = states.front().size();
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (states[i].size() != modes) {
            throw ConfigError("trajectory CSV snapshots have differing mode counts");
        }
        traj.times.push_back(times[i]);
        traj.states.emplace_back(std::move(states[i]));
    }
    return traj;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string report_json(const MCReport& r) {
    json j;
    j["theta_true"] = r.theta_true;
    j["alpha"] = r.alpha;
    j["beta"] = r.beta;
    j["V"] = opt(r.V);
    j["rate_exponent"] = (r.beta + 1.0) / 2.0;
    j["n_trials"] = r.n_trials;
    j["n_failed"] = r.failures.size();
    j["histogram_N"] = r.histogram_N;
    json fails = json::array();
    for (const auto& f : r.failures) fails.push_back({{"trial", f.trial}, {"reason", f.reason}});
    j["failures"] = fails;
    json vars = json::object();
    for (const auto& v : r.variants) {
        json jv;
        json rows = json::array();
        for (const auto& row : v.rows) {
            rows.push_back({{"N", row.n},
                            {"count", row.count},
                            {"median", row.median},
                            {"p2_5", row.p025},
                            {"p97_5", row.p975},
                            {"mean", row.mean},
                            {"variance", row.variance},
                            {"mse", row.mse},
                            {"z_mean", opt(row.z_mean)},
                            {"z_variance", opt(row.z_variance)}});
        }
        jv["rows"] = rows;
        jv["mse_loglog_slope"] = opt(v.mse_slope);
        jv["ks_distance"] = opt(v.ks_distance);
        if (v.histogram) {
            jv["histogram"] = {{"N", v.histogram->n},
                               {"lo", v.histogram->lo},
                               {"bin_width", v.histogram->width},
                               {"counts", v.histogram->counts}};
        } else {
            jv["histogram"] = nullptr;
        }
        vars[std::string(to_string(v.variant))] = jv;
    }
    j["variants"] = vars;
    j["warnings"] = r.warnings;
    j["estimates_file"] = "estimates.csv";
    return j.dump(2) + "\n";
}

std::string advice_json(const Advice& a) {
    json j;
    j["example"] = std::string(to_string(a.example));
    j["n"] = a.n;
    j["beta"] = a.beta;
    j["rho_star"] = a.rho_star;
    json hyps = json::array();
    for (const auto& h : a.hypotheses) {
        hyps.push_back({{"name", h.name}, {"satisfied", h.satisfied}, {"checked", h.checked}});
    }
    j["hypotheses"] = hyps;
    auto est = [](const EstimatorAdvice& e) {
        return json{{"status", std::string(to_string(e.status))},
                    {"rate", opt(e.rate)},
                    {"V", opt(e.V)},
                    {"reason", e.reason}};
    };
    j["estimators"] = {{"full", est(a.full)}, {"partial", est(a.partial)},
                       {"linear", est(a.linear)}};
    j["conditions"] = {{"epsilon", opt(a.epsilon)}, {"delta", opt(a.delta)}};
    j["notes"] = a.notes;
    return j.dump(2) + "\n";
}

std::string constants_json(const AsymptoticConstants& c) {
    json j{{"c_mean", c.c_mean}, {"c_var", c.c_var}, {"V", c.V}, {"rate_exponent", c.rate_exponent}};
    return j.dump(2) + "\n";
}

namespace {

constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

struct Axis {
    double lo, hi;
    bool log;
    double map(double v, double a, double b) const {
        double t = log ? (std::log(v) - std::log(lo)) / (std::log(hi) - std::log(lo))
                       : (v - lo) / (hi - lo);
        return a + t * (b - a);
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

class Svg {
public:
    Svg(std::string title, Axis x, Axis y) : x_(x), y_(y) {
        os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
            << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
            << title << "</text>\n";
    }
    double px(double v) const { return x_.map(v, kLeft, kW - kRight); }
    double py(double v) const { return y_.map(v, kH - kBottom, kTop); }

    void axes(const std::vector<double>& xticks, const std::vector<double>& yticks,
              const std::string& xlabel, const std::string& ylabel) {
        os_ << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kW - kLeft - kRight
            << "\" height=\"" << kH - kTop - kBottom
            << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (double t : xticks) {
            os_ << "<text x=\"" << num(px(t)) << "\" y=\"" << kH - kBottom + 16
                << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(t) << "</text>\n";
        }
        for (double t : yticks) {
            os_ << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(py(t) + 4)
                << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(t) << "</text>\n";
        }
        os_ << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 10
            << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n"
            << "<text x=\"16\" y=\"" << kH / 2 << "\" transform=\"rotate(-90 16 " << kH / 2
            << ")\" text-anchor=\"middle\" font-size=\"12\">" << ylabel << "</text>\n";
    }
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                  const std::string& extra = "") {
        os_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" " << extra
            << " points=\"";
        for (const auto& [x, y] : pts) os_ << num(px(x)) << ',' << num(py(y)) << ' ';
        os_ << "\"/>\n";
    }
    void polygon(const std::vector<std::pair<double, double>>& pts, const std::string& fill) {
        os_ << "<polygon fill=\"" << fill << "\" stroke=\"none\" points=\"";
        for (const auto& [x, y] : pts) os_ << num(px(x)) << ',' << num(py(y)) << ' ';
        os_ << "\"/>\n";
    }
    void rect(double x0, double y0, double x1, double y1, const std::string& fill) {
        os_ << "<rect x=\"" << num(px(x0)) << "\" y=\"" << num(py(y1)) << "\" width=\""
            << num(px(x1) - px(x0)) << "\" height=\"" << num(py(y0) - py(y1)) << "\" fill=\""
            << fill << "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    }
    std::string finish() {
        os_ << "</svg>\n";
        return os_.str();
    }

private:
    Axis x_, y_;
    std::ostringstream os_;
};

std::vector<double> linear_ticks(double lo, double hi, int count) {
    std::vector<double> t;
    for (int i = 0; i <= count; ++i) t.push_back(lo + (hi - lo) * i / count);
    return t;
}

std::vector<double> decade_ticks(double lo, double hi) {
    std::vector<double> t;
    for (double d = std::pow(10.0, std::floor(std::log10(lo))); d <= hi * 1.0000001; d *= 10.0) {
        if (d >= lo * 0.9999999) t.push_back(d);
    }
    return t;
}

std::pair<double, double> padded(double lo, double hi) {
    if (hi <= lo) {
        const double d = std::max(std::abs(lo) * 0.1, 1e-12);
        return {lo - d, hi + d};
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

}  // namespace

std::string band_svg(const VariantSummary& s, double theta_true) {
    double ylo = theta_true, yhi = theta_true;
    for (const auto& r : s.rows) {
        ylo = std::min(ylo, r.p025);
        yhi = std::max(yhi, r.p975);
    }
    const auto [a, b] = padded(ylo, yhi);
    const double xlo = static_cast<double>(s.rows.front().n);
    const double xhi = std::max(xlo + 1.0, static_cast<double>(s.rows.back().n));
    Svg svg(std::string(to_string(s.variant)) + ": median and 95% band", {xlo, xhi, false},
            {a, b, false});
    std::vector<std::pair<double, double>> band, med;
    for (const auto& r : s.rows) band.emplace_back(static_cast<double>(r.n), r.p975);
    for (auto it = s.rows.rbegin(); it != s.rows.rend(); ++it) {
        band.emplace_back(static_cast<double>(it->n), it->p025);
    }
    for (const auto& r : s.rows) med.emplace_back(static_cast<double>(r.n), r.median);
    svg.polygon(band, "#9ecae1");
    svg.polyline({{xlo, theta_true}, {xhi, theta_true}}, "black", "stroke-dasharray=\"4 3\"");
    svg.polyline(med, "#d62728");
    svg.axes(linear_ticks(xlo, xhi, 5), linear_ticks(a, b, 5), "N", "theta estimate");
    return svg.finish();
}

std::string mse_svg(const VariantSummary& s, std::optional<double> V, double beta) {
    std::vector<std::pair<double, double>> pts, ref;
    for (const auto& r : s.rows) {
        if (r.mse > 0.0) pts.emplace_back(static_cast<double>(r.n), r.mse);
        if (V) {
            ref.emplace_back(static_cast<double>(r.n),
                             *V * std::pow(static_cast<double>(r.n), -(beta + 1.0)));
        }
    }
    double ylo = INFINITY, yhi = 0.0;
    for (const auto& p : pts) ylo = std::min(ylo, p.second), yhi = std::max(yhi, p.second);
    for (const auto& p : ref) ylo = std::min(ylo, p.second), yhi = std::max(yhi, p.second);
    if (!(yhi > 0.0)) ylo = 1e-12, yhi = 1.0;
    if (ylo == yhi) ylo /= 10.0, yhi *= 10.0;
    const double xlo = static_cast<double>(s.rows.front().n);
    const double xhi = std::max(xlo * 2.0, static_cast<double>(s.rows.back().n));
    Svg svg(std::string(to_string(s.variant)) + ": MSE vs N (log-log)", {xlo, xhi, true},
            {ylo / 1.5, yhi * 1.5, true});
    if (!ref.empty()) svg.polyline(ref, "black", "stroke-dasharray=\"4 3\"");
    if (!pts.empty()) svg.polyline(pts, "#1f77b4");
    std::vector<double> xt;
    for (const auto& r : s.rows) xt.push_back(static_cast<double>(r.n));
    svg.axes(xt, decade_ticks(ylo / 1.5, yhi * 1.5), "N", "MSE");
    return svg.finish();
}

std::string histogram_svg(const Histogram& h, Variant v) {
    const double hi = h.lo + h.width * static_cast<double>(h.counts.size());
    std::size_t total = 0, peak = 0;
    for (auto c : h.counts) total += c, peak = std::max(peak, c);
    const double scale = total > 0 ? 1.0 / (static_cast<double>(total) * h.width) : 0.0;
    const double top = std::max(0.45, static_cast<double>(peak) * scale * 1.1);
    Svg svg(std::string(to_string(v)) + ": standardized residuals at N = " + std::to_string(h.n),
            {h.lo, hi, false}, {0.0, top, false});
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double x0 = h.lo + h.width * static_cast<double>(i);
        svg.rect(x0, 0.0, x0 + h.width, static_cast<double>(h.counts[i]) * scale, "#9ecae1");
    }
    std::vector<std::pair<double, double>> pdf;
    for (int i = 0; i <= 200; ++i) {
        const double x = h.lo + (hi - h.lo) * i / 200.0;
        pdf.emplace_back(x, std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI));
    }
    svg.polyline(pdf, "#d62728");
    svg.axes(linear_ticks(h.lo, hi, 5), linear_ticks(0.0, top, 4), "z", "density");
    return svg.finish();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
    return ss.str();
}

}  // namespace spde
