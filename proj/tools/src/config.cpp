#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "spde/errors.hpp"
#include "spde/report_io.hpp"

namespace spde::cli {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"model",
         {"operator", "domain_length", "theta_true", "gamma", "nonlinearity", "poly_coeffs",
          "initial_modes", "initial_w_modes", "n_sim", "n_grid", "sigma", "a", "b", "epsilon",
          "sigma_w", "gamma_w"}},
        {"scheme", {"dt", "t_final", "seed", "snapshot_stride"}},
        {"estimators",
         {"alpha", "N_list", "variants", "bias_model", "bias_poly_coeffs", "numerator_mode"}},
        {"study",
         {"n_trials", "histogram_N", "histogram_bin_width", "histogram_range", "backend"}},
    };
    return keys;
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

class Section {
public:
    Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

    std::optional<std::string> raw(const std::string& key) const {
        if (!tree_) return std::nullopt;
        auto v = tree_->get_optional<std::string>(key);
        if (!v) return std::nullopt;
        return trim(*v);
    }

    std::string qualified(const std::string& key) const { return name_ + "." + key; }

    double number(const std::string& key, double fallback) const {
        auto v = raw(key);
        return v ? parse_double(key, *v) : fallback;
    }

    std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback) const {
        auto v = raw(key);
        if (!v) return fallback;
        std::uint64_t out = 0;
        const auto* end = v->data() + v->size();
        auto [p, ec] = std::from_chars(v->data(), end, out);
        if (ec != std::errc() || p != end) {
            throw ConfigError(qualified(key) + ": expected a nonnegative integer, got '" + *v +
                              "'");
        }
        return out;
    }

    std::string text(const std::string& key, const std::string& fallback) const {
        auto v = raw(key);
        return v ? *v : fallback;
    }

    std::vector<std::string> words(const std::string& key) const {
        std::vector<std::string> out;
        auto v = raw(key);
        if (!v) return out;
        std::string s = *v;
        std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '[' || c == ']'; },
                        ' ');
        std::istringstream in(s);
        for (std::string w; in >> w;) out.push_back(w);
        return out;
    }

    std::vector<double> numbers(const std::string& key) const {
        std::vector<double> out;
        for (const auto& w : words(key)) out.push_back(parse_double(key, w));
        return out;
    }

    std::vector<std::size_t> sizes(const std::string& key) const {
        std::vector<std::size_t> out;
        for (const auto& w : words(key)) {
            std::size_t n = 0;
            auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), n);
            if (ec != std::errc() || p != w.data() + w.size()) {
                throw ConfigError(qualified(key) + ": expected positive integers, got '" + w +
                                  "'");
            }
            out.push_back(n);
        }
        return out;
    }

    bool has(const std::string& key) const { return raw(key).has_value(); }

private:
    double parse_double(const std::string& key, const std::string& s) const {
        double out = 0.0;
        const auto* end = s.data() + s.size();
        auto [p, ec] = std::from_chars(s.data(), end, out);
        if (ec != std::errc() || p != end || !std::isfinite(out)) {
            throw ConfigError(qualified(key) + ": expected a finite number, got '" + s + "'");
        }
        return out;
    }

    std::string name_;
    const pt::ptree* tree_;
};

// Rewrap validation failures so the message names the config key.
template <class F>
void checked(const std::string& key, F&& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        if (msg.find(key) != std::string::npos) throw;
        throw ConfigError(key + ": " + msg);
    }
}

NonlinearitySpec parse_nonlinearity(const Section& s, const std::string& kind_key,
                                    const std::string& coeffs_key, const FHNParams& fhn) {
    const std::string kind = s.text(kind_key, "none");
    NonlinearitySpec nl;
    checked(s.qualified(kind_key), [&] {
        switch (nonlinearity_kind_from_string(kind)) {
            case NonlinearityKind::none: nl = NonlinearitySpec::none(); break;
            case NonlinearityKind::polynomial:
                if (!s.has(coeffs_key)) {
                    throw ConfigError(s.qualified(coeffs_key) +
                                      " is required for a polynomial nonlinearity");
                }
                nl = NonlinearitySpec::polynomial(s.numbers(coeffs_key));
                break;
            case NonlinearityKind::burgers: nl = NonlinearitySpec::burgers(); break;
            case NonlinearityKind::fhn: nl = NonlinearitySpec::fitzhugh_nagumo(fhn); break;
        }
    });
    checked(s.qualified(coeffs_key), [&] { nl.validate(); });
    return nl;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.message() + " (line " +
                          std::to_string(e.line()) + ")");
    }
    for (const auto& [section, body] : tree) {
        const auto it = known_keys().find(section);
        if (it == known_keys().end()) {
            throw ConfigError("unknown config section [" + section + "]");
        }
        if (body.empty() && !body.data().empty()) {
            throw ConfigError("key '" + section + "' must be inside a section");
        }
        for (const auto& [key, value] : body) {
            if (!it->second.count(key)) {
                throw ConfigError("unknown config key '" + section + "." + key + "'");
            }
        }
    }
    auto section = [&](const char* name) {
        auto child = tree.get_child_optional(name);
        return Section(name, child ? &*child : nullptr);
    };
    const Section model = section("model");
    const Section scheme = section("scheme");
    const Section est = section("estimators");
    const Section study = section("study");

    RunConfig cfg;
    StudySpec& s = cfg.study;

    ModelSpec& m = s.model;
    checked("model.operator", [&] {
        m.op.kind = operator_kind_from_string(model.text("operator", "dirichlet_laplacian_1d"));
    });
    m.op.domain_length = model.number("domain_length", 1.0);
    checked("model.domain_length", [&] { m.op.validate(); });
    m.theta_true = model.number("theta_true", 1.0);
    m.gamma = model.number("gamma", 1.0);
    m.sigma = model.number("sigma", 1.0);
    m.n_sim = model.unsigned_int("n_sim", 100);
    m.n_grid = model.unsigned_int("n_grid", 0);
    FHNParams fhn;
    fhn.a = model.number("a", fhn.a);
    fhn.b = model.number("b", fhn.b);
    fhn.epsilon = model.number("epsilon", fhn.epsilon);
    fhn.sigma_w = model.number("sigma_w", fhn.sigma_w);
    fhn.gamma_w = model.number("gamma_w", fhn.gamma_w);
    m.nonlinearity = parse_nonlinearity(model, "nonlinearity", "poly_coeffs", fhn);
    const bool coupled = m.nonlinearity.variant == NonlinearityKind::fhn;
    if (!coupled) {
        for (const char* k : {"a", "b", "epsilon", "sigma_w", "gamma_w", "initial_w_modes"}) {
            if (model.has(k)) {
                throw ConfigError(std::string("model.") + k +
                                  " only applies to nonlinearity = fhn");
            }
        }
    }
    if (m.nonlinearity.variant != NonlinearityKind::polynomial && model.has("poly_coeffs")) {
        throw ConfigError("model.poly_coeffs only applies to nonlinearity = polynomial");
    }
    m.initial_modes = ModeVector(model.numbers("initial_modes"));
    m.initial_w = ModeVector(model.numbers("initial_w_modes"));

    SchemeSpec& sc = s.scheme;
    sc.dt = scheme.number("dt", sc.dt);
    sc.t_final = scheme.number("t_final", sc.t_final);
    sc.seed = scheme.unsigned_int("seed", 0);
    sc.snapshot_stride = scheme.unsigned_int("snapshot_stride", 0);

    EstimatorRequest& r = s.req;
    r.alpha = est.number("alpha", m.gamma);
    r.n_list = est.sizes("N_list");
    if (r.n_list.empty()) r.n_list = {m.n_sim};
    if (est.has("variants")) {
        r.variants.clear();
        checked("estimators.variants", [&] {
            for (const auto& w : est.words("variants")) r.variants.push_back(variant_from_string(w));
        });
        if (r.variants.empty()) throw ConfigError("estimators.variants must not be empty");
    } else if (coupled) {
        r.variants = {Variant::full, Variant::partial1, Variant::partial2, Variant::linear};
    }
    const std::string bias = est.text("bias_model", "true");
    if (bias == "true") {
        if (est.has("bias_poly_coeffs")) {
            throw ConfigError("estimators.bias_poly_coeffs requires bias_model = polynomial");
        }
        r.bias_model.reset();
    } else {
        r.bias_model = parse_nonlinearity(est, "bias_model", "bias_poly_coeffs", fhn);
    }
    checked("estimators.numerator_mode", [&] {
        r.numerator_mode = numerator_mode_from_string(est.text("numerator_mode", "robust"));
    });

    s.n_trials = study.unsigned_int("n_trials", 1);
    s.histogram_N = study.unsigned_int("histogram_N", 0);
    s.histogram_bin_width = study.number("histogram_bin_width", 0.4);
    if (study.has("histogram_range")) {
        const auto range = study.numbers("histogram_range");
        if (range.size() != 2) {
            throw ConfigError("study.histogram_range: expected two numbers 'lo, hi'");
        }
        s.histogram_lo = range[0];
        s.histogram_hi = range[1];
    }
    checked("study.backend",
            [&] { s.backend = backend_from_string(study.text("backend", "auto")); });

    // Physical validation; messages already name the offending field.
    s.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_text_file(path));
}

}  // namespace spde::cli
