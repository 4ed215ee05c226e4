#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kac/csv.hpp"
#include "kac/errors.hpp"
#include "kac/initial_data.hpp"
#include "kac/wild_solver.hpp"

namespace kac {

enum class Subcommand { solve, relax_rate, moment_check, bounds_audit, counterexample };

inline const char* subcommand_name(Subcommand s) {
    switch (s) {
        case Subcommand::solve: return "solve";
        case Subcommand::relax_rate: return "relax-rate";
        case Subcommand::moment_check: return "moment-check";
        case Subcommand::bounds_audit: return "bounds-audit";
        case Subcommand::counterexample: return "counterexample";
    }
    return "?";
}

inline std::optional<Subcommand> subcommand_from_name(const std::string& s) {
    if (s == "solve") return Subcommand::solve;
    if (s == "relax-rate") return Subcommand::relax_rate;
    if (s == "moment-check") return Subcommand::moment_check;
    if (s == "bounds-audit") return Subcommand::bounds_audit;
    if (s == "counterexample") return Subcommand::counterexample;
    return std::nullopt;
}

// Raw family descriptor as given in a config file; make_datum turns it into an
// InitialDatum and rejects parameters that do not belong to the family.
struct FamilySpec {
    std::string family;
    std::optional<double> sigma, halfwidth, beta;
    std::vector<double> weights, sigmas, means, coeffs;
    std::string grid_path;
};

inline InitialDatum make_datum(const FamilySpec& spec) {
    auto forbid = [&](bool set, const char* key) {
        if (set)
            throw ConfigError("key '" + std::string(key) + "' does not apply to family '" +
                                  spec.family + "'",
                              key);
    };
    if (spec.family == "gaussian") {
        if (!spec.sigma) throw ConfigError("gaussian family needs 'sigma'", "sigma");
        forbid(spec.halfwidth.has_value(), "halfwidth");
        forbid(spec.beta.has_value(), "beta");
        forbid(!spec.weights.empty(), "weights");
        forbid(!spec.coeffs.empty(), "coeffs");
        forbid(!spec.grid_path.empty(), "grid_path");
        return InitialDatum::gaussian(*spec.sigma);
    }
    if (spec.family == "uniform") {
        if (!spec.halfwidth) throw ConfigError("uniform family needs 'halfwidth'", "halfwidth");
        forbid(spec.sigma.has_value(), "sigma");
        forbid(spec.beta.has_value(), "beta");
        forbid(!spec.weights.empty(), "weights");
        forbid(!spec.coeffs.empty(), "coeffs");
        forbid(!spec.grid_path.empty(), "grid_path");
        return InitialDatum::uniform(*spec.halfwidth);
    }
    if (spec.family == "gaussian_mixture") {
        if (spec.weights.empty() || spec.sigmas.empty())
            throw ConfigError("gaussian_mixture family needs 'weights' and 'sigmas'", "weights");
        forbid(spec.sigma.has_value(), "sigma");
        forbid(spec.halfwidth.has_value(), "halfwidth");
        forbid(spec.beta.has_value(), "beta");
        forbid(!spec.coeffs.empty(), "coeffs");
        forbid(!spec.grid_path.empty(), "grid_path");
        return InitialDatum::gaussian_mixture(spec.weights, spec.sigmas, spec.means);
    }
    if (spec.family == "power_law") {
        if (!spec.beta) throw ConfigError("power_law family needs 'beta'", "beta");
        forbid(spec.sigma.has_value(), "sigma");
        forbid(spec.halfwidth.has_value(), "halfwidth");
        forbid(!spec.weights.empty(), "weights");
        forbid(!spec.coeffs.empty(), "coeffs");
        forbid(!spec.grid_path.empty(), "grid_path");
        return InitialDatum::power_law(*spec.beta);
    }
    if (spec.family == "cf_series") {
        if (spec.coeffs.empty()) throw ConfigError("cf_series family needs 'coeffs'", "coeffs");
        forbid(spec.sigma.has_value(), "sigma");
        forbid(spec.halfwidth.has_value(), "halfwidth");
        forbid(spec.beta.has_value(), "beta");
        forbid(!spec.weights.empty(), "weights");
        forbid(!spec.grid_path.empty(), "grid_path");
        return InitialDatum::cf_series(spec.coeffs);
    }
    if (spec.family == "custom_grid") {
        if (spec.grid_path.empty())
            throw ConfigError("custom_grid family needs 'grid_path'", "grid_path");
        std::vector<double> v, f;
        read_csv_pairs(spec.grid_path, v, f);
        return InitialDatum::custom_grid(std::move(v), std::move(f));
    }
    throw ConfigError("unknown family '" + spec.family + "'", "family");
}

struct ExperimentConfig {
    std::optional<Subcommand> subcommand;
    FamilySpec datum;
    std::vector<double> times;
    SolverConfig solver;
    long trials = 100000;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    bool emit_svg = false;
    double xi_star = 0.25;   // counterexample probe frequency
    double moment_m = 4.0;   // moment-check power
    double v_max = 0.0;      // inversion half-width, 0 = auto
    int n_v = 1601;          // inversion grid points
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

inline double parse_real(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                              "' expects a real number, got '" + v + "'",
                          key, line);
    }
}

inline long parse_int(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t used = 0;
        const long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                              "' expects an integer, got '" + v + "'",
                          key, line);
    }
}

inline bool parse_bool(const std::string& v, const std::string& key, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                          "' expects true/false, got '" + v + "'",
                      key, line);
}

inline std::vector<double> parse_list(const std::string& v, const std::string& key, int line) {
    std::vector<double> out;
    std::string item;
    std::istringstream ss(v);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError("line " + std::to_string(line) + ": empty element in list '" + key +
                                  "'",
                              key, line);
        out.push_back(parse_real(item, key, line));
    }
    if (out.empty())
        throw ConfigError("line " + std::to_string(line) + ": key '" + key + "' expects a list",
                          key, line);
    return out;
}

}  // namespace detail

// Flat key = value format with [section] headers; unknown sections or keys are
// errors, not warnings.
inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;

    static const std::map<std::string, std::set<std::string>> known = {
        {"experiment",
         {"subcommand", "times", "trials", "seed", "out_dir", "emit_svg", "xi_star", "moment_m",
          "v_max", "n_v"}},
        {"datum",
         {"family", "sigma", "halfwidth", "beta", "weights", "sigmas", "means", "coeffs",
          "grid_path"}},
        {"solver", {"xi_max", "n_points", "quad_nodes", "tol", "max_terms"}},
    };

    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header",
                                  "", line_no);
            section = detail::trim(line.substr(1, line.size() - 2));
            if (!known.count(section))
                throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" +
                                      section + "]",
                                  section, line_no);
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value", "",
                              line_no);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": key '" + key +
                                  "' outside any [section]",
                              key, line_no);
        if (!known.at(section).count(key))
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key +
                                  "' in section [" + section + "]",
                              key, line_no);

        if (section == "experiment") {
            if (key == "subcommand") {
                const auto sc = subcommand_from_name(value);
                if (!sc)
                    throw ConfigError("line " + std::to_string(line_no) +
                                          ": unknown subcommand '" + value + "'",
                                      key, line_no);
                cfg.subcommand = sc;
            } else if (key == "times") {
                cfg.times = detail::parse_list(value, key, line_no);
            } else if (key == "trials") {
                cfg.trials = detail::parse_int(value, key, line_no);
            } else if (key == "seed") {
                cfg.seed = static_cast<std::uint64_t>(detail::parse_int(value, key, line_no));
            } else if (key == "out_dir") {
                cfg.out_dir = value;
            } else if (key == "emit_svg") {
                cfg.emit_svg = detail::parse_bool(value, key, line_no);
            } else if (key == "xi_star") {
                cfg.xi_star = detail::parse_real(value, key, line_no);
            } else if (key == "moment_m") {
                cfg.moment_m = detail::parse_real(value, key, line_no);
            } else if (key == "v_max") {
                cfg.v_max = detail::parse_real(value, key, line_no);
            } else if (key == "n_v") {
                cfg.n_v = static_cast<int>(detail::parse_int(value, key, line_no));
            }
        } else if (section == "datum") {
            if (key == "family") cfg.datum.family = value;
            else if (key == "sigma") cfg.datum.sigma = detail::parse_real(value, key, line_no);
            else if (key == "halfwidth")
                cfg.datum.halfwidth = detail::parse_real(value, key, line_no);
            else if (key == "beta") cfg.datum.beta = detail::parse_real(value, key, line_no);
            else if (key == "weights") cfg.datum.weights = detail::parse_list(value, key, line_no);
            else if (key == "sigmas") cfg.datum.sigmas = detail::parse_list(value, key, line_no);
            else if (key == "means") cfg.datum.means = detail::parse_list(value, key, line_no);
            else if (key == "coeffs") cfg.datum.coeffs = detail::parse_list(value, key, line_no);
            else if (key == "grid_path") cfg.datum.grid_path = value;
        } else if (section == "solver") {
            if (key == "xi_max") cfg.solver.xi_max = detail::parse_real(value, key, line_no);
            else if (key == "n_points")
                cfg.solver.n_points = static_cast<int>(detail::parse_int(value, key, line_no));
            else if (key == "quad_nodes")
                cfg.solver.quad_nodes = static_cast<int>(detail::parse_int(value, key, line_no));
            else if (key == "tol") cfg.solver.tol = detail::parse_real(value, key, line_no);
            else if (key == "max_terms")
                cfg.solver.max_terms = static_cast<int>(detail::parse_int(value, key, line_no));
        }
    }

    for (std::size_t i = 1; i < cfg.times.size(); ++i)
        if (!(cfg.times[i] > cfg.times[i - 1]))
            throw ConfigError("times must be strictly increasing", "times");
    for (double t : cfg.times)
        if (!(t >= 0.0)) throw ConfigError("times must be nonnegative", "times");
    return cfg;
}

}  // namespace kac
