#pragma once

// Strict JSON run configuration. Unknown keys are rejected at every level so
// that a typo never silently falls back to a default.
//
// Family schema:
//   {"kind": "named", "name": "divisor_pow", "parameters": {"alpha": 2}}
//   {"kind": "multiplicative", "parameters": {"exponent_values": ["1/2"], "tail": "repeat_last",
//    "per_prime": {"2": [3, 4]}}, "sigma": 1, "delta": 0, "growth_bound": {"C": 1, "tau": 0}}
//   {"kind": "additive", ...same parameters..., "start_index": 2}
//   {"kind": "explicit", "parameters": {"values": [1, "3/2", 2]}, "start_index": 2, "sigma": 1, "delta": 0}
//   {"kind": "measure_induced", "parameters": {"measure": {"type": "gamma_density", "alpha": 2}, "n0": 2}}
// Optional overrides on every kind: start_index, sigma, delta, growth_bound.
// A custom family without growth_bound gets C = inf, i.e. no tail certificates.

#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "wds/condition.hpp"
#include "wds/kernel.hpp"
#include "wds/rational.hpp"
#include "wds/weights.hpp"

namespace wds::config {

using nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;

namespace detail {

inline void only_keys(const ordered_json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

/// Integers and "p/q" strings become exact; dyadic decimals too; other decimals stay float.
inline WeightValue scalar(const ordered_json& j, const std::string& where) {
    try {
        if (j.is_number_integer()) return WeightValue::of(Rational(j.get<std::int64_t>()));
        if (j.is_number()) {
            const double x = j.get<double>();
            if (auto r = Rational::from_double(x)) return WeightValue::of(*r);
            return WeightValue::of(x);
        }
        if (j.is_string()) return WeightValue::of(Rational::parse(j.get<std::string>()));
    } catch (const std::exception& e) {
        throw ConfigError(where + ": " + e.what());
    }
    throw ConfigError(where + ": expected a number or a \"p/q\" string");
}

inline double real(const ordered_json& j, const std::string& where) {
    if (j.is_string() && j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    return scalar(j, where).approx;
}

inline std::uint64_t positive_int(const ordered_json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 1) throw ConfigError(where + ": expected an integer >= 1");
    return j.get<std::uint64_t>();
}

inline std::vector<WeightValue> scalar_list(const ordered_json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a non-empty array");
    std::vector<WeightValue> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(scalar(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline GrowthBound growth(const ordered_json& j) {
    only_keys(j, {"C", "tau"}, "growth_bound");
    GrowthBound g;
    g.C = real(j.at("C"), "growth_bound.C");
    g.tau = real(j.at("tau"), "growth_bound.tau");
    if (!(g.C >= 0.0)) throw ConfigError("growth_bound.C must be >= 0");
    return g;
}

inline double param(const ordered_json& params, const char* key, const std::string& name) {
    if (!params.contains(key)) throw ConfigError("family '" + name + "' needs parameter '" + key + "'");
    return real(params.at(key), "parameters." + std::string(key));
}

/// Prime-power table f(p, r) from exponent_values with optional per-prime rows.
inline PrimePowerFn prime_power_table(const ordered_json& params, bool& exact) {
    only_keys(params, {"exponent_values", "tail", "per_prime"}, "parameters");
    auto base = std::make_shared<std::vector<WeightValue>>(scalar_list(params.at("exponent_values"),
                                                                       "parameters.exponent_values"));
    const std::string tail = params.value("tail", "repeat_last");
    if (tail != "repeat_last" && tail != "undefined")
        throw ConfigError("parameters.tail must be \"repeat_last\" or \"undefined\"");
    auto rows = std::make_shared<std::map<std::uint64_t, std::vector<WeightValue>>>();
    if (params.contains("per_prime")) {
        const auto& pp = params.at("per_prime");
        if (!pp.is_object()) throw ConfigError("parameters.per_prime: expected an object keyed by prime");
        for (const auto& [key, row] : pp.items()) {
            std::uint64_t p = 0;
            try {
                std::size_t used = 0;
                p = std::stoull(key, &used);
                if (used != key.size()) throw std::invalid_argument(key);
            } catch (const std::exception&) {
                throw ConfigError("parameters.per_prime: key '" + key + "' is not an integer");
            }
            if (!is_prime(p)) throw ConfigError("parameters.per_prime: " + key + " is not prime");
            (*rows)[p] = scalar_list(row, "parameters.per_prime." + key);
        }
    }
    exact = true;
    for (const auto& v : *base) exact = exact && v.exact.has_value();
    for (const auto& [_, row] : *rows)
        for (const auto& v : row) exact = exact && v.exact.has_value();
    const bool repeat = tail == "repeat_last";
    return [base, rows, repeat](std::uint64_t p, unsigned r) -> WeightValue {
        const auto it = rows->find(p);
        const auto& row = it == rows->end() ? *base : it->second;
        if (r <= row.size()) return row[r - 1];
        if (repeat) return row.back();
        throw UndefinedWeightError("prime-power value undefined at " + std::to_string(p) + "^" + std::to_string(r));
    };
}

inline void require_declared(const ordered_json& j, const std::string& kind) {
    if (!j.contains("sigma") || !j.contains("delta"))
        throw ConfigError("family kind '" + kind + "' needs declared 'sigma' and 'delta'");
}

}  // namespace detail

namespace detail {

inline MeasureSpec measure_spec(const ordered_json& m) {
    if (!m.is_object() || !m.contains("type")) throw ConfigError("parameters.measure: missing 'type'");
    const std::string type = m.at("type").get<std::string>();
    if (type == "gamma_density") {
        only_keys(m, {"type", "alpha"}, "measure");
        return MeasureSpec::gamma_density(real(m.at("alpha"), "measure.alpha"));
    }
    if (type == "discrete") {
        only_keys(m, {"type", "atoms"}, "measure");
        std::vector<MeasureSpec::Atom> atoms;
        for (const auto& a : m.at("atoms")) {
            only_keys(a, {"sigma", "mass"}, "measure.atoms[]");
            atoms.push_back({real(a.at("sigma"), "atom.sigma"), real(a.at("mass"), "atom.mass")});
        }
        return MeasureSpec::discrete(std::move(atoms));
    }
    throw ConfigError("measure.type must be \"discrete\" or \"gamma_density\"");
}

}  // namespace detail

/// The measure behind a measure_induced family config, if that is its kind.
inline std::optional<MeasureSpec> measure_of(const ordered_json& family) {
    if (!family.is_object() || family.value("kind", "") != "measure_induced") return std::nullopt;
    return detail::measure_spec(family.at("parameters").at("measure"));
}

/// Builds a weight family from its JSON description.
inline WeightFamily build_family(const ordered_json& j) {
    using namespace detail;
    only_keys(j, {"kind", "name", "parameters", "start_index", "sigma", "delta", "growth_bound"}, "family");
    if (!j.contains("kind") || !j.at("kind").is_string()) throw ConfigError("family: missing string 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    const ordered_json params = j.value("parameters", ordered_json::object());
    if (!params.is_object()) throw ConfigError("family.parameters: expected an object");
    const GrowthBound no_certificate{std::numeric_limits<double>::infinity(), 0.0};

    std::optional<WeightFamily> w;
    try {
        if (kind == "named") {
            if (!j.contains("name") || !j.at("name").is_string()) throw ConfigError("named family: missing 'name'");
            const std::string name = j.at("name").get<std::string>();
            if (name == "ones" || name == "omega" || name == "big_omega") {
                only_keys(params, {}, "parameters");
                w = name == "ones" ? families::ones() : name == "omega" ? families::omega() : families::big_omega();
            } else if (name == "divisor_pow") {
                only_keys(params, {"alpha"}, "parameters");
                w = families::divisor_pow(param(params, "alpha", name));
            } else if (name == "log_pow") {
                only_keys(params, {"alpha"}, "parameters");
                w = families::log_pow(param(params, "alpha", name));
            } else if (name == "d_beta") {
                only_keys(params, {"beta"}, "parameters");
                w = families::d_beta(param(params, "beta", name));
            } else if (name == "one_plus") {
                only_keys(params, {"base"}, "parameters");
                if (!params.contains("base")) throw ConfigError("family 'one_plus' needs parameter 'base'");
                w = families::one_plus(build_family(params.at("base")));
            } else {
                throw ConfigError("unknown named family '" + name + "'");
            }
        } else if (kind == "multiplicative" || kind == "additive") {
            require_declared(j, kind);
            bool exact = false;
            PrimePowerFn f = prime_power_table(params, exact);
            WeightFamily::Declared d{kind == "additive" ? 2u : 1u, real(j.at("sigma"), "sigma"),
                                     real(j.at("delta"), "delta"),
                                     j.contains("growth_bound") ? growth(j.at("growth_bound")) : no_certificate};
            const std::string id = j.value("name", "custom_" + kind);
            if (kind == "multiplicative") {
                if (j.contains("start_index") && j.at("start_index") != 1)
                    throw ConfigError("multiplicative families start at index 1");
                w = multiplicative_from_prime_powers(id, f, d, exact);
            } else {
                if (j.contains("start_index")) d.start_index = static_cast<unsigned>(positive_int(j.at("start_index"), "start_index"));
                w = additive_from_prime_powers(id, f, d, exact);
            }
        } else if (kind == "explicit") {
            require_declared(j, kind);
            only_keys(params, {"values"}, "parameters");
            const unsigned k =
                j.contains("start_index") ? static_cast<unsigned>(positive_int(j.at("start_index"), "start_index")) : 1u;
            w = families::explicit_values(j.value("name", "custom_explicit"), k,
                                          scalar_list(params.at("values"), "parameters.values"),
                                          real(j.at("sigma"), "sigma"), real(j.at("delta"), "delta"),
                                          j.contains("growth_bound") ? growth(j.at("growth_bound")) : no_certificate);
        } else if (kind == "measure_induced") {
            only_keys(params, {"measure", "n0"}, "parameters");
            const MeasureSpec spec = detail::measure_spec(params.at("measure"));
            const unsigned n0 =
                params.contains("n0") ? static_cast<unsigned>(positive_int(params.at("n0"), "parameters.n0")) : 2u;
            w = measure_family(spec, n0);
        } else {
            throw ConfigError("unknown family kind '" + kind + "'");
        }

        if (kind == "named" || kind == "measure_induced") {
            WeightFamily::Declared d = w->declared();
            bool changed = false;
            if (j.contains("start_index")) {
                d.start_index = static_cast<unsigned>(positive_int(j.at("start_index"), "start_index"));
                changed = true;
            }
            if (j.contains("sigma")) d.sigma = real(j.at("sigma"), "sigma"), changed = true;
            if (j.contains("delta")) d.delta = real(j.at("delta"), "delta"), changed = true;
            if (j.contains("growth_bound")) d.growth = growth(j.at("growth_bound")), changed = true;
            if (changed) w = w->with_declared(d);
        } else if (kind != "named" && j.contains("name") && !j.at("name").is_string()) {
            throw ConfigError("family.name must be a string");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("family: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
    }
    return *w;
}

// ---------------------------------------------------------------------------
// Run configuration

struct GridSpec {
    std::size_t count = 8;
    std::vector<Complex> points;  // explicit points override count
};

struct AuditSpec {
    unsigned max_exp = 12;
    std::uint64_t primes_up_to = 100;
};

struct RunConfig {
    ordered_json family;
    std::optional<double> delta;
    std::optional<unsigned> k;
    std::uint64_t n_max = 10'000;
    std::vector<Method> methods;  // empty: choose from the family kind
    std::optional<double> tol;
    ModeRequest arithmetic = ModeRequest::automatic;
    KernelKind kernel = KernelKind::kappa;
    GridSpec grid;
    Complex s{1.0, 0.0};
    std::optional<Complex> u;
    double alpha = 1.0;
    AuditSpec audit;
    std::size_t max_terms = 1'000'000;
    std::string out;
    bool timestamp = true;
};

inline Complex parse_complex(const ordered_json& j, const std::string& where) {
    if (j.is_array() && j.size() == 2) return {detail::real(j[0], where), detail::real(j[1], where)};
    if (j.is_number() || j.is_string()) return {detail::real(j, where), 0.0};
    throw ConfigError(where + ": expected a real or a [re, im] pair");
}

inline ModeRequest parse_arithmetic(const std::string& s) {
    if (s == "auto") return ModeRequest::automatic;
    if (s == "exact") return ModeRequest::exact;
    if (s == "float") return ModeRequest::floating;
    throw ConfigError("arithmetic must be \"auto\", \"exact\" or \"float\"");
}

inline std::string_view to_string(ModeRequest m) {
    switch (m) {
        case ModeRequest::automatic: return "auto";
        case ModeRequest::exact: return "exact";
        case ModeRequest::floating: return "float";
    }
    return "?";
}

inline std::vector<Method> parse_methods(const std::vector<std::string>& names) {
    std::vector<Method> out;
    for (const auto& n : names) {
        try {
            out.push_back(parse_method(n));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    return out;
}

inline RunConfig parse_run_config(const ordered_json& j) {
    using namespace detail;
    only_keys(j,
              {"schema_version", "family", "delta", "k", "n_max", "methods", "tol", "arithmetic", "kernel", "grid", "s",
               "u", "alpha", "audit", "max_terms", "out", "timestamp"},
              "config");
    RunConfig c;
    try {
        if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion)
            throw ConfigError("unsupported schema_version " + j.at("schema_version").dump());
        if (!j.contains("family")) throw ConfigError("config: missing 'family'");
        c.family = j.at("family");
        build_family(c.family);  // validate early
        if (j.contains("delta") && !j.at("delta").is_null()) c.delta = real(j.at("delta"), "delta");
        if (j.contains("k") && !j.at("k").is_null()) c.k = static_cast<unsigned>(positive_int(j.at("k"), "k"));
        if (j.contains("n_max")) c.n_max = positive_int(j.at("n_max"), "n_max");
        if (j.contains("methods")) c.methods = parse_methods(j.at("methods").get<std::vector<std::string>>());
        if (j.contains("tol") && !j.at("tol").is_null()) c.tol = real(j.at("tol"), "tol");
        if (j.contains("arithmetic")) c.arithmetic = parse_arithmetic(j.at("arithmetic").get<std::string>());
        if (j.contains("kernel")) c.kernel = parse_kernel(j.at("kernel").get<std::string>());
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            only_keys(g, {"count", "points"}, "grid");
            if (g.contains("count")) c.grid.count = positive_int(g.at("count"), "grid.count");
            if (g.contains("points"))
                for (const auto& p : g.at("points")) c.grid.points.push_back(parse_complex(p, "grid.points[]"));
        }
        if (j.contains("s")) c.s = parse_complex(j.at("s"), "s");
        if (j.contains("u") && !j.at("u").is_null()) c.u = parse_complex(j.at("u"), "u");
        if (j.contains("alpha")) c.alpha = real(j.at("alpha"), "alpha");
        if (j.contains("audit")) {
            const auto& a = j.at("audit");
            only_keys(a, {"max_exp", "primes_up_to"}, "audit");
            if (a.contains("max_exp")) c.audit.max_exp = static_cast<unsigned>(positive_int(a.at("max_exp"), "audit.max_exp"));
            if (a.contains("primes_up_to")) c.audit.primes_up_to = positive_int(a.at("primes_up_to"), "audit.primes_up_to");
        }
        if (j.contains("max_terms")) c.max_terms = positive_int(j.at("max_terms"), "max_terms");
        if (j.contains("out")) c.out = j.at("out").get<std::string>();
        if (j.contains("timestamp")) c.timestamp = j.at("timestamp").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (c.tol && !(*c.tol >= 0.0)) throw ConfigError("tol must be >= 0");
    return c;
}

inline ordered_json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
}

/// Shorthand family: a JSON object, or name[:key=value,...] for named families.
inline ordered_json family_from_flag(const std::string& text) {
    if (!text.empty() && text.front() == '{') {
        try {
            return ordered_json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("--family: ") + e.what());
        }
    }
    ordered_json j = {{"kind", "named"}};
    const auto colon = text.find(':');
    j["name"] = text.substr(0, colon);
    if (colon != std::string::npos) {
        ordered_json params = ordered_json::object();
        std::stringstream ss(text.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw ConfigError("--family: expected key=value, got '" + item + "'");
            const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
            if (key == "base") params[key] = family_from_flag(value);
            else {
                try {
                    std::size_t used = 0;
                    const double x = std::stod(value, &used);
                    if (used != value.size()) throw std::invalid_argument(value);
                    params[key] = x;
                } catch (const std::exception&) {
                    params[key] = value;
                }
            }
        }
        j["parameters"] = std::move(params);
    }
    return j;
}

}  // namespace wds::config
