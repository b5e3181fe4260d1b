#pragma once

// JSON and CSV projections of series, condition reports and Gram checks.
// JSON is the source of truth; CSV is a flat convenience view.

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <variant>

#include "json.hpp"

#include "wds/condition.hpp"
#include "wds/kernel.hpp"
#include "wds/series.hpp"
#include "wds/weights.hpp"

namespace wds::io {

using nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Finite doubles as numbers; non-finite values as the strings "inf", "-inf", "nan".
inline ordered_json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

inline double to_number(const ordered_json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        if (s == "nan") return NAN;
    }
    throw std::invalid_argument("expected a number, got " + j.dump());
}

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline ordered_json complex_pair(Complex z) { return ordered_json::array({number(z.real()), number(z.imag())}); }

// ---------------------------------------------------------------------------
// Series

inline ordered_json to_json(const ExactSeries& f) {
    ordered_json coeffs = ordered_json::array();
    for (const auto& c : f.coefficients()) coeffs.push_back(c.str());
    return {{"mode", "exact"}, {"coeffs", std::move(coeffs)}};
}

inline ordered_json to_json(const FloatSeries& f) {
    ordered_json coeffs = ordered_json::array();
    for (double c : f.coefficients()) coeffs.push_back(number(c));
    return {{"mode", "float"}, {"coeffs", std::move(coeffs)}};
}

inline ordered_json to_json(const AnySeries& f) {
    return std::visit([](const auto& s) { return to_json(s); }, f);
}

inline AnySeries series_from_json(const ordered_json& j) {
    for (const auto& [key, _] : j.items())
        if (key != "mode" && key != "coeffs") throw std::invalid_argument("series: unknown key '" + key + "'");
    const std::string mode = j.at("mode").get<std::string>();
    const auto& coeffs = j.at("coeffs");
    if (!coeffs.is_array() || coeffs.empty()) throw std::invalid_argument("series: coeffs must be a non-empty array");
    if (mode == "exact") {
        std::vector<Rational> c;
        for (const auto& x : coeffs) {
            if (x.is_string()) c.push_back(Rational::parse(x.get<std::string>()));
            else if (x.is_number_integer()) c.emplace_back(x.get<std::int64_t>());
            else throw std::invalid_argument("series: exact coefficients must be integers or \"p/q\" strings");
        }
        return ExactSeries(std::move(c));
    }
    if (mode == "float") {
        std::vector<double> c;
        for (const auto& x : coeffs) c.push_back(to_number(x));
        return FloatSeries(std::move(c));
    }
    throw std::invalid_argument("series: mode must be \"exact\" or \"float\"");
}

inline ordered_json to_json(const EvaluatedValue& v) {
    return {{"value", complex_pair(v.value)},
            {"tail_bound", number(v.tail_bound)},
            {"terms", v.terms},
            {"certified", v.certified()},
            {"capped", v.capped}};
}

// ---------------------------------------------------------------------------
// Condition reports

inline ordered_json to_json(const ConditionReport& r) {
    ordered_json methods = ordered_json::array();
    for (Method m : r.methods) methods.push_back(to_string(m));
    ordered_json records = ordered_json::array();
    for (const auto& rec : r.records) {
        ordered_json o = {{"n", rec.n},
                          {"method", to_string(rec.method)},
                          {"value", number(rec.value)}};
        if (rec.exact) o["exact"] = rec.exact->str();
        o["verdict"] = to_string(rec.verdict);
        o["margin"] = number(rec.margin);
        if (!rec.terms.empty()) {
            ordered_json terms = ordered_json::array();
            for (double t : rec.terms) terms.push_back(number(t));
            o["terms"] = std::move(terms);
            o["terms_nonneg"] = rec.terms_nonneg;
        }
        records.push_back(std::move(o));
    }
    ordered_json mismatches = ordered_json::array();
    for (const auto& m : r.mismatches)
        mismatches.push_back({{"n", m.n},
                              {"method_a", to_string(m.a)},
                              {"method_b", to_string(m.b)},
                              {"value_a", number(m.value_a)},
                              {"value_b", number(m.value_b)}});
    ordered_json counts = ordered_json::object();
    for (auto v : {SignVerdict::nonneg_exact, SignVerdict::nonneg_within_tol, SignVerdict::negative_certified,
                   SignVerdict::inconclusive})
        counts[std::string(to_string(v))] = r.count(v);
    ordered_json out = {{"family_id", r.family_id},
                        {"delta", number(r.delta)},
                        {"start_index", r.k},
                        {"range", {r.n_lo, r.n_hi}},
                        {"arithmetic", to_string(r.mode)},
                        {"exact_fallback", r.exact_fallback ? ordered_json(*r.exact_fallback) : ordered_json()},
                        {"tolerance", number(r.tol)},
                        {"methods", std::move(methods)},
                        {"n1_trivially_satisfied", r.n1_trivially_satisfied},
                        {"overall_verdict", to_string(r.overall)},
                        {"first_negative", r.first_negative ? ordered_json(*r.first_negative) : ordered_json()},
                        {"verdict_counts", std::move(counts)},
                        {"mismatches", std::move(mismatches)},
                        {"records", std::move(records)}};
    return out;
}

/// CSV columns: n,value,method,verdict,margin. Exact values print as p/q.
inline std::string to_csv(const ConditionReport& r) {
    std::ostringstream os;
    os << "n,value,method,verdict,margin\n";
    for (const auto& rec : r.records) {
        os << rec.n << ',' << (rec.exact ? rec.exact->str() : format_double(rec.value)) << ',' << to_string(rec.method)
           << ',' << to_string(rec.verdict) << ',' << format_double(rec.margin) << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Gram checks

inline ordered_json to_json(const GramCheck& g) {
    ordered_json points = ordered_json::array();
    for (Complex p : g.points) points.push_back(complex_pair(p));
    ordered_json matrix = ordered_json::array();
    for (Eigen::Index i = 0; i < g.matrix.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < g.matrix.cols(); ++j) row.push_back(complex_pair(g.matrix(i, j)));
        matrix.push_back(std::move(row));
    }
    ordered_json eig = ordered_json::array();
    for (Eigen::Index i = 0; i < g.eigenvalues.size(); ++i) eig.push_back(number(g.eigenvalues(i)));
    return {{"kernel", to_string(g.kernel)},
            {"delta", number(g.delta)},
            {"abscissa", number(g.abscissa)},
            {"tolerance", number(g.tol)},
            {"points", std::move(points)},
            {"matrix", std::move(matrix)},
            {"eigenvalues", std::move(eig)},
            {"min_eigenvalue", number(g.min_eigenvalue)},
            {"error_budget",
             {{"truncation_bound", number(g.truncation_bound)},
              {"n_points_times_bound", number(g.error_budget)},
              {"max_terms_used", g.max_terms_used},
              {"capped_entries", g.capped_entries}}},
            {"hermitian_defect", number(g.hermitian_defect)},
            {"verdict", to_string(g.verdict)}};
}

// ---------------------------------------------------------------------------
// Growth audits

inline ordered_json to_json(const GrowthReport& r) {
    ordered_json o = {{"passed", r.passed}, {"exact", r.exact}, {"checks", r.checks}, {"min_margin", number(r.min_margin)}};
    if (r.first_violation) {
        const auto& v = *r.first_violation;
        o["first_violation"] = {{"prime", v.prime},
                                {"j", v.exponent},
                                {"ratio", number(v.ratio)},
                                {"bound", number(v.bound)},
                                {"margin", number(v.margin)}};
    } else {
        o["first_violation"] = nullptr;
    }
    if (r.delta_nonpositive) o["delta_nonpositive"] = *r.delta_nonpositive;
    return o;
}

inline ordered_json to_json(const AuditResult& r) {
    return {{"passed", r.passed},
            {"checked", r.checked},
            {"first_failure", r.first_failure ? ordered_json(*r.first_failure) : ordered_json()},
            {"detail", r.detail}};
}

}  // namespace wds::io
