#pragma once

// Command implementations behind the wds executable. Each command turns a
// validated RunConfig into a JSON report and an exit code that depends on the
// report verdicts only:
//   0  nonnegative / PSD on the audited range
//   1  configuration or input error
//   2  certified negative value or certified indefinite Gram matrix
//   3  inconclusive

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "wds/condition.hpp"
#include "wds/config.hpp"
#include "wds/io.hpp"
#include "wds/kernel.hpp"
#include "wds/weights.hpp"

namespace wds::cli {

using nlohmann::ordered_json;
using config::ConfigError;
using config::RunConfig;

enum ExitCode : int { kOk = 0, kConfigError = 1, kNegative = 2, kInconclusive = 3 };

inline constexpr double kVonMangoldtTol = 1e-12;

struct Outcome {
    int exit_code = kOk;
    ordered_json result;
    std::string csv;      // check-condition only
    std::string summary;  // one line for stderr
};

inline int exit_code_for(SignVerdict v) {
    switch (v) {
        case SignVerdict::nonneg_exact:
        case SignVerdict::nonneg_within_tol: return kOk;
        case SignVerdict::negative_certified: return kNegative;
        case SignVerdict::inconclusive: return kInconclusive;
    }
    return kInconclusive;
}

inline int exit_code_for(GramVerdict v) {
    switch (v) {
        case GramVerdict::psd_within_tol: return kOk;
        case GramVerdict::indefinite_certified: return kNegative;
        case GramVerdict::inconclusive: return kInconclusive;
    }
    return kInconclusive;
}

/// Negative beats inconclusive beats ok.
inline int combine(int a, int b) {
    if (a == kNegative || b == kNegative) return kNegative;
    if (a == kInconclusive || b == kInconclusive) return kInconclusive;
    return kOk;
}

inline std::vector<Method> default_methods(const WeightFamily& w, unsigned k) {
    std::vector<Method> m{Method::divisor_sum};
    if (w.kind() == WeightKind::multiplicative && k == 1) m.push_back(Method::mult_product);
    if (w.kind() == WeightKind::additive && k <= 2) m.push_back(Method::additive_Tt);
    return m;
}

/// Everything a command resolves from the config before running.
struct Resolved {
    WeightFamily family;
    double delta;
    unsigned k;
    std::vector<Method> methods;
    double tol;
};

inline Resolved resolve(const RunConfig& c, double default_tol = kDefaultConditionTol) {
    WeightFamily w = config::build_family(c.family);
    const double delta = c.delta.value_or(w.delta());
    const unsigned k = c.k.value_or(w.start_index());
    std::vector<Method> methods = c.methods.empty() ? default_methods(w, k) : c.methods;
    return {std::move(w), delta, k, std::move(methods), c.tol.value_or(default_tol)};
}

inline ordered_json family_summary(const WeightFamily& w) {
    return {{"id", w.id()},
            {"kind", to_string(w.kind())},
            {"start_index", w.start_index()},
            {"sigma", io::number(w.sigma())},
            {"delta", io::number(w.delta())},
            {"growth_bound", {{"C", io::number(w.growth().C)}, {"tau", io::number(w.growth().tau)}}},
            {"exact_capable", w.exact_capable()}};
}

/// The fully resolved config; feeding it back through parse_run_config reproduces the report.
inline ordered_json resolved_config(const std::string& command, const RunConfig& c, const Resolved& r) {
    auto complex_json = [](Complex z) { return io::complex_pair(z); };
    ordered_json j = {{"schema_version", config::kSchemaVersion}, {"family", c.family}};
    j["delta"] = io::number(r.delta);
    j["k"] = r.k;
    j["n_max"] = c.n_max;
    ordered_json methods = ordered_json::array();
    for (Method m : r.methods) methods.push_back(to_string(m));
    j["methods"] = methods;
    j["tol"] = io::number(r.tol);
    j["arithmetic"] = config::to_string(c.arithmetic);
    if (command == "gram" || command == "eval-kernel") {
        j["kernel"] = to_string(c.kernel);
        j["max_terms"] = c.max_terms;
    }
    if (command == "gram") {
        ordered_json grid = {{"count", c.grid.count}};
        if (!c.grid.points.empty()) {
            ordered_json pts = ordered_json::array();
            for (Complex p : c.grid.points) pts.push_back(complex_json(p));
            grid["points"] = pts;
        }
        j["grid"] = grid;
    }
    if (command == "eval-kernel") {
        j["s"] = complex_json(c.s);
        j["u"] = complex_json(c.u.value_or(c.s));
    }
    if (command == "von-mangoldt") j["alpha"] = io::number(c.alpha);
    if (command == "classify")
        j["audit"] = {{"max_exp", c.audit.max_exp}, {"primes_up_to", c.audit.primes_up_to}};
    return j;
}

inline ordered_json condition_summary(const ConditionReport& r) {
    ordered_json j = io::to_json(r);
    j.erase("records");
    return j;
}

inline RangeOptions range_options(const RunConfig& c, const Resolved& r, unsigned threads) {
    RangeOptions opt;
    opt.delta = r.delta;
    opt.k = r.k;
    opt.n_max = c.n_max;
    opt.methods = r.methods;
    opt.mode = c.arithmetic;
    opt.tol = r.tol;
    opt.threads = threads;
    return opt;
}

// ---------------------------------------------------------------------------
// Commands

inline Outcome check_condition(const RunConfig& c, const Resolved& r, unsigned threads = 0) {
    const ConditionReport rep = check_range(r.family, range_options(c, r, threads));
    Outcome out;
    out.result = io::to_json(rep);
    out.csv = io::to_csv(rep);
    out.exit_code = exit_code_for(rep.overall);
    out.summary = "check-condition " + rep.family_id + ": " + std::string(to_string(rep.overall)) + " on [" +
                  std::to_string(rep.n_lo) + ", " + std::to_string(rep.n_hi) + "]";
    if (rep.first_negative) out.summary += ", first negative at n = " + std::to_string(*rep.first_negative);
    return out;
}

/// Deterministic coprime sample pairs (m, n) with m, n, mn <= limit.
inline std::vector<std::pair<std::uint64_t, std::uint64_t>> coprime_sample(std::uint64_t limit, std::size_t count) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
    if (limit < 6) return pairs;
    std::mt19937_64 rng(20240601);
    const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit)));
    std::uniform_int_distribution<std::uint64_t> pick(2, std::max<std::uint64_t>(root, 3));
    for (std::size_t tries = 0; pairs.size() < count && tries < 50 * count; ++tries) {
        const std::uint64_t m = pick(rng), n = pick(rng);
        if (std::gcd(m, n) == 1 && m * n <= limit) pairs.emplace_back(m, n);
    }
    return pairs;
}

inline Outcome classify(const RunConfig& c, const Resolved& r, unsigned threads = 0) {
    const WeightFamily& w = r.family;
    const std::uint64_t sample_limit = std::min<std::uint64_t>(c.n_max, 10'000);
    const auto primes = primes_up_to(c.audit.primes_up_to);
    const auto pairs = coprime_sample(sample_limit, 200);

    ordered_json res;
    res["family"] = family_summary(w);
    ordered_json structure;
    const AuditResult mult_audit = audit_structure(w, WeightKind::multiplicative, pairs);
    const AuditResult add_audit = audit_structure(w, WeightKind::additive, pairs);
    structure["multiplicative_on_sample"] = io::to_json(mult_audit);
    structure["additive_on_sample"] = io::to_json(add_audit);
    res["structure"] = structure;
    res["growth_bound_audit"] = io::to_json(audit_growth_bound(w, sample_limit));

    std::optional<GrowthReport> mg, ag;
    if (w.kind() == WeightKind::multiplicative) mg = check_multiplicative_growth(w, primes, c.audit.max_exp, r.delta);
    if (w.kind() == WeightKind::additive) ag = check_additive_growth(w, primes, c.audit.max_exp, r.delta);
    res["multiplicative_growth"] = mg ? io::to_json(*mg) : ordered_json();
    res["additive_growth"] = ag ? io::to_json(*ag) : ordered_json();

    const ConditionReport cond = check_range(w, range_options(c, r, threads));
    res["condition_sample"] = condition_summary(cond);
    const bool cond_ok = exit_code_for(cond.overall) == kOk;

    ordered_json applicable = ordered_json::array();
    ordered_json notes = ordered_json::array();
    const double abscissa = r.delta / 2.0;
    if (mg && mg->passed && mult_audit.passed)
        applicable.push_back({{"result", "multiplicative_growth_theorem"},
                              {"requires", "multiplicative weights with w_{p^{j-1}}/w_{p^j} <= p^{-delta}, j >= 1"},
                              {"start_index", 1},
                              {"multiplier_half_plane_abscissa", io::number(abscissa)}});
    if (ag && ag->passed && ag->delta_nonpositive.value_or(false) && add_audit.passed)
        applicable.push_back({{"result", "additive_growth_corollary"},
                              {"requires", "additive weights with the ratio test for j >= 2 and delta <= 0"},
                              {"start_index", 2},
                              {"multiplier_half_plane_abscissa", io::number(abscissa)}});
    if (ag && !ag->delta_nonpositive.value_or(false))
        notes.push_back("additive growth corollary needs delta <= 0; declared delta is positive");
    if (const WeightFamily* base = w.one_plus_base()) {
        bool ok = base->kind() == WeightKind::multiplicative && base->delta() <= 0.0 && base->sigma() <= 1.0;
        ordered_json base_growth;
        if (base->kind() == WeightKind::multiplicative) {
            // increasing prime-power sequences: the ratio test at delta = 0
            const GrowthReport g = check_multiplicative_growth(*base, primes, c.audit.max_exp, 0.0);
            base_growth = io::to_json(g);
            ok = ok && g.passed;
        }
        res["one_plus_base_growth"] = base_growth;
        if (ok)
            applicable.push_back({{"result", "one_plus_proposition"},
                                  {"requires", "multiplicative base, subpolynomial growth (declared), increasing along "
                                               "prime powers"},
                                  {"start_index", 1},
                                  {"multiplier_half_plane_abscissa", 0.0}});
    }
    if (cond_ok)
        applicable.push_back({{"result", "mobius_condition_theorem"},
                              {"requires", "the Mobius-convolution condition for every n >= k"},
                              {"evidence", "holds on the audited range only"},
                              {"start_index", r.k},
                              {"range", {cond.n_lo, cond.n_hi}},
                              {"multiplier_half_plane_abscissa", io::number(abscissa)}});
    if (const auto measure = config::measure_of(c.family)) {
        res["measure_zero_in_support"] = measure->zero_in_support();
        if (!measure->zero_in_support())
            notes.push_back("measure-induced weights: 0 is not in the measure's support (recorded, not used)");
    }
    if (w.kind() == WeightKind::measure_induced)
        notes.push_back("measure-induced weights: no general guarantee for the condition is known; the sample above is "
                        "an experiment, not a claim");
    res["applicable"] = applicable;
    res["notes"] = notes;

    Outcome out;
    out.result = std::move(res);
    out.exit_code = exit_code_for(cond.overall);
    out.summary = "classify " + w.id() + ": " + std::to_string(applicable.size()) + " applicable result(s), condition " +
                  std::string(to_string(cond.overall));
    return out;
}

inline KernelOptions kernel_options(const RunConfig& c, const Resolved& r, unsigned threads) {
    KernelOptions opt;
    opt.max_terms = c.max_terms;
    opt.min_terms = std::min<std::size_t>(opt.min_terms, c.max_terms);
    opt.delta = r.delta;
    opt.threads = threads;
    return opt;
}

inline Outcome gram(const RunConfig& c, const Resolved& r, unsigned threads = 0) {
    const std::vector<Complex> points =
        c.grid.points.empty() ? default_grid(r.family, c.kernel, r.delta, c.grid.count) : c.grid.points;
    const GramCheck g = gram_psd(r.family, c.kernel, points, r.tol, kernel_options(c, r, threads));
    const ConditionReport cond = check_range(r.family, range_options(c, r, threads));
    Outcome out;
    out.result = {{"gram", io::to_json(g)}, {"condition_sample", condition_summary(cond)}};
    out.exit_code = combine(exit_code_for(g.verdict), exit_code_for(cond.overall));
    out.summary = "gram " + r.family.id() + " (" + std::string(to_string(c.kernel)) +
                  "): " + std::string(to_string(g.verdict)) + ", min eigenvalue " + io::format_double(g.min_eigenvalue) +
                  ", condition " + std::string(to_string(cond.overall));
    return out;
}

inline Outcome eval_kernel(const RunConfig& c, const Resolved& r, unsigned threads = 0) {
    const Complex u = c.u.value_or(c.s);
    const EvaluatedValue v = evaluate_kernel(r.family, c.kernel, c.s, u, kernel_options(c, r, threads));
    Outcome out;
    out.result = io::to_json(v);
    out.result["kernel"] = to_string(c.kernel);
    out.result["abscissa"] = io::number(kernel_abscissa(c.kernel, r.family, r.delta));
    out.exit_code = v.certified() ? kOk : kInconclusive;
    out.summary = "eval-kernel " + r.family.id() + ": " + io::format_double(v.value.real()) + " + " +
                  io::format_double(v.value.imag()) + "i, tail bound " + io::format_double(v.tail_bound);
    return out;
}

/// Λ_α over [2, n_max]. Zero values at ω(n) > α are tracked as a diagnostic only.
inline Outcome von_mangoldt(const RunConfig& c, const Resolved& r) {
    if (!(c.alpha > 0.0)) throw ConfigError("von-mangoldt: alpha must be > 0");
    const double tol = c.tol.value_or(kVonMangoldtTol);
    ordered_json records = ordered_json::array();
    double min_value = std::numeric_limits<double>::infinity();
    std::uint64_t argmin = 0, zero_checked = 0, zero_violations = 0;
    SignVerdict worst = SignVerdict::nonneg_within_tol;
    for (std::uint64_t n = 2; n <= c.n_max; ++n) {
        const double v = von_mangoldt_alpha(n, c.alpha);
        if (v < min_value) min_value = v, argmin = n;
        const SignVerdict sv = float_verdict(v, tol, 0.0);
        if (sv == SignVerdict::negative_certified) worst = sv;
        else if (sv == SignVerdict::inconclusive && worst != SignVerdict::negative_certified) worst = sv;
        if (omega(n) > c.alpha) {
            ++zero_checked;
            if (std::fabs(v) > 1e-9 * std::max(1.0, std::pow(std::log(static_cast<double>(n)), c.alpha)))
                ++zero_violations;
        }
        records.push_back({n, io::number(v)});
    }
    Outcome out;
    out.result = {{"alpha", io::number(c.alpha)},
                  {"range", {2, c.n_max}},
                  {"tolerance", io::number(tol)},
                  {"min_value", io::number(min_value)},
                  {"argmin", argmin},
                  {"verdict", to_string(worst)},
                  {"diagnostic_zero_when_omega_exceeds_alpha", {{"checked", zero_checked}, {"nonzero", zero_violations}}},
                  {"values", std::move(records)}};
    (void)r;
    out.exit_code = exit_code_for(worst);
    out.summary = "von-mangoldt alpha=" + io::format_double(c.alpha) + ": min " + io::format_double(min_value) +
                  " at n = " + std::to_string(argmin);
    return out;
}

// ---------------------------------------------------------------------------
// Envelope and dispatch

inline std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Invocation {
    std::string command;
    RunConfig config;
    bool to_stdout = false;
    unsigned threads = 0;
};

struct Report {
    int exit_code = kOk;
    ordered_json json;
    std::string csv;
    std::string summary;
};

inline Report execute(const Invocation& inv) {
    const RunConfig& c = inv.config;
    const double default_tol = inv.command == "von-mangoldt" ? kVonMangoldtTol : kDefaultConditionTol;
    const Resolved r = resolve(c, default_tol);
    Outcome o;
    if (inv.command == "check-condition") o = check_condition(c, r, inv.threads);
    else if (inv.command == "classify") o = classify(c, r, inv.threads);
    else if (inv.command == "gram") o = gram(c, r, inv.threads);
    else if (inv.command == "eval-kernel") o = eval_kernel(c, r, inv.threads);
    else if (inv.command == "von-mangoldt") o = von_mangoldt(c, r);
    else throw ConfigError("unknown command '" + inv.command + "'");

    Report rep;
    rep.json["schema_version"] = io::kSchemaVersion;
    rep.json["command"] = inv.command;
    if (c.timestamp) rep.json["generated_at"] = utc_timestamp();
    rep.json["config"] = resolved_config(inv.command, c, r);
    rep.json["family"] = family_summary(r.family);
    rep.json["exit_code"] = o.exit_code;
    rep.json["result"] = std::move(o.result);
    rep.exit_code = o.exit_code;
    rep.csv = std::move(o.csv);
    rep.summary = std::move(o.summary);
    return rep;
}

inline std::string csv_path_for(const std::string& json_path) {
    const std::string ext = ".json";
    if (json_path.size() > ext.size() && json_path.compare(json_path.size() - ext.size(), ext.size(), ext) == 0)
        return json_path.substr(0, json_path.size() - ext.size()) + ".csv";
    return json_path + ".csv";
}

/// Runs a command end to end: execution, report files, stdout/stderr.
inline int run(const Invocation& inv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    Report rep;
    try {
        rep = execute(inv);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ExactModeUnavailable& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const UndefinedWeightError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ResourceLimitError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::overflow_error& e) {
        err << "error: exact arithmetic overflow (" << e.what() << "); rerun with --float\n";
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
    const std::string text = rep.json.dump(2) + "\n";
    const std::string& path = inv.config.out;
    if (!path.empty()) {
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            err << "error: cannot write '" << path << "'\n";
            return kConfigError;
        }
        f << text;
        if (!rep.csv.empty()) {
            std::ofstream g(csv_path_for(path), std::ios::binary);
            if (!g) {
                err << "error: cannot write '" << csv_path_for(path) << "'\n";
                return kConfigError;
            }
            g << rep.csv;
        }
    }
    if (inv.to_stdout || path.empty()) out << text;
    err << rep.summary << " (exit " << rep.exit_code << ")\n";
    return rep.exit_code;
}

}  // namespace wds::cli
