#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "wds/cli.hpp"

using namespace wds;
using nlohmann::ordered_json;

namespace {

struct Run {
    int code;
    ordered_json report;
    std::string err;
};

Run run_json(const std::string& command, ordered_json cfg) {
    cli::Invocation inv;
    inv.command = command;
    cfg["timestamp"] = false;
    std::ostringstream out, err;
    try {
        inv.config = config::parse_run_config(cfg);
    } catch (const config::ConfigError& e) {
        return {cli::kConfigError, nullptr, e.what()};
    }
    const int code = cli::run(inv, out, err);
    ordered_json rep = out.str().empty() ? ordered_json() : ordered_json::parse(out.str());
    return {code, rep, err.str()};
}

ordered_json named(const std::string& name, ordered_json params = ordered_json::object()) {
    ordered_json j = {{"kind", "named"}, {"name", name}};
    if (!params.empty()) j["parameters"] = params;
    return j;
}

ordered_json half_family() {
    return ordered_json::parse(R"({"kind": "multiplicative", "parameters": {"exponent_values": ["1/2"]},
                                   "sigma": 1, "delta": 0, "growth_bound": {"C": 1, "tau": 0}})");
}

}  // namespace

TEST(Config, UnknownKeysRejected) {
    EXPECT_THROW(config::parse_run_config({{"family", named("omega")}, {"n_maxx", 5}}), config::ConfigError);
    EXPECT_THROW(config::build_family({{"kind", "named"}, {"name", "omega"}, {"colour", 1}}), config::ConfigError);
    EXPECT_THROW(config::build_family(named("divisor_pow", {{"alpha", 1}, {"beta", 2}})), config::ConfigError);
    EXPECT_THROW(config::build_family(named("nope")), config::ConfigError);
    EXPECT_THROW(config::build_family(named("divisor_pow")), config::ConfigError);
    EXPECT_THROW(config::parse_run_config({{"family", named("omega")}, {"grid", {{"cnt", 3}}}}), config::ConfigError);
}

TEST(Config, SchemaChecks) {
    EXPECT_THROW(config::parse_run_config({{"family", named("omega")}, {"schema_version", 2}}), config::ConfigError);
    EXPECT_THROW(config::parse_run_config(ordered_json::object()), config::ConfigError);
    EXPECT_THROW(config::parse_run_config({{"family", named("omega")}, {"n_max", 0}}), config::ConfigError);
    EXPECT_THROW(config::parse_run_config({{"family", named("omega")}, {"methods", {"bogus"}}}), config::ConfigError);
    EXPECT_THROW(config::parse_run_config({{"family", named("omega")}, {"arithmetic", "fast"}}), config::ConfigError);
    // custom kinds must declare their abscissas
    EXPECT_THROW(config::build_family(ordered_json::parse(
                     R"({"kind": "multiplicative", "parameters": {"exponent_values": [2]}})")),
                 config::ConfigError);
    EXPECT_THROW(config::build_family(ordered_json::parse(
                     R"({"kind": "explicit", "parameters": {"values": [1, 0]}, "sigma": 1, "delta": 0})")),
                 config::ConfigError);
}

TEST(Config, FamilyKinds) {
    const auto half = config::build_family(half_family());
    EXPECT_EQ(half.kind(), WeightKind::multiplicative);
    EXPECT_EQ(*half.value(8).exact, Rational(1, 2));
    EXPECT_EQ(*half.value(6).exact, Rational(1, 4));

    const auto per_prime = config::build_family(ordered_json::parse(
        R"({"kind": "multiplicative", "parameters": {"exponent_values": [2, 3], "tail": "undefined",
             "per_prime": {"3": ["5/2"]}}, "sigma": 1, "delta": 0})"));
    EXPECT_EQ(*per_prime.value(4).exact, Rational(3));
    EXPECT_EQ(*per_prime.value(12).exact, Rational(15, 2));
    EXPECT_THROW(per_prime.value(8), UndefinedWeightError);
    EXPECT_TRUE(std::isinf(per_prime.growth().C));

    const auto add = config::build_family(ordered_json::parse(
        R"({"kind": "additive", "parameters": {"exponent_values": [1, 2, 3]}, "sigma": 1, "delta": 0})"));
    EXPECT_EQ(add.start_index(), 2u);
    EXPECT_EQ(add(12), 3.0);

    const auto ex = config::build_family(ordered_json::parse(
        R"({"kind": "explicit", "parameters": {"values": [1, "3/2", 0.25]}, "start_index": 2, "sigma": 1,
            "delta": 0})"));
    EXPECT_EQ(*ex.value(3).exact, Rational(3, 2));
    EXPECT_EQ(*ex.value(4).exact, Rational(1, 4));

    const auto gamma = config::build_family(ordered_json::parse(
        R"({"kind": "measure_induced", "parameters": {"measure": {"type": "gamma_density", "alpha": 2}}})"));
    EXPECT_NEAR(gamma(10), std::pow(std::log(10.0), 2), 1e-9);

    const auto op = config::build_family(named("one_plus", {{"base", named("divisor_pow", {{"alpha", 1}})}}));
    EXPECT_EQ(op(12), 7.0);

    const auto over = config::build_family({{"kind", "named"}, {"name", "omega"}, {"delta", -0.5}});
    EXPECT_EQ(over.delta(), -0.5);
}

TEST(Config, FamilyFlagShorthand) {
    EXPECT_EQ(config::family_from_flag("omega"), named("omega"));
    const auto j = config::family_from_flag("divisor_pow:alpha=2");
    EXPECT_EQ(config::build_family(j)(12), 36.0);
    const auto op = config::family_from_flag("one_plus:base=d_beta");
    EXPECT_EQ(op["parameters"]["base"]["name"], "d_beta");
    EXPECT_EQ(config::family_from_flag(R"({"kind":"named","name":"ones"})"), named("ones"));
}

TEST(CheckConditionCommand, OmegaExitsZeroWithZeroOneValues) {
    const auto r = run_json("check-condition", {{"family", named("omega")}});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const auto& rec : r.report["result"]["records"]) {
        const std::string v = rec["exact"];
        ASSERT_TRUE(v == "0" || v == "1");
        ASSERT_EQ(v == "1", oracle::is_prime(rec["n"].get<std::uint64_t>()));
    }
    EXPECT_EQ(r.report["result"]["overall_verdict"], "nonneg_exact");
}

TEST(CheckConditionCommand, DivisorPowAllOnes) {
    const auto r = run_json("check-condition", {{"family", named("divisor_pow", {{"alpha", 1}})}});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.report["config"]["k"], 1);
    EXPECT_EQ(r.report["result"]["records"].size(), 2 * 9999u);
    for (const auto& rec : r.report["result"]["records"]) ASSERT_EQ(rec["exact"], "1");
}

TEST(CheckConditionCommand, NegativeControlExitsTwo) {
    const auto r = run_json("check-condition", {{"family", half_family()}, {"n_max", 100}});
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(r.report["result"]["overall_verdict"], "negative_certified");
    EXPECT_EQ(r.report["result"]["first_negative"], 2);
}

TEST(CheckConditionCommand, ConfigErrorsExitOne) {
    EXPECT_EQ(run_json("check-condition", {{"family", named("omega")}, {"bogus", 1}}).code, 1);
    // exact mode requested for irrational weights
    EXPECT_EQ(run_json("check-condition", {{"family", named("log_pow", {{"alpha", 1}})}, {"arithmetic", "exact"}}).code,
              1);
    // inapplicable method
    EXPECT_EQ(run_json("check-condition", {{"family", named("omega")}, {"methods", {"mult_product"}}}).code, 1);
}

TEST(CheckConditionCommand, FloatModeAndCsv) {
    cli::Invocation inv;
    inv.command = "check-condition";
    inv.config = config::parse_run_config({{"family", named("omega")}, {"n_max", 12}, {"arithmetic", "float"}});
    const auto rep = cli::execute(inv);
    EXPECT_EQ(rep.exit_code, 0);
    EXPECT_EQ(rep.json["result"]["arithmetic"], "float");
    std::istringstream csv(rep.csv);
    std::string header, first;
    std::getline(csv, header);
    std::getline(csv, first);
    EXPECT_EQ(header, "n,value,method,verdict,margin");
    EXPECT_EQ(first, "2,1,divisor_sum,nonneg_within_tol,1");
}

TEST(Reports, DeterministicAndRoundTrip) {
    const std::vector<std::pair<std::string, ordered_json>> cases = {
        {"check-condition", {{"family", named("big_omega")}, {"n_max", 500}}},
        {"classify", {{"family", named("divisor_pow", {{"alpha", 2}})}, {"n_max", 500}}},
        {"gram", {{"family", named("divisor_pow", {{"alpha", 1}})}, {"n_max", 200}, {"kernel", "eta_ratio"}}},
        {"eval-kernel", {{"family", named("omega")}, {"s", {1.5, 0.5}}, {"u", 1.25}}},
        {"von-mangoldt", {{"family", named("log_pow", {{"alpha", 2}})}, {"n_max", 300}, {"alpha", 2}}},
    };
    for (const auto& [cmd, cfg] : cases) {
        const auto a = run_json(cmd, cfg), b = run_json(cmd, cfg);
        ASSERT_NE(a.code, 1) << cmd << " " << a.err;
        EXPECT_EQ(a.report.dump(), b.report.dump()) << cmd;
        EXPECT_FALSE(a.report.contains("generated_at"));
        const auto again = run_json(cmd, a.report["config"]);
        EXPECT_EQ(again.report.dump(), a.report.dump()) << cmd;
        EXPECT_EQ(a.report["schema_version"], 1);
    }
}

TEST(Reports, ThreadCountDoesNotChangeOutput) {
    cli::Invocation inv;
    inv.command = "check-condition";
    inv.config = config::parse_run_config(
        {{"family", named("d_beta", {{"beta", 2.5}})}, {"n_max", 3000}, {"timestamp", false}});
    inv.threads = 1;
    const auto a = cli::execute(inv).json.dump();
    inv.threads = 7;
    EXPECT_EQ(cli::execute(inv).json.dump(), a);
}

TEST(Reports, TimestampPresentByDefault) {
    cli::Invocation inv;
    inv.command = "eval-kernel";
    inv.config = config::parse_run_config({{"family", named("ones")}, {"s", 2}});
    EXPECT_TRUE(cli::execute(inv).json.contains("generated_at"));
}

TEST(ClassifyCommand, Omega) {
    const auto r = run_json("classify", {{"family", named("omega")}});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto& res = r.report["result"];
    EXPECT_TRUE(res["structure"]["additive_on_sample"]["passed"].get<bool>());
    EXPECT_TRUE(res["additive_growth"]["passed"].get<bool>());
    EXPECT_TRUE(res["additive_growth"]["delta_nonpositive"].get<bool>());
    std::vector<std::string> names;
    for (const auto& a : res["applicable"]) names.push_back(a["result"]);
    EXPECT_NE(std::find(names.begin(), names.end(), "additive_growth_corollary"), names.end());
}

TEST(ClassifyCommand, DivisorPowTwo) {
    const auto r = run_json("classify", {{"family", named("divisor_pow", {{"alpha", 2}})}});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto& res = r.report["result"];
    EXPECT_TRUE(res["multiplicative_growth"]["passed"].get<bool>());
    EXPECT_EQ(res["applicable"][0]["result"], "multiplicative_growth_theorem");
}

TEST(ClassifyCommand, OnesAndOnePlusAndMeasure) {
    const auto ones = run_json("classify", {{"family", named("ones")}, {"n_max", 2000}});
    ASSERT_EQ(ones.code, 0);
    EXPECT_EQ(ones.report["result"]["condition_sample"]["verdict_counts"]["nonneg_exact"], 2 * 1999);
    EXPECT_EQ(ones.report["result"]["applicable"][0]["result"], "multiplicative_growth_theorem");
    EXPECT_EQ(ones.report["result"]["applicable"][0]["start_index"], 1);

    const auto op = run_json("classify", {{"family", named("one_plus", {{"base", named("divisor_pow", {{"alpha", 1}})}})},
                                          {"n_max", 2000}});
    ASSERT_EQ(op.code, 0);
    std::vector<std::string> names;
    for (const auto& a : op.report["result"]["applicable"]) names.push_back(a["result"]);
    EXPECT_NE(std::find(names.begin(), names.end(), "one_plus_proposition"), names.end());

    const auto m = run_json("classify", {{"family", ordered_json::parse(R"({"kind": "measure_induced",
        "parameters": {"measure": {"type": "gamma_density", "alpha": 1}}})")}, {"n_max", 500}});
    ASSERT_NE(m.code, 1) << m.err;
    EXPECT_FALSE(m.report["result"]["notes"].empty());
    EXPECT_TRUE(m.report["result"]["measure_zero_in_support"].get<bool>());

    const auto off = run_json("classify", {{"family", ordered_json::parse(R"({"kind": "measure_induced",
        "parameters": {"measure": {"type": "discrete", "atoms": [{"sigma": 1, "mass": 1}]}}})")}, {"n_max", 200}});
    ASSERT_NE(off.code, 1) << off.err;
    EXPECT_FALSE(off.report["result"]["measure_zero_in_support"].get<bool>());
}

TEST(ClassifyCommand, NegativeControl) {
    const auto r = run_json("classify", {{"family", half_family()}, {"n_max", 100}});
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(r.report["result"]["multiplicative_growth"]["passed"].get<bool>());
    EXPECT_EQ(r.report["result"]["multiplicative_growth"]["first_violation"]["j"], 1);
}

TEST(GramCommand, DivisorDefaultGridPsd) {
    const auto r = run_json("gram", {{"family", named("divisor_pow", {{"alpha", 1}})}, {"n_max", 1000}});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto& g = r.report["result"]["gram"];
    EXPECT_EQ(g["verdict"], "psd_within_tol");
    EXPECT_EQ(g["points"].size(), 8u);
    EXPECT_EQ(g["matrix"].size(), 8u);
    EXPECT_EQ(g["matrix"][0][0].size(), 2u);
    EXPECT_TRUE(g["error_budget"].contains("n_points_times_bound"));
}

TEST(GramCommand, OnesEtaRatio) {
    const auto r = run_json("gram", {{"family", named("ones")}, {"kernel", "eta_ratio"}, {"n_max", 500}});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_GE(io::to_number(r.report["result"]["gram"]["min_eigenvalue"]), -1e-12);
}

TEST(GramCommand, NegativeControlReportsNegativeCondition) {
    const auto r = run_json("gram", {{"family", half_family()}, {"kernel", "eta_series"}, {"n_max", 100}});
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(r.report["result"]["condition_sample"]["overall_verdict"], "negative_certified");
}

TEST(GramCommand, ExplicitPoints) {
    const auto r = run_json("gram", {{"family", named("omega")},
                                     {"grid", {{"points", {1.6, {1.8, 0.5}, {1.8, -0.5}}}}},
                                     {"n_max", 100}});
    ASSERT_NE(r.code, 1) << r.err;
    EXPECT_EQ(r.report["result"]["gram"]["points"].size(), 3u);
    EXPECT_EQ(r.report["config"]["grid"]["points"].size(), 3u);
}

TEST(EvalKernelCommand, ValuesAndErrors) {
    const auto r = run_json("eval-kernel", {{"family", named("ones")}, {"s", 1}});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(r.report["result"]["value"][0].get<double>(), oracle::kZeta2 - 1.0, 1e-6);
    EXPECT_EQ(run_json("eval-kernel", {{"family", named("ones")}, {"s", 0.4}}).code, 1);
    const auto none = run_json("eval-kernel", {{"family", ordered_json::parse(
        R"({"kind": "multiplicative", "parameters": {"exponent_values": [2]}, "sigma": 1, "delta": 0})")}, {"s", 2}});
    EXPECT_EQ(none.code, 3);
    EXPECT_EQ(none.report["result"]["tail_bound"], "inf");
}

TEST(VonMangoldtCommand, NonnegativeAndDiagnostic) {
    for (double alpha : {1.0, 2.0, 3.0}) {
        const auto r = run_json("von-mangoldt", {{"family", named("log_pow", {{"alpha", alpha}})},
                                                 {"alpha", alpha}, {"n_max", 2000}});
        ASSERT_EQ(r.code, 0) << r.err;
        EXPECT_GE(io::to_number(r.report["result"]["min_value"]), -1e-12);
        EXPECT_EQ(r.report["result"]["diagnostic_zero_when_omega_exceeds_alpha"]["nonzero"], 0);
    }
}
