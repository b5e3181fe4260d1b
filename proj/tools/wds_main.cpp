// wds: command-line front end for weighted Dirichlet-series weight audits.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "wds/cli.hpp"
#include "wds/config.hpp"

namespace {

using nlohmann::ordered_json;

struct Flags {
    std::string config_path;
    std::string family;
    std::optional<double> delta;
    std::optional<unsigned> k;
    std::optional<std::uint64_t> n_max;
    std::string methods;
    std::optional<double> tol;
    bool exact = false;
    bool floating = false;
    std::string out;
    bool no_timestamp = false;
    bool to_stdout = false;
    std::string kernel;
    std::string points;
    std::optional<std::size_t> grid_count;
    std::string s;
    std::string u;
    std::optional<double> alpha;
    std::optional<std::size_t> max_terms;
    unsigned threads = 0;
};

// "re" or "re:im"
ordered_json complex_flag(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) return ordered_json::array({std::stod(text), 0.0});
    return ordered_json::array({std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))});
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) parts.push_back(item);
    return parts;
}

ordered_json merged_config(const Flags& f) {
    ordered_json j = f.config_path.empty() ? ordered_json::object() : wds::config::load_json_file(f.config_path);
    if (!j.is_object()) throw wds::config::ConfigError("config: top level must be an object");
    if (!f.family.empty()) j["family"] = wds::config::family_from_flag(f.family);
    if (f.delta) j["delta"] = *f.delta;
    if (f.k) j["k"] = *f.k;
    if (f.n_max) j["n_max"] = *f.n_max;
    if (!f.methods.empty()) j["methods"] = split(f.methods, ',');
    if (f.tol) j["tol"] = *f.tol;
    if (f.exact) j["arithmetic"] = "exact";
    if (f.floating) j["arithmetic"] = "float";
    if (!f.out.empty()) j["out"] = f.out;
    if (f.no_timestamp) j["timestamp"] = false;
    if (!f.kernel.empty()) j["kernel"] = f.kernel;
    if (!f.points.empty() || f.grid_count) {
        ordered_json grid = j.value("grid", ordered_json::object());
        if (!f.points.empty()) {
            ordered_json pts = ordered_json::array();
            for (const auto& p : split(f.points, ',')) pts.push_back(complex_flag(p));
            grid["points"] = pts;
        }
        if (f.grid_count) grid["count"] = *f.grid_count;
        j["grid"] = grid;
    }
    if (!f.s.empty()) j["s"] = complex_flag(f.s);
    if (!f.u.empty()) j["u"] = complex_flag(f.u);
    if (f.alpha) j["alpha"] = *f.alpha;
    if (f.max_terms) j["max_terms"] = *f.max_terms;
    return j;
}

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_path, "JSON run configuration");
    cmd->add_option("--family", f.family, "family name[:key=value,...] or inline JSON");
    cmd->add_option("--delta", f.delta, "delta override (default: the family's declared delta)");
    cmd->add_option("--k", f.k, "start index (default: the family's start index)");
    cmd->add_option("--n-max", f.n_max, "upper end of the audited range");
    cmd->add_option("--methods", f.methods, "comma list of divisor_sum, mult_product, additive_Tt");
    cmd->add_option("--tol", f.tol, "sign tolerance");
    auto* ex = cmd->add_flag("--exact", f.exact, "require exact arithmetic");
    auto* fl = cmd->add_flag("--float", f.floating, "force double precision");
    ex->excludes(fl);
    cmd->add_option("--out", f.out, "report path (.json; check-condition also writes .csv)");
    cmd->add_flag("--no-timestamp", f.no_timestamp, "omit generated_at for byte-identical reports");
    cmd->add_flag("--stdout", f.to_stdout, "also print the JSON report on stdout");
    cmd->add_option("--threads", f.threads, "worker threads (0 = hardware concurrency)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted Dirichlet-series weight audits"};
    app.require_subcommand(1);
    Flags f;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"check-condition", "evaluate the Mobius-convolution condition over a range"},
        {"classify", "report which structural hypotheses the family satisfies"},
        {"gram", "Gram-matrix PSD check at half-plane points"},
        {"eval-kernel", "evaluate a kernel at (s, u) with a tail bound"},
        {"von-mangoldt", "generalized von Mangoldt values over [2, n_max]"},
    };
    for (const auto& [name, help] : commands) {
        auto* cmd = app.add_subcommand(name, help);
        add_common(cmd, f);
        if (name == "gram" || name == "eval-kernel") {
            cmd->add_option("--kernel", f.kernel, "kappa, eta_ratio or eta_series");
            cmd->add_option("--max-terms", f.max_terms, "truncation cap");
        }
        if (name == "gram") {
            cmd->add_option("--points", f.points, "comma list of re or re:im");
            cmd->add_option("--grid-count", f.grid_count, "size of the default grid");
        }
        if (name == "eval-kernel") {
            cmd->add_option("--s", f.s, "first point, re or re:im");
            cmd->add_option("--u", f.u, "second point (default: s)");
        }
        if (name == "von-mangoldt") cmd->add_option("--alpha", f.alpha, "exponent alpha > 0");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : wds::cli::kConfigError;
    }

    wds::cli::Invocation inv;
    inv.command = app.get_subcommands().front()->get_name();
    inv.to_stdout = f.to_stdout;
    inv.threads = f.threads;
    try {
        inv.config = wds::config::parse_run_config(merged_config(f));
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return wds::cli::kConfigError;
    }
    return wds::cli::run(inv);
}
