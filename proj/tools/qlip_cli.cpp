// Command-line front end for the scenario runner.
//
//   qlip classical --config cfg.json [--out dir] [--seed u64] [--tol real]
//   qlip quantum   --config cfg.json ...
//   qlip topology  --config cfg.json ...
//   qlip reproduce <name> [--out dir] [--seed u64] [--tol real]
//   qlip emit-plots <report.json> [--out dir]
//
// Exit status: 0 when every check passes, 1 when a check fails, 2 on errors.

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "qlip/error.hpp"
#include "qlip/harness.hpp"

namespace {

using namespace qlip;

struct CommonFlags {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_config) {
    auto* c = cmd->add_option("--config", f.config, "Scenario config (JSON)");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
    cmd->add_option("--seed", f.seed, "Override the scenario seed");
    cmd->add_option("--tol", f.tol, "Override the splitting solver tolerance")->check(CLI::PositiveNumber);
}

int run_kind(harness::ScenarioKind kind, const CommonFlags& f) {
    auto s = harness::load_scenario(f.config);
    if (s.kind != kind)
        throw ConfigError("config field 'kind': scenario is '" + std::string(harness::to_string(s.kind)) +
                          "' but the subcommand is '" + std::string(harness::to_string(kind)) + "'");
    if (f.seed) s.seed = *f.seed;
    if (f.tol) s.solver.tol = *f.tol;
    const auto r = harness::evaluate_scenario(s);
    harness::write_result(r, f.out);
    harness::print_checks(std::cout, r);
    std::cout << "wrote " << (std::filesystem::path(f.out) / r.id).string() << '\n';
    return r.ok() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bounded-Lipschitz distances and topology probes on finite truncations"};
    app.require_subcommand(1);

    CommonFlags classical, quantum, topology, repro;
    add_common(app.add_subcommand("classical", "Run a classical scenario"), classical, true);
    add_common(app.add_subcommand("quantum", "Run a matrix-algebra scenario"), quantum, true);
    add_common(app.add_subcommand("topology", "Run a topology probe scenario"), topology, true);

    auto* rep = app.add_subcommand("reproduce", "Run a canned reproduction and check its bounds");
    std::string name;
    rep->add_option("name", name, "Reproduction name")->required()->check(CLI::IsMember(harness::reproduce_names()));
    add_common(rep, repro, false);

    auto* plots = app.add_subcommand("emit-plots", "Write one CSV per table of a JSON report");
    std::string report;
    std::string plot_out;
    plots->add_option("report", report, "Report JSON")->required()->check(CLI::ExistingFile);
    plots->add_option("--out", plot_out, "Output directory (default: <report dir>/plots)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("classical")) return run_kind(harness::ScenarioKind::Classical, classical);
        if (app.got_subcommand("quantum")) return run_kind(harness::ScenarioKind::Quantum, quantum);
        if (app.got_subcommand("topology")) return run_kind(harness::ScenarioKind::Topology, topology);
        if (app.got_subcommand("reproduce")) {
            harness::ReproduceOptions opts;
            if (repro.seed) opts.seed = *repro.seed;
            if (repro.tol) opts.solver.tol = *repro.tol;
            const auto r = harness::reproduce(name, opts);
            harness::print_checks(std::cout, r);
            if (rep->count("--out")) harness::write_result(r, repro.out);
            std::cout << (r.ok() ? "pass" : "FAIL") << "  " << r.id << "  (" << r.seconds << " s)\n";
            return r.ok() ? 0 : 1;
        }
        if (app.got_subcommand("emit-plots")) {
            const std::filesystem::path out =
                plot_out.empty() ? std::filesystem::path(report).parent_path() / "plots" : std::filesystem::path(plot_out);
            for (const auto& p : harness::emit_plot_data(report, out)) std::cout << "wrote " << p.string() << '\n';
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << e.kind() << ": " << e.what() << '\n';
        return 2;
    }
    return 2;
}
