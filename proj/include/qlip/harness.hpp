#pragma once

// Scenario runner: JSON configs in, CSV tables and a JSON report out.
//
// A scenario has an id, a kind (classical, quantum or topology), a seed for
// any random state family, solver settings and kind-specific parameters.
// Evaluating a scenario produces named tables and a list of invariant checks;
// running it also writes them under <out>/<id>/.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qlip/solver_config.hpp"

namespace qlip::harness {

enum class ScenarioKind { Classical, Quantum, Topology };

std::string_view to_string(ScenarioKind k) noexcept;

struct Scenario {
    std::string id;
    ScenarioKind kind = ScenarioKind::Classical;
    std::uint64_t seed = 0;
    SolverConfig solver;
    nlohmann::json params = nlohmann::json::object();
};

/// Throws ConfigError whose message names the offending field.
Scenario parse_scenario(const nlohmann::json& doc);
/// Reads and parses a JSON file. IoError if unreadable, ConfigError if malformed.
Scenario load_scenario(const std::filesystem::path& path);

/// Cells are JSON scalars: strings, integers or doubles.
struct Table {
    std::vector<std::string> columns;
    std::vector<nlohmann::json> rows; // each an array matching columns

    void add(nlohmann::json row);
    nlohmann::json to_json() const;
    static Table from_json(const nlohmann::json& j);
};

/// Header line plus one line per row. Doubles use %.17g so that output is a
/// pure function of the values.
std::string to_csv(const Table& t);

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ScenarioResult {
    std::string id;
    std::string primary; // name of the table written as results.csv
    std::map<std::string, Table> tables;
    std::vector<Check> checks;
    nlohmann::json details = nlohmann::json::object();
    double seconds = 0.0;

    bool ok() const;
    void check(std::string name, bool pass, std::string detail = {});
    nlohmann::json to_json() const;
};

ScenarioResult evaluate_scenario(const Scenario& s);

/// Evaluates the scenario and writes <out>/<id>/results.csv and
/// <out>/<id>/report.json. Returns 0 when every check passes and 1 otherwise.
int run_scenario(const Scenario& s, const std::filesystem::path& out_dir);

/// Writes report.json and results.csv for an evaluated result.
void write_result(const ScenarioResult& r, const std::filesystem::path& out_dir);

// ---------------------------------------------------------------------------

struct ReproduceOptions {
    std::uint64_t seed = 20240601;
    SolverConfig solver;
};

const std::vector<std::string>& reproduce_names();

/// Runs a canned scenario and asserts its bounds. Throws UnknownScenario.
ScenarioResult reproduce(std::string_view name, const ReproduceOptions& opts = {});

/// Pass/fail table, one line per check.
void print_checks(std::ostream& os, const ScenarioResult& r);

// ---------------------------------------------------------------------------

/// Reads a JSON report with a "tables" object and writes <out>/<name>.csv for
/// each table. Returns the written paths in table-name order. Throws IoError.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& report,
                                                  const std::filesystem::path& out_dir);

} // namespace qlip::harness
