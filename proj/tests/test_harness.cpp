#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "qlip/error.hpp"
#include "qlip/harness.hpp"

using namespace qlip;
using namespace qlip::harness;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("qlip-test-" + tag + "-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string l; std::getline(ss, l);) out.push_back(l);
    return out;
}

json classical_doc() {
    return json::parse(R"({
        "id": "c1", "kind": "classical", "seed": 9,
        "params": {
            "space": {"rho": [[0, 1, 2], [1, 0, 1.5], [2, 1.5, 0]]},
            "random_states": 3,
            "alphas": [0.5, 1.0], "betas": [1.0, 3.0]
        }
    })");
}

std::string config_error_message(const json& doc) {
    try {
        parse_scenario(doc);
        evaluate_scenario(parse_scenario(doc));
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("config errors name the offending field") {
    json doc = classical_doc();
    doc["params"]["space"].erase("rho");
    CHECK(config_error_message(doc).find("rho") != std::string::npos);

    doc = classical_doc();
    doc.erase("id");
    CHECK(config_error_message(doc).find("'id'") != std::string::npos);

    doc = classical_doc();
    doc["kind"] = "astral";
    CHECK(config_error_message(doc).find("'kind'") != std::string::npos);

    doc = classical_doc();
    doc["solver"] = {{"tol", -1.0}};
    CHECK(config_error_message(doc).find("solver") != std::string::npos);

    doc = classical_doc();
    doc["params"]["space"]["rho"][0][1] = 5.0; // asymmetric
    CHECK(config_error_message(doc).find("rho") != std::string::npos);

    doc = classical_doc();
    doc["params"]["alphas"] = {1.0, "two"};
    CHECK(config_error_message(doc).find("params.alphas[1]") != std::string::npos);

    doc = classical_doc();
    doc["id"] = "../escape";
    CHECK(config_error_message(doc).find("'id'") != std::string::npos);

    json q = json::parse(R"({"id": "q", "kind": "quantum", "params": {"seminorm": {"type": "commutator"}}})");
    CHECK(config_error_message(q).find("params.seminorm.D") != std::string::npos);

    json t = json::parse(R"({"id": "t", "kind": "topology", "params": {"truncation_dim": 6,
                             "unit_spec": {"kind": "SpectralUnit", "thresholds": [0.5, 0.7]}}})");
    CHECK(config_error_message(t).find("unit_spec") != std::string::npos);
    t["params"]["unit_spec"] = {{"kind", "SpectralUnit"}, {"h", {2.0, 1.0, 0.5, 0.4, 0.3, 0.2}}};
    CHECK(config_error_message(t).find("unit_spec.h") != std::string::npos);
}

TEST_CASE("load_scenario reads commented JSON and reports IO errors") {
    TempDir dir("load");
    const auto p = dir.path / "cfg.json";
    std::ofstream(p) << "// comment\n" << classical_doc().dump() << "\n";
    const auto s = load_scenario(p);
    CHECK(s.id == "c1");
    CHECK(s.kind == ScenarioKind::Classical);
    CHECK(s.seed == 9);
    CHECK_THROWS_AS(load_scenario(dir.path / "missing.json"), IoError);
    std::ofstream(dir.path / "bad.json") << "{ not json";
    CHECK_THROWS_AS(load_scenario(dir.path / "bad.json"), ConfigError);
}

TEST_CASE("example real-line scenario table") {
    TempDir dir("realline");
    const auto s = parse_scenario(json::parse(R"({"id": "example-real-line-1", "kind": "classical",
        "params": {"family": "real-line-1", "n_min": 2, "n_max": 16}})"));
    CHECK(run_scenario(s, dir.path) == 0);
    const auto rows = lines(slurp(dir.path / "example-real-line-1" / "results.csv"));
    REQUIRE(rows.size() == 16);
    CHECK(rows[0] == "n,kantorovich,bl_distance");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        double nn = 0, k = 0, bl = 0;
        REQUIRE(std::sscanf(rows[i].c_str(), "%lf,%lf,%lf", &nn, &k, &bl) == 3);
        CHECK(nn == n);
        CHECK(std::abs(k - 1.0) <= 1e-9);
        CHECK(std::abs(bl - 2.0 / n) <= 1e-9);
    }
    const auto report = json::parse(slurp(dir.path / "example-real-line-1" / "report.json"));
    CHECK(report["ok"] == true);
}

TEST_CASE("classical scenario columns and invariants") {
    const auto r = evaluate_scenario(parse_scenario(classical_doc()));
    CHECK(r.ok());
    const auto& t = r.tables.at(r.primary);
    CHECK(t.columns == std::vector<std::string>{"scenario_id", "alpha", "beta", "value", "witness_norm",
                                                "lip_of_witness"});
    CHECK(t.rows.size() == 3 * 2 * 2);
    for (const auto& row : t.rows) {
        CHECK(row[0] == "c1");
        CHECK(row[3].get<double>() <= 2.0 * row[1].get<double>() + 1e-9);
        CHECK(row[4].get<double>() <= row[1].get<double>() + 1e-9);
        CHECK(row[5].get<double>() <= row[2].get<double>() + 1e-9);
    }
}

TEST_CASE("quantum scenario") {
    const auto doc = json::parse(R"({"id": "q", "kind": "quantum", "seed": 4,
        "params": {"seminorm": {"type": "commutator", "D": [[1, 0.5], [0.5, -1]]},
                   "states": [[[1, 0], [0, 0]], [[0, 0], [0, 1]], [[0.5, 0.5], [0.5, 0.5]]],
                   "alpha": 1, "beta": 1}})");
    const auto r = evaluate_scenario(parse_scenario(doc));
    CHECK(r.ok());
    const auto& t = r.tables.at(r.primary);
    CHECK(t.columns ==
          std::vector<std::string>{"scenario_id", "value", "iters", "primal_res", "dual_res", "feasibility_slack"});
    CHECK(t.rows.size() == 3);

    json bad = doc;
    bad["params"]["states"][0] = json::parse("[[0.5, 0], [0, 0.6]]");
    CHECK(config_error_message(bad).find("params.states[0]") != std::string::npos);
}

TEST_CASE("shift scenario reports the closed forms") {
    const auto doc = json::parse(R"({"id": "shift-counterexample", "kind": "topology", "seed": 1,
        "params": {"truncation_dim": 8}})");
    const auto r = evaluate_scenario(parse_scenario(doc));
    CHECK(r.ok());
    const auto& shift = r.tables.at("shift");
    CHECK(shift.columns == std::vector<std::string>{"n", "wu_metric", "strict_left"});
    REQUIRE(shift.rows.size() == 8);
    for (std::size_t n = 0; n < 8; ++n) {
        CHECK(shift.rows[n][1].get<double>() == doctest::Approx(1.0 / static_cast<double>(n + 1)).epsilon(1e-14));
        CHECK(shift.rows[n][2].get<double>() == doctest::Approx(1.0).epsilon(1e-14));
    }
    int squares = 0;
    for (const auto& row : r.tables.at("probes").rows)
        if (row[0] == "wu_square") {
            CHECK(std::abs(row[2].get<double>() - 1.0) <= 1e-12);
            ++squares;
        }
    CHECK(squares == 8);
    CHECK(r.tables.at("ps_units").columns == std::vector<std::string>{"n", "alpha", "p_K_value"});
}

TEST_CASE("identical config and seed give byte-identical output") {
    TempDir a("det-a"), b("det-b");
    const std::vector<json> docs{
        classical_doc(),
        json::parse(R"({"id": "q", "kind": "quantum", "seed": 77, "params": {
            "seminorm": {"type": "grid", "space": {"positions": [0, 1, 3]}, "fiber_dim": 2},
            "random_states": {"count": 2}}})"),
        json::parse(R"({"id": "t", "kind": "topology", "seed": 13, "params": {"truncation_dim": 6,
            "unit_spec": {"kind": "PsUnit"}, "state_family": ["random", "mixtures"]}})")};
    for (const auto& d : docs) {
        const auto s = parse_scenario(d);
        run_scenario(s, a.path);
        run_scenario(s, b.path);
        for (const char* f : {"results.csv", "report.json"})
            CHECK(slurp(a.path / s.id / f) == slurp(b.path / s.id / f));
    }
    // A different seed changes the random states.
    auto other = parse_scenario(docs[0]);
    other.seed = 10;
    run_scenario(other, b.path);
    CHECK(slurp(a.path / "c1" / "results.csv") != slurp(b.path / "c1" / "results.csv"));
}

TEST_CASE("reproduce") {
    CHECK_THROWS_AS(reproduce("unknown-name"), UnknownScenario);
    CHECK(reproduce_names().size() == 8);

    for (const char* name : {"example1", "example2", "midpoint", "two-point-triple", "compact-family", "ps-units"}) {
        const auto r = reproduce(name);
        CHECK_MESSAGE(r.ok(), name);
    }

    // The tail bound wu(S_(N-1), 0) < 1e-3 h0 cannot hold: the value is 1/N.
    const auto shift = reproduce("shift");
    for (const auto& c : shift.checks) {
        if (c.name.find("1e-3") != std::string::npos)
            CHECK_FALSE(c.pass);
        else
            CHECK_MESSAGE(c.pass, c.name);
    }
}

TEST_CASE("emit_plot_data") {
    TempDir dir("plots");
    const auto r = reproduce("shift");
    write_result(r, dir.path);
    const auto written = emit_plot_data(dir.path / "shift" / "report.json", dir.path / "plots");
    CHECK(written.size() == r.tables.size());
    CHECK(lines(slurp(dir.path / "plots" / "shift.csv"))[0] == "n,wu_metric,strict_left");

    const auto ps = reproduce("ps-units");
    write_result(ps, dir.path);
    emit_plot_data(dir.path / "ps-units" / "report.json", dir.path / "plots");
    const auto ps_lines = lines(slurp(dir.path / "plots" / "ps_units.csv"));
    CHECK(ps_lines[0] == "n,alpha,p_K_value");
    CHECK(ps_lines.size() == 1 + 32 * 3);

    const auto empty = dir.path / "empty.json";
    std::ofstream(empty) << R"({"tables": {"nothing": {"columns": ["n", "value"], "rows": []}}})";
    emit_plot_data(empty, dir.path / "plots");
    CHECK(slurp(dir.path / "plots" / "nothing.csv") == "n,value\n");

    CHECK_THROWS_AS(emit_plot_data(dir.path / "nope.json", dir.path / "plots"), IoError);
    std::ofstream(dir.path / "broken.json") << R"({"tables": {"x": {"rows": []}}})";
    CHECK_THROWS_AS(emit_plot_data(dir.path / "broken.json", dir.path / "plots"), IoError);
}

TEST_CASE("csv formatting") {
    Table t{{"name", "count", "value"}, {}};
    t.add({"a,b", 3, 0.1});
    t.add({"plain", -2, 1e-300});
    CHECK(to_csv(t) == "name,count,value\n\"a,b\",3,0.10000000000000001\nplain,-2,1e-300\n");
    CHECK_THROWS_AS(t.add({1, 2}), InvalidArgument);
    const auto back = Table::from_json(t.to_json());
    CHECK(to_csv(back) == to_csv(t));
}
