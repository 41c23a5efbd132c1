#include "qlip/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "qlip/classical.hpp"
#include "qlip/error.hpp"
#include "qlip/quantum.hpp"
#include "qlip/rng.hpp"
#include "qlip/topology.hpp"

namespace qlip::harness {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Config access. Every lookup carries the dotted path of the field so that
// errors name it.

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
    throw ConfigError("config field '" + path + "': " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const json& require(const json& j, const std::string& path, const std::string& key) {
    if (!j.is_object()) config_error(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) config_error(join(path, key), "missing");
    return *it;
}

double as_double(const json& j, const std::string& path) {
    if (!j.is_number()) config_error(path, "expected a number");
    return j.get<double>();
}

std::uint64_t as_u64(const json& j, const std::string& path) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
        config_error(path, "expected a nonnegative integer");
    return j.get<std::uint64_t>();
}

std::size_t as_size(const json& j, const std::string& path) { return static_cast<std::size_t>(as_u64(j, path)); }

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) config_error(path, "expected a string");
    return j.get<std::string>();
}

double get_double(const json& j, const std::string& path, const std::string& key, double fallback) {
    const auto it = j.find(key);
    return it == j.end() ? fallback : as_double(*it, join(path, key));
}

std::size_t get_size(const json& j, const std::string& path, const std::string& key, std::size_t fallback) {
    const auto it = j.find(key);
    return it == j.end() ? fallback : as_size(*it, join(path, key));
}

std::vector<double> as_vector(const json& j, const std::string& path) {
    if (!j.is_array()) config_error(path, "expected an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(as_double(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

std::vector<double> get_vector(const json& j, const std::string& path, const std::string& key,
                               std::vector<double> fallback) {
    const auto it = j.find(key);
    return it == j.end() ? fallback : as_vector(*it, join(path, key));
}

std::vector<std::vector<double>> as_rows(const json& j, const std::string& path) {
    if (!j.is_array()) config_error(path, "expected an array of rows");
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < j.size(); ++i) rows.push_back(as_vector(j[i], path + "[" + std::to_string(i) + "]"));
    return rows;
}

// A matrix is either a real array of rows or {"re": rows, "im": rows}.
ComplexMatrix as_matrix(const json& j, const std::string& path) {
    std::vector<std::vector<double>> re, im;
    if (j.is_object()) {
        re = as_rows(require(j, path, "re"), join(path, "re"));
        if (j.contains("im")) im = as_rows(j["im"], join(path, "im"));
    } else {
        re = as_rows(j, path);
    }
    if (im.empty()) im.assign(re.size(), std::vector<double>(re.size(), 0.0));
    try {
        return ComplexMatrix::from_parts(re, im);
    } catch (const Error& e) {
        config_error(path, e.what());
    }
}

HermitianElement as_hermitian(const json& j, const std::string& path) {
    try {
        return HermitianElement(as_matrix(j, path));
    } catch (const NonHermitianInput& e) {
        config_error(path, e.what());
    }
}

SpacePtr as_space(const json& j, const std::string& path) {
    try {
        if (j.contains("positions"))
            return std::make_shared<const FiniteMetricSpace>(
                FiniteMetricSpace::line(as_vector(j["positions"], join(path, "positions"))));
        const auto rho = as_rows(require(j, path, "rho"), join(path, "rho"));
        std::vector<std::string> labels;
        if (j.contains("labels")) {
            const auto& l = j["labels"];
            if (!l.is_array()) config_error(join(path, "labels"), "expected an array of strings");
            for (std::size_t i = 0; i < l.size(); ++i)
                labels.push_back(as_string(l[i], join(path, "labels") + "[" + std::to_string(i) + "]"));
        } else {
            for (std::size_t i = 0; i < rho.size(); ++i) labels.push_back("x" + std::to_string(i));
        }
        return std::make_shared<const FiniteMetricSpace>(std::move(labels), rho);
    } catch (const InvalidMetric& e) {
        config_error(join(path, "rho"), e.what());
    }
}

std::vector<std::pair<std::size_t, std::size_t>> pairs_of(const json& params, std::size_t count) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (params.contains("pairs")) {
        const auto& p = params["pairs"];
        if (!p.is_array()) config_error("params.pairs", "expected an array of index pairs");
        for (std::size_t i = 0; i < p.size(); ++i) {
            const std::string path = "params.pairs[" + std::to_string(i) + "]";
            if (!p[i].is_array() || p[i].size() != 2) config_error(path, "expected [i, j]");
            const std::size_t a = as_size(p[i][0], path), b = as_size(p[i][1], path);
            if (a >= count || b >= count) config_error(path, "state index out of range");
            out.emplace_back(a, b);
        }
        return out;
    }
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = i + 1; j < count; ++j) out.emplace_back(i, j);
    return out;
}

// ---------------------------------------------------------------------------
// Random families. Every stream derives from the scenario seed.

std::vector<double> random_weights(SplitMix64& rng, std::size_t n) {
    std::vector<double> w(n);
    double s = 0.0;
    for (auto& x : w) s += (x = rng.uniform(0.01, 1.0));
    for (auto& x : w) x /= s;
    return w;
}

HermitianElement random_density_matrix(SplitMix64& rng, std::size_t dim, std::size_t rank) {
    if (rank == 0 || rank > dim) rank = dim;
    ComplexMatrix g(dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < rank; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
    auto rho = HermitianElement::hermitian_part(g * g.adjoint());
    return rho * (1.0 / rho.matrix().trace().real());
}

HermitianElement random_hermitian_matrix(SplitMix64& rng, std::size_t dim) {
    ComplexMatrix g(dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
    return HermitianElement::hermitian_part(g);
}

SpacePtr random_plane_space(SplitMix64& rng, std::size_t n) {
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = rng.uniform(0.0, 3.0);
        ys[i] = rng.uniform(0.0, 3.0);
    }
    std::vector<std::string> labels;
    std::vector<std::vector<double>> rho(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back("p" + std::to_string(i));
        for (std::size_t j = 0; j < i; ++j)
            rho[i][j] = rho[j][i] = std::max(1e-3, std::hypot(xs[i] - xs[j], ys[i] - ys[j]));
    }
    return std::make_shared<const FiniteMetricSpace>(std::move(labels), std::move(rho));
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string describe(const std::string& what, double got, double want) {
    return what + " = " + fmt(got) + " vs " + fmt(want);
}

// ---------------------------------------------------------------------------
// Classical scenarios

void real_line_one(ScenarioResult& r, const json& params, const SolverConfig& cfg) {
    const std::size_t n_min = get_size(params, "params", "n_min", 2);
    const std::size_t n_max = get_size(params, "params", "n_max", 64);
    if (n_min < 2 || n_max < n_min) config_error("params.n_min", "need 2 <= n_min <= n_max");

    Table t{{"n", "kantorovich", "bl_distance"}, {}};
    double worst_k = 0.0, worst_bl = 0.0;
    for (std::size_t n = n_min; n <= n_max; ++n) {
        const double nd = static_cast<double>(n);
        const auto space = std::make_shared<const FiniteMetricSpace>(FiniteMetricSpace::line({0.0, nd}));
        const auto d0 = DiscreteMeasure::point_mass(space, 0);
        const DiscreteMeasure phi(space, {1.0 - 1.0 / nd, 1.0 / nd});
        const double k = kantorovich(d0, phi, 1.0, cfg).value;
        const double bl = bl_distance(d0, phi, 1.0, 1.0, cfg).value;
        worst_k = std::max(worst_k, std::abs(k - 1.0));
        worst_bl = std::max(worst_bl, std::abs(bl - 2.0 / nd));
        t.add({n, k, bl});
    }
    r.check("kantorovich equals 1", worst_k <= 1e-9, "max deviation " + fmt(worst_k));
    r.check("bl_distance equals 2/n", worst_bl <= 1e-9, "max deviation " + fmt(worst_bl));

    // Weak* convergence along n = 2^j, j = 1..40, on the union of supports,
    // paired with functions vanishing at infinity.
    std::vector<double> xs{0.0};
    for (int j = 1; j <= 40; ++j) xs.push_back(std::ldexp(1.0, j));
    const auto support = std::make_shared<const FiniteMetricSpace>(FiniteMetricSpace::line(xs));
    std::vector<DiscreteMeasure> seq;
    for (int j = 1; j <= 40; ++j) {
        std::vector<double> w(xs.size(), 0.0);
        w[0] = 1.0 - std::ldexp(1.0, -j);
        w[static_cast<std::size_t>(j)] = std::ldexp(1.0, -j);
        seq.emplace_back(support, w);
    }
    std::vector<double> g1, g2, g3;
    for (double x : xs) {
        g1.push_back(std::exp(-x));
        g2.push_back(1.0 / (1.0 + x * x));
        g3.push_back(1.0 / (1.0 + x));
    }
    const auto probe = weakstar_probe(seq, DiscreteMeasure::point_mass(support, 0), {g1, g2, g3});
    r.check("weak* flags", probe.all_converged());
    r.tables["real_line_1"] = std::move(t);
    r.primary = "real_line_1";
}

void real_line_zero(ScenarioResult& r, const json& params, const SolverConfig& cfg) {
    const std::size_t n_min = get_size(params, "params", "n_min", 2);
    const std::size_t n_max = get_size(params, "params", "n_max", 10);
    if (n_min < 2 || n_max < n_min) config_error("params.n_min", "need 2 <= n_min <= n_max");

    Table t{{"N", "kantorovich", "closed_form", "lower_bound"}, {}};
    double worst_rel = 0.0;
    bool above = true;
    for (std::size_t N = n_min; N <= n_max; ++N) {
        std::vector<double> xs{0.0}, w{0.0};
        double total = 0.0;
        for (std::size_t k = 0; k <= N; ++k) {
            xs.push_back(std::ldexp(1.0, 2 * static_cast<int>(k)));
            w.push_back(std::ldexp(1.0, -static_cast<int>(k + 1)));
            total += w.back();
        }
        double closed = 0.0;
        for (std::size_t i = 1; i < w.size(); ++i) {
            w[i] /= total;
            closed += w[i] * xs[i];
        }
        const auto space = std::make_shared<const FiniteMetricSpace>(FiniteMetricSpace::line(xs));
        const double k = kantorovich(DiscreteMeasure(space, w), DiscreteMeasure::point_mass(space, 0), 1.0, cfg).value;
        const double bound = std::ldexp(1.0, static_cast<int>(N) - 1);
        worst_rel = std::max(worst_rel, std::abs(k - closed) / closed);
        if (k < bound) above = false;
        t.add({N, k, closed, bound});
    }
    r.check("kantorovich matches closed form", worst_rel <= 1e-6, "max relative deviation " + fmt(worst_rel));
    r.check("kantorovich >= 2^(N-1)", above);
    r.tables["real_line_0"] = std::move(t);
    r.primary = "real_line_0";
}

void classical_general(ScenarioResult& r, const Scenario& s) {
    const json& params = s.params;
    const SpacePtr space = as_space(require(params, "params", "space"), "params.space");
    SplitMix64 rng(s.seed);

    std::vector<DiscreteMeasure> states;
    if (params.contains("states")) {
        const auto& st = params["states"];
        if (!st.is_array()) config_error("params.states", "expected an array of weight vectors");
        for (std::size_t i = 0; i < st.size(); ++i) {
            const std::string path = "params.states[" + std::to_string(i) + "]";
            try {
                states.emplace_back(space, as_vector(st[i], path));
            } catch (const InvalidMeasure& e) {
                config_error(path, e.what());
            }
        }
    } else {
        const std::size_t count = get_size(params, "params", "random_states", 0);
        if (count == 0) config_error("params.states", "missing (or give params.random_states)");
        for (std::size_t i = 0; i < count; ++i) states.emplace_back(space, random_weights(rng, space->size()));
    }
    const auto alphas = get_vector(params, "params", "alphas", {1.0});
    const auto betas = get_vector(params, "params", "betas", {1.0});
    for (double a : alphas)
        if (!(a > 0.0)) config_error("params.alphas", "entries must be positive");
    for (double b : betas)
        if (!(b > 0.0)) config_error("params.betas", "entries must be positive");

    Table t{{"scenario_id", "alpha", "beta", "value", "witness_norm", "lip_of_witness"}, {}};
    bool bounded = true, feasible = true, sandwich = true, dominated = true;
    for (const auto& [i, j] : pairs_of(params, states.size())) {
        const double d11 = bl_distance(states[i], states[j], 1.0, 1.0, s.solver).value;
        for (double beta : betas) {
            const double kant = kantorovich(states[i], states[j], beta, s.solver).value;
            for (double alpha : alphas) {
                const auto d = bl_distance(states[i], states[j], alpha, beta, s.solver);
                const double lip = d.witness.lipschitz_constant(*space);
                t.add({s.id, alpha, beta, d.value, d.witness.sup_norm(), lip});
                if (d.value > 2.0 * alpha + 1e-9) bounded = false;
                if (!d.witness.feasible(*space)) feasible = false;
                if (d.value < std::min(alpha, beta) * d11 - 1e-8 || d.value > std::max(alpha, beta) * d11 + 1e-8)
                    sandwich = false;
                if (d.value > kant + 1e-9) dominated = false;
            }
        }
    }
    r.check("value <= 2 alpha", bounded);
    r.check("witness feasible", feasible);
    r.check("family sandwich", sandwich);
    r.check("bl <= kantorovich", dominated);
    r.tables["distances"] = std::move(t);
    r.primary = "distances";
}

void evaluate_classical(ScenarioResult& r, const Scenario& s) {
    const auto family = s.params.contains("family") ? as_string(s.params["family"], "params.family") : "";
    if (family == "real-line-1")
        real_line_one(r, s.params, s.solver);
    else if (family == "real-line-0")
        real_line_zero(r, s.params, s.solver);
    else if (family.empty())
        classical_general(r, s);
    else
        config_error("params.family", "unknown family '" + family + "'");
}

// ---------------------------------------------------------------------------
// Quantum scenarios

CommutatorSeminorm two_point_triple(double modulus) {
    return {HermitianElement(ComplexMatrix::from_rows({{0.0, modulus}, {modulus, 0.0}}))};
}

void two_point_family(ScenarioResult& r, const Scenario& s) {
    const auto moduli = get_vector(s.params, "params", "moduli", {0.5, 1.0, 2.0, 4.0});
    const double inactive = get_double(s.params, "params", "inactive_alpha", 10.0);
    const double active_fraction = get_double(s.params, "params", "active_fraction", 0.25);
    const auto e11 = DensityMatrix::basis_state(2, 0);
    const auto e22 = DensityMatrix::basis_state(2, 1);

    Table t{{"scenario_id", "modulus", "alpha", "value", "expected", "iters", "feasibility_slack"}, {}};
    double worst_inactive = 0.0, worst_active = 0.0;
    for (double m : moduli) {
        if (!(m > 0.0)) config_error("params.moduli", "entries must be positive");
        const auto L = two_point_triple(m);
        for (const double alpha : {inactive, active_fraction / m}) {
            const double expected = std::min(2.0 * alpha, 1.0 / m);
            const auto res = bl_distance_matrix(e11, e22, L, alpha, 1.0, s.solver);
            const double dev = std::abs(res.value - expected);
            (alpha == inactive ? worst_inactive : worst_active) =
                std::max(alpha == inactive ? worst_inactive : worst_active, dev);
            t.add({s.id, m, alpha, res.value, expected, res.iters, res.feasibility_slack()});
        }
    }
    r.check("inactive alpha gives 1/|m|", worst_inactive <= 1e-4, "max deviation " + fmt(worst_inactive));
    r.check("active alpha gives min(2 alpha, 1/|m|)", worst_active <= 1e-4, "max deviation " + fmt(worst_active));
    r.tables["two_point_triple"] = std::move(t);
    r.primary = "two_point_triple";
}

Seminorm as_seminorm(const json& j, const std::string& path) {
    const std::string type = as_string(require(j, path, "type"), join(path, "type"));
    if (type == "commutator") return CommutatorSeminorm{as_hermitian(require(j, path, "D"), join(path, "D"))};
    if (type == "grid") {
        const SpacePtr space = as_space(require(j, path, "space"), join(path, "space"));
        const std::size_t k = get_size(j, path, "fiber_dim", 1);
        if (k == 0) config_error(join(path, "fiber_dim"), "must be positive");
        return MatrixLipSeminorm{space, k};
    }
    config_error(join(path, "type"), "expected 'commutator' or 'grid'");
}

void quantum_general(ScenarioResult& r, const Scenario& s) {
    const json& params = s.params;
    const Seminorm L = as_seminorm(require(params, "params", "seminorm"), "params.seminorm");
    const std::size_t dim = algebra_dim(L);
    SplitMix64 rng(s.seed);

    std::vector<DensityMatrix> states;
    if (params.contains("states")) {
        const auto& st = params["states"];
        if (!st.is_array()) config_error("params.states", "expected an array of matrices");
        for (std::size_t i = 0; i < st.size(); ++i) {
            const std::string path = "params.states[" + std::to_string(i) + "]";
            try {
                states.emplace_back(as_hermitian(st[i], path));
            } catch (const InvalidState& e) {
                config_error(path, e.what());
            }
            if (states.back().dim() != dim) config_error(path, "dimension does not match the seminorm");
        }
    } else {
        const auto& rs = require(params, "params", "random_states");
        const std::size_t count = get_size(rs, "params.random_states", "count", 0);
        const std::size_t rank = get_size(rs, "params.random_states", "rank", 0);
        if (count == 0) config_error("params.random_states.count", "must be positive");
        const auto* grid = std::get_if<MatrixLipSeminorm>(&L);
        for (std::size_t i = 0; i < count; ++i) {
            if (grid) {
                // States of C(X, M_k) only see the diagonal blocks.
                const auto w = random_weights(rng, grid->base->size());
                std::vector<HermitianElement> blocks;
                for (double x : w) blocks.push_back(random_density_matrix(rng, grid->fiber_dim, rank) * x);
                states.push_back(DensityMatrix::from_blocks(blocks));
            } else {
                states.emplace_back(random_density_matrix(rng, dim, rank));
            }
        }
    }
    const double alpha = get_double(params, "params", "alpha", 1.0);
    const double beta = get_double(params, "params", "beta", 1.0);
    if (!(alpha > 0.0)) config_error("params.alpha", "must be positive");
    if (!(beta > 0.0)) config_error("params.beta", "must be positive");

    Table t{{"scenario_id", "value", "iters", "primal_res", "dual_res", "feasibility_slack"}, {}};
    bool feasible = true, bounded = true, converged = true;
    for (const auto& [i, j] : pairs_of(params, states.size())) {
        MatrixDistanceResult res;
        try {
            res = bl_distance_matrix(states[i], states[j], L, alpha, beta, s.solver);
        } catch (const SolverStalled& e) {
            res = e.partial();
            converged = false;
        }
        t.add({s.id, res.value, res.iters, res.primal_res, res.dual_res, res.feasibility_slack()});
        if (res.feasibility_slack() < -1e-9) feasible = false;
        if (res.value > 2.0 * alpha + 1e-9) bounded = false;
    }
    r.check("solver converged", converged);
    r.check("witness feasible", feasible);
    r.check("value <= 2 alpha", bounded);
    r.tables["distances"] = std::move(t);
    r.primary = "distances";
}

void evaluate_quantum(ScenarioResult& r, const Scenario& s) {
    const auto family = s.params.contains("family") ? as_string(s.params["family"], "params.family") : "";
    if (family == "two-point-triple")
        two_point_family(r, s);
    else if (family.empty())
        quantum_general(r, s);
    else
        config_error("params.family", "unknown family '" + family + "'");
}

// ---------------------------------------------------------------------------
// Topology scenarios

std::vector<std::pair<std::string, StateSampleSet>> state_family(const std::string& name, std::size_t dim,
                                                                 SplitMix64& rng) {
    std::vector<std::pair<std::string, StateSampleSet>> out;
    const auto add = [&](const std::string& n, std::vector<DensityMatrix> st) {
        out.emplace_back(n, StateSampleSet(std::move(st)));
    };
    if (name == "eigenstates" || name == "adversarial") {
        std::vector<DensityMatrix> st;
        for (std::size_t i = 0; i < dim; ++i) st.push_back(DensityMatrix::basis_state(dim, i));
        add("eigenstates", std::move(st));
    }
    if (name == "mixtures" || name == "adversarial") {
        std::vector<double> uniform(dim, 1.0 / static_cast<double>(dim)), slow(dim), heavy(dim);
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            s1 += (slow[k] = std::pow(0.9, static_cast<double>(k)));
            s2 += (heavy[k] = static_cast<double>(k + 1));
        }
        for (std::size_t k = 0; k < dim; ++k) {
            slow[k] /= s1;
            heavy[k] /= s2;
        }
        add("mixtures", {DensityMatrix(HermitianElement::diagonal(uniform)),
                         DensityMatrix(HermitianElement::diagonal(slow)),
                         DensityMatrix(HermitianElement::diagonal(heavy))});
    }
    if (name == "random" || name == "adversarial") {
        std::vector<DensityMatrix> st;
        for (std::size_t rank : {std::size_t{1}, std::size_t{2}, dim})
            st.emplace_back(random_density_matrix(rng, dim, rank));
        // Superposition of the first and last basis vectors.
        ComplexMatrix m(dim);
        m(0, 0) = m(dim - 1, dim - 1) = 0.5;
        m(0, dim - 1) = m(dim - 1, 0) = 0.5;
        st.emplace_back(HermitianElement(m));
        add("random", std::move(st));
    }
    if (out.empty())
        config_error("params.state_family", "unknown family '" + name +
                                                "' (expected eigenstates, mixtures, random or adversarial)");
    return out;
}

HermitianElement parse_h(const json& spec, std::size_t dim) {
    if (!spec.contains("h")) return harmonic_h(dim);
    const auto& h = spec["h"];
    if (h.is_string()) {
        if (h.get<std::string>() != "harmonic") config_error("params.unit_spec.h", "expected 'harmonic' or a diagonal");
        return harmonic_h(dim);
    }
    const auto d = as_vector(h, "params.unit_spec.h");
    if (d.size() != dim) config_error("params.unit_spec.h", "length must equal truncation_dim");
    return HermitianElement::diagonal(d);
}

ApproximateUnitSpec parse_unit_spec(const json& spec, std::size_t dim) {
    ApproximateUnitSpec u;
    const std::string kind = spec.contains("kind") ? as_string(spec["kind"], "params.unit_spec.kind") : "SpectralUnit";
    u.h = parse_h(spec, dim);
    std::vector<double> levels;
    const auto eig = hermitian_eig(u.h).eigenvalues;
    for (auto it = eig.rbegin(); it != eig.rend(); ++it)
        if (levels.empty() || *it < levels.back() - 1e-12) levels.push_back(*it);

    if (kind == "TruncationProjections") {
        u.kind = UnitKind::TruncationProjections;
    } else if (kind == "SpectralUnit") {
        u.kind = UnitKind::SpectralUnit;
        if (spec.contains("thresholds")) {
            u.thresholds = as_vector(spec["thresholds"], "params.unit_spec.thresholds");
        } else {
            // Just below each distinct eigenvalue, so e_n picks up one level at a time.
            for (double v : levels) u.thresholds.push_back(v * (1.0 - 1e-9));
        }
    } else if (kind == "PsUnit") {
        u.kind = UnitKind::PsUnit;
        if (spec.contains("functions")) {
            const auto& fs = spec["functions"];
            if (!fs.is_array()) config_error("params.unit_spec.functions", "expected an array of breakpoint tables");
            for (std::size_t i = 0; i < fs.size(); ++i) {
                const auto rows = as_rows(fs[i], "params.unit_spec.functions[" + std::to_string(i) + "]");
                std::vector<std::pair<double, double>> pts;
                for (const auto& row : rows) {
                    if (row.size() != 2) config_error("params.unit_spec.functions", "breakpoints are [x, y] pairs");
                    pts.emplace_back(row[0], row[1]);
                }
                u.functions.emplace_back(std::move(pts));
            }
        } else {
            // f_n rises linearly to 1 at the n-th largest eigenvalue.
            for (double v : levels) {
                if (v >= 1.0 - 1e-12)
                    u.functions.emplace_back(std::vector<std::pair<double, double>>{{0.0, 0.0}, {1.0, 1.0}});
                else
                    u.functions.emplace_back(std::vector<std::pair<double, double>>{{0.0, 0.0}, {v, 1.0}, {1.0, 1.0}});
            }
        }
    } else {
        config_error("params.unit_spec.kind", "expected TruncationProjections, PsUnit or SpectralUnit");
    }
    u.validate();
    return u;
}

std::string metric_name(const ElementMetric& m) {
    switch (m.index()) {
    case 0: return "WuMetric";
    case 1: return "StrictLeft";
    case 2: return "StrictRight";
    default: return "Norm";
    }
}

void evaluate_topology(ScenarioResult& r, const Scenario& s) {
    const json& params = s.params;
    const std::size_t N = as_size(require(params, "params", "truncation_dim"), "params.truncation_dim");
    if (N < 2) config_error("params.truncation_dim", "must be at least 2");
    SplitMix64 rng(s.seed);

    std::vector<std::pair<std::string, StateSampleSet>> families;
    if (params.contains("state_family") && params["state_family"].is_array()) {
        for (std::size_t i = 0; i < params["state_family"].size(); ++i)
            for (auto& f : state_family(as_string(params["state_family"][i], "params.state_family"), N, rng))
                families.push_back(std::move(f));
    } else {
        const std::string name =
            params.contains("state_family") ? as_string(params["state_family"], "params.state_family") : "adversarial";
        families = state_family(name, N, rng);
    }
    std::vector<unsigned> alphas;
    for (double a : get_vector(params, "params", "alphas", {1.0, 2.0, 3.0})) {
        if (!(a >= 1.0) || a != std::floor(a)) config_error("params.alphas", "entries must be positive integers");
        alphas.push_back(static_cast<unsigned>(a));
    }
    ApproximateUnitSpec unit;
    try {
        unit = parse_unit_spec(params.contains("unit_spec") ? params["unit_spec"] : json::object(), N);
    } catch (const InvalidUnitSpec& e) {
        config_error("params.unit_spec", e.what());
    } catch (const NotStrictlyPositive& e) {
        config_error("params.unit_spec.h", e.what());
    } catch (const NormalizationError& e) {
        config_error("params.unit_spec.h", e.what());
    }

    Table probes{{"probe", "n", "value"}, {}};
    const HermitianElement h = harmonic_h(N);

    // Shift counterexample.
    if (N >= 4) {
        const auto sh = counterexample_shift(N);
        Table t{{"n", "wu_metric", "strict_left"}, {}};
        for (std::size_t n = 0; n < N; ++n) {
            t.add({n, sh.wu_shift[n], sh.strict_left_adjoint[n]});
            probes.add({"wu_shift", n, sh.wu_shift[n]});
            probes.add({"wu_square", n, sh.wu_square[n]});
            probes.add({"strict_left_adjoint", n, sh.strict_left_adjoint[n]});
        }
        r.check("shift: wu strictly decreasing", sh.wu_strictly_decreasing);
        r.check("shift: wu of S_n* S_n constant", sh.wu_square_constant);
        r.check("shift: strict pairs equidistant", sh.strict_pairs_equal);
        r.tables["shift"] = std::move(t);
    }

    // Approximate-unit condition, one check per state family; the table uses
    // the union of all families as K.
    {
        const bool nested = unit.kind != UnitKind::PsUnit;
        std::vector<DensityMatrix> all;
        for (const auto& [name, K] : families) {
            const auto rep = ps_unit_condition_check(unit, K, alphas);
            const bool mono = std::all_of(rep.monotone.begin(), rep.monotone.end(), [](bool b) { return b; });
            const bool conv = std::all_of(rep.converged.begin(), rep.converged.end(), [](bool b) { return b; });
            if (nested) r.check("ps-units (" + name + "): nonincreasing", mono);
            r.check("ps-units (" + name + "): converged", conv);
            all.insert(all.end(), K.states().begin(), K.states().end());
        }
        const auto rep = ps_unit_condition_check(unit, StateSampleSet(all), alphas);
        Table t{{"n", "alpha", "p_K_value"}, {}};
        for (std::size_t n = 0; n < rep.values.size(); ++n)
            for (std::size_t k = 0; k < alphas.size(); ++k) {
                t.add({n, alphas[k], rep.values[n][k]});
                probes.add({"p_K_alpha" + std::to_string(alphas[k]), n, rep.values[n][k]});
            }
        r.tables["ps_units"] = std::move(t);
        r.details["unit_kind"] = std::string(to_string(unit.kind));
    }

    // Covering numbers of the adjoint shifts.
    {
        std::vector<ComplexMatrix> adj;
        for (std::size_t n = 0; n < N; ++n) adj.push_back(shift_operator(N, n).adjoint());
        auto eps_grid = get_vector(params, "params", "eps_grid", {0.25, 0.5, 1.0, std::sqrt(2.0) / 2.0, 1.5});
        for (double e : eps_grid)
            if (!(e > 0.0)) config_error("params.eps_grid", "entries must be positive");
        std::vector<double> sorted = eps_grid;
        std::sort(sorted.begin(), sorted.end());
        Table t{{"metric", "eps", "covering_number"}, {}};
        bool monotone = true;
        for (const ElementMetric& m : {ElementMetric{WuMetric{h}}, ElementMetric{StrictLeft{h}},
                                       ElementMetric{StrictRight{h}}, ElementMetric{NormMetric{}}}) {
            std::size_t prev = N + 1;
            for (std::size_t i = 0; i < sorted.size(); ++i) {
                const std::size_t c = covering_number(adj, m, sorted[i]);
                if (c > prev) monotone = false;
                prev = c;
                t.add({metric_name(m), sorted[i], c});
                probes.add({"covering_" + metric_name(m), i, c});
            }
        }
        r.check("covering numbers nonincreasing in eps", monotone);
        r.tables["covering"] = std::move(t);
    }

    // Topology comparison on the adjoint shifts plus a few random elements.
    {
        std::vector<ComplexMatrix> B;
        for (std::size_t n = 0; n < N; ++n) B.push_back(shift_operator(N, n).adjoint());
        for (int i = 0; i < 3; ++i) {
            const auto x = random_hermitian_matrix(rng, N);
            B.push_back(x.matrix() * (1.0 / operator_norm(x)));
        }
        std::vector<StateSampleSet> Ks;
        for (const auto& f : families) Ks.push_back(f.second);
        const auto rep = topology_agreement_probe(B, h, Ks, 1.0);
        r.check("agreement: p_K <= q_K", rep.p_le_q);
        r.check("agreement: wu <= norm", rep.wu_le_norm);
        r.check("agreement: su certificate", rep.su_certificate);
        r.details["norm_over_wu"] = rep.norm_over_wu;
        r.details["strict_over_wu"] = rep.strict_over_wu;
        r.details["norm_over_strict"] = rep.norm_over_strict;
        probes.add({"strict_over_wu", N, rep.strict_over_wu});
    }

    r.tables["probes"] = std::move(probes);
    r.primary = "probes";
}

// ---------------------------------------------------------------------------
// Canned reproductions

using Clock = std::chrono::steady_clock;

Scenario canned(std::string id, ScenarioKind kind, const ReproduceOptions& o, json params) {
    Scenario s;
    s.id = std::move(id);
    s.kind = kind;
    s.seed = o.seed;
    s.solver = o.solver;
    s.params = std::move(params);
    return s;
}

ScenarioResult reproduce_metricseq(const ReproduceOptions& o) {
    ScenarioResult r;
    r.id = "metricseq";
    SplitMix64 rng(o.seed);
    Table t{{"instance", "kind", "alpha", "beta", "d_ab", "d_11", "lower", "upper"}, {}};
    bool lp_ok = true, split_ok = true;
    std::size_t idx = 0;

    for (int trial = 0; trial < 150; ++trial, ++idx) {
        const auto space = random_plane_space(rng, static_cast<std::size_t>(rng.range(2, 6)));
        const double alpha = rng.uniform(0.25, 4.0), beta = rng.uniform(0.25, 4.0);
        const DiscreteMeasure mu(space, random_weights(rng, space->size()));
        const DiscreteMeasure nu(space, random_weights(rng, space->size()));
        const auto f = bl_family_ratio(mu, nu, alpha, beta, o.solver);
        const double lo = std::min(alpha, beta) * f.d_11, hi = std::max(alpha, beta) * f.d_11;
        if (f.d_ab < lo - 1e-8 || f.d_ab > hi + 1e-8) lp_ok = false;
        t.add({idx, "classical", alpha, beta, f.d_ab, f.d_11, lo, hi});
    }
    for (int trial = 0; trial < 50; ++trial, ++idx) {
        const double alpha = rng.uniform(0.25, 4.0), beta = rng.uniform(0.25, 4.0);
        Seminorm L;
        std::size_t dim = 0;
        if (trial % 2 == 0) {
            dim = static_cast<std::size_t>(rng.range(2, 4));
            L = CommutatorSeminorm{random_hermitian_matrix(rng, dim)};
        } else {
            const auto space = random_plane_space(rng, 2);
            L = MatrixLipSeminorm{space, 2};
            dim = 4;
        }
        std::vector<DensityMatrix> st;
        for (int k = 0; k < 2; ++k) {
            if (const auto* g = std::get_if<MatrixLipSeminorm>(&L)) {
                const auto w = random_weights(rng, g->base->size());
                std::vector<HermitianElement> blocks;
                for (double x : w) blocks.push_back(random_density_matrix(rng, g->fiber_dim, 0) * x);
                st.push_back(DensityMatrix::from_blocks(blocks));
            } else {
                st.emplace_back(random_density_matrix(rng, dim, 0));
            }
        }
        const double d_ab = bl_distance_matrix(st[0], st[1], L, alpha, beta, o.solver).value;
        const double d_11 = bl_distance_matrix(st[0], st[1], L, 1.0, 1.0, o.solver).value;
        const double lo = std::min(alpha, beta) * d_11, hi = std::max(alpha, beta) * d_11;
        if (d_ab < lo - 1e-4 || d_ab > hi + 1e-4) split_ok = false;
        t.add({idx, trial % 2 == 0 ? "commutator" : "grid", alpha, beta, d_ab, d_11, lo, hi});
    }
    r.check("sandwich on 150 LP instances (tol 1e-8)", lp_ok);
    r.check("sandwich on 50 splitting instances (tol 1e-4)", split_ok);
    r.tables["metricseq"] = std::move(t);
    r.primary = "metricseq";
    return r;
}

ScenarioResult reproduce_midpoint(const ReproduceOptions& o) {
    ScenarioResult r;
    r.id = "midpoint";
    SplitMix64 rng(o.seed);
    Table t{{"instance", "lhs", "rhs"}, {}};
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto space = random_plane_space(rng, static_cast<std::size_t>(rng.range(2, 6)));
        const DiscreteMeasure phi(space, random_weights(rng, space->size()));
        const DiscreteMeasure psi(space, random_weights(rng, space->size()));
        const auto m = midpoint_check(phi, psi, 1.0, 1.0, o.solver);
        worst = std::max(worst, std::abs(m.lhs - m.rhs));
        t.add({trial, m.lhs, m.rhs});
    }
    r.check("|d(mid, psi) - d(phi, psi)/2| <= 1e-8", worst <= 1e-8, "max deviation " + fmt(worst));
    r.tables["midpoint"] = std::move(t);
    r.primary = "midpoint";
    return r;
}

ScenarioResult reproduce_shift(const ReproduceOptions&) {
    ScenarioResult r;
    r.id = "shift";
    bool decreasing = true, tail = true, square = true, pairs = true, cover_strict = true, cover_wu = true;
    std::string tail_detail;
    Table sizes{{"N", "last_wu", "tail_bound", "covering_strict_left", "covering_wu"}, {}};
    for (std::size_t N = 4; N <= 32; ++N) {
        const auto rep = counterexample_shift(N);
        const double h0 = rep.h[0], h1 = rep.h[1];
        decreasing = decreasing && rep.wu_strictly_decreasing;
        square = square && rep.wu_square_constant;
        pairs = pairs && rep.strict_pairs_equal;
        const double last = rep.wu_shift.back();
        if (!(last < 1e-3 * h0)) {
            tail = false;
            if (tail_detail.empty()) tail_detail = "N = " + std::to_string(N) + ": " + describe("h0 h_(N-1)", last, 1e-3 * h0);
        }
        const HermitianElement h = HermitianElement::diagonal(rep.h);
        std::vector<ComplexMatrix> adj;
        for (std::size_t n = 0; n < N; ++n) adj.push_back(shift_operator(N, n).adjoint());
        const std::size_t cs = covering_number(adj, StrictLeft{h}, h0 * std::sqrt(2.0) / 2.0);
        const std::size_t cw = covering_number(adj, WuMetric{h}, 2.0 * h0 * h1);
        cover_strict = cover_strict && cs == N;
        cover_wu = cover_wu && cw <= 3;
        sizes.add({N, last, 1e-3 * h0, cs, cw});
        if (N == 32) {
            Table t{{"n", "wu_metric", "strict_left"}, {}};
            for (std::size_t n = 0; n < N; ++n) t.add({n, rep.wu_shift[n], rep.strict_left_adjoint[n]});
            r.tables["shift"] = std::move(t);
        }
    }
    r.check("wu(S_n, 0) strictly decreasing, N = 4..32", decreasing);
    r.check("wu(S_(N-1), 0) < 1e-3 h0, N = 4..32", tail, tail_detail);
    r.check("wu(S_n* S_n, 0) = h0^2 within 1e-12", square);
    r.check("||h (S_n* - S_m*)|| = h0 sqrt(2) within 1e-10", pairs);
    r.check("StrictLeft covering at h0 sqrt(2)/2 equals N", cover_strict);
    r.check("WuMetric covering at 2 h0 h1 is <= 3", cover_wu);
    r.tables["sizes"] = std::move(sizes);
    r.primary = "shift";
    return r;
}

ScenarioResult reproduce_compact_family(const ReproduceOptions&) {
    // a_n = f (x) S_n* on a grid X, with f 1-Lipschitz and ||f|| <= 1.
    ScenarioResult r;
    r.id = "compact-family";
    const std::vector<double> positions{0.0, 0.25, 0.5, 1.0, 2.0};
    const FiniteMetricSpace X = FiniteMetricSpace::line(positions);
    std::vector<double> f;
    for (double x : positions) f.push_back(std::max(0.0, 1.0 - x));
    const std::size_t P = positions.size();

    Table t{{"N", "max_L", "covering_norm", "covering_strict_left", "covering_wu"}, {}};
    bool bounded = true, norm_sep = true, strict_sep = true, wu_small = true;
    for (std::size_t N = 4; N <= 16; N *= 2) {
        // Block-diagonal embedding of C(X, M_N) and h = 1_X (x) diag(1/(k+1)).
        std::vector<double> hd;
        for (std::size_t p = 0; p < P; ++p)
            for (std::size_t k = 0; k < N; ++k) hd.push_back(1.0 / static_cast<double>(k + 1));
        const HermitianElement h = HermitianElement::diagonal(hd);

        std::vector<ComplexMatrix> family;
        double max_L = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            const ComplexMatrix s = shift_operator(N, n).adjoint();
            std::vector<ComplexMatrix> fibers;
            ComplexMatrix block(P * N);
            for (std::size_t p = 0; p < P; ++p) {
                fibers.push_back(s * Complex(f[p]));
                for (std::size_t i = 0; i < N; ++i)
                    for (std::size_t j = 0; j < N; ++j) block(p * N + i, p * N + j) = fibers.back()(i, j);
            }
            max_L = std::max({max_L, grid_lipschitz(X, fibers), grid_sup_norm(fibers)});
            family.push_back(std::move(block));
        }
        const std::size_t cn = covering_number(family, NormMetric{}, std::sqrt(2.0) / 2.0);
        const std::size_t cs = covering_number(family, StrictLeft{h}, std::sqrt(2.0) / 2.0);
        const std::size_t cw = covering_number(family, WuMetric{h}, 1.0);
        bounded = bounded && max_L <= 1.0 + 1e-12;
        norm_sep = norm_sep && cn == N;
        strict_sep = strict_sep && cs == N;
        wu_small = wu_small && cw <= 3;
        t.add({N, max_L, cn, cs, cw});
    }
    r.check("L(a_n) <= 1 and ||a_n|| <= 1", bounded);
    r.check("norm covering at sqrt(2)/2 equals N", norm_sep);
    r.check("StrictLeft covering at sqrt(2)/2 equals N", strict_sep);
    r.check("WuMetric covering at 1 is <= 3", wu_small);
    r.tables["compact_family"] = std::move(t);
    r.primary = "compact_family";
    return r;
}

ScenarioResult reproduce_ps_units(const ReproduceOptions& o) {
    ScenarioResult r;
    r.id = "ps-units";
    const std::size_t dim = 32;
    Table t{{"unit", "family", "n", "alpha", "p_K_value"}, {}};
    Table flat{{"n", "alpha", "p_K_value"}, {}};
    for (const char* kind : {"TruncationProjections", "SpectralUnit"}) {
        const auto unit = parse_unit_spec(json{{"kind", kind}}, dim);
        SplitMix64 rng(o.seed);
        for (const auto& [name, K] : state_family("adversarial", dim, rng)) {
            const auto rep = ps_unit_condition_check(unit, K, {1, 2, 3});
            bool mono = true, small = true;
            for (std::size_t k = 0; k < 3; ++k) {
                mono = mono && rep.monotone[k];
                const double first = rep.values.front()[k], last = rep.values.back()[k];
                small = small && first > 0.0 && last < 1e-6 * first;
            }
            for (std::size_t n = 0; n < rep.values.size(); ++n)
                for (std::size_t k = 0; k < 3; ++k) {
                    t.add({kind, name, n, rep.alphas[k], rep.values[n][k]});
                    if (std::string(kind) == "SpectralUnit" && name == "mixtures")
                        flat.add({n, rep.alphas[k], rep.values[n][k]});
                }
            r.check(std::string(kind) + " / " + name + ": nonincreasing", mono);
            r.check(std::string(kind) + " / " + name + ": final < 1e-6 initial", small);
        }
    }
    r.tables["ps_units_all"] = std::move(t);
    r.tables["ps_units"] = std::move(flat);
    r.primary = "ps_units";
    return r;
}

} // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(ScenarioKind k) noexcept {
    switch (k) {
    case ScenarioKind::Classical: return "classical";
    case ScenarioKind::Quantum: return "quantum";
    case ScenarioKind::Topology: return "topology";
    }
    return "?";
}

Scenario parse_scenario(const json& doc) {
    if (!doc.is_object()) config_error("", "the scenario must be a JSON object");
    Scenario s;
    s.id = as_string(require(doc, "", "id"), "id");
    if (s.id.empty() || s.id.find_first_of("/\\") != std::string::npos || s.id == "." || s.id == "..")
        config_error("id", "must be a nonempty name without path separators");
    const std::string kind = as_string(require(doc, "", "kind"), "kind");
    if (kind == "classical")
        s.kind = ScenarioKind::Classical;
    else if (kind == "quantum")
        s.kind = ScenarioKind::Quantum;
    else if (kind == "topology")
        s.kind = ScenarioKind::Topology;
    else
        config_error("kind", "expected classical, quantum or topology");
    if (doc.contains("seed")) s.seed = as_u64(doc["seed"], "seed");
    if (doc.contains("solver")) {
        const auto& sv = doc["solver"];
        if (!sv.is_object()) config_error("solver", "expected an object");
        s.solver.tol = get_double(sv, "solver", "tol", s.solver.tol);
        if (sv.contains("max_iters")) s.solver.max_iters = static_cast<std::int64_t>(as_u64(sv["max_iters"], "solver.max_iters"));
        if (sv.contains("max_pivots"))
            s.solver.max_pivots = static_cast<std::int64_t>(as_u64(sv["max_pivots"], "solver.max_pivots"));
        s.solver.penalty = get_double(sv, "solver", "penalty", s.solver.penalty);
        try {
            s.solver.validate();
        } catch (const InvalidArgument& e) {
            config_error("solver", e.what());
        }
    }
    s.params = require(doc, "", "params");
    if (!s.params.is_object()) config_error("params", "expected an object");
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_scenario(doc);
}

void Table::add(json row) {
    if (!row.is_array() || row.size() != columns.size()) throw InvalidArgument("table row does not match columns");
    rows.push_back(std::move(row));
}

json Table::to_json() const { return json{{"columns", columns}, {"rows", rows}}; }

Table Table::from_json(const json& j) {
    Table t;
    if (!j.is_object() || !j.contains("columns") || !j["columns"].is_array())
        throw IoError("table without a columns array");
    for (const auto& c : j["columns"]) {
        if (!c.is_string()) throw IoError("column names must be strings");
        t.columns.push_back(c.get<std::string>());
    }
    if (j.contains("rows")) {
        if (!j["rows"].is_array()) throw IoError("table rows must be an array");
        for (const auto& row : j["rows"]) {
            if (!row.is_array() || row.size() != t.columns.size()) throw IoError("table row does not match columns");
            t.rows.push_back(row);
        }
    }
    return t;
}

namespace {

std::string csv_cell(const json& v) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string out = "\"";
        for (char c : s) {
            if (c == '"') out += '"';
            out += c;
        }
        return out + "\"";
    }
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_float()) return fmt(v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_null()) return "";
    return v.dump();
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    out << text;
    if (!out) throw IoError("write failed for " + p.string());
}

} // namespace

std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + csv_cell(t.columns[i]);
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(row[i]);
        out += '\n';
    }
    return out;
}

bool ScenarioResult::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void ScenarioResult::check(std::string name, bool pass, std::string detail) {
    checks.push_back({std::move(name), pass, std::move(detail)});
}

json ScenarioResult::to_json() const {
    json j;
    j["id"] = id;
    j["ok"] = ok();
    j["checks"] = json::array();
    for (const auto& c : checks) j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["tables"] = json::object();
    for (const auto& [name, t] : tables) j["tables"][name] = t.to_json();
    j["details"] = details;
    return j;
}

ScenarioResult evaluate_scenario(const Scenario& s) {
    ScenarioResult r;
    r.id = s.id;
    const auto start = Clock::now();
    switch (s.kind) {
    case ScenarioKind::Classical: evaluate_classical(r, s); break;
    case ScenarioKind::Quantum: evaluate_quantum(r, s); break;
    case ScenarioKind::Topology: evaluate_topology(r, s); break;
    }
    r.details["kind"] = std::string(to_string(s.kind));
    r.details["seed"] = s.seed;
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
}

void write_result(const ScenarioResult& r, const std::filesystem::path& out_dir) {
    const auto dir = out_dir / r.id;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    // Timings stay out of the files so that reruns are byte-identical.
    write_text(dir / "report.json", r.to_json().dump(2) + "\n");
    const auto it = r.tables.find(r.primary);
    write_text(dir / "results.csv", it == r.tables.end() ? std::string() : to_csv(it->second));
}

int run_scenario(const Scenario& s, const std::filesystem::path& out_dir) {
    const auto r = evaluate_scenario(s);
    write_result(r, out_dir);
    return r.ok() ? 0 : 1;
}

const std::vector<std::string>& reproduce_names() {
    static const std::vector<std::string> names{"example1", "example2",  "metricseq",     "midpoint",
                                                "two-point-triple", "shift", "compact-family", "ps-units"};
    return names;
}

ScenarioResult reproduce(std::string_view name, const ReproduceOptions& o) {
    const auto start = Clock::now();
    ScenarioResult r;
    if (name == "example1") {
        r = evaluate_scenario(canned("example1", ScenarioKind::Classical, o,
                                     {{"family", "real-line-0"}, {"n_min", 2}, {"n_max", 10}}));
    } else if (name == "example2") {
        r = evaluate_scenario(canned("example2", ScenarioKind::Classical, o,
                                     {{"family", "real-line-1"}, {"n_min", 2}, {"n_max", 64}}));
    } else if (name == "metricseq") {
        r = reproduce_metricseq(o);
    } else if (name == "midpoint") {
        r = reproduce_midpoint(o);
    } else if (name == "two-point-triple") {
        r = evaluate_scenario(canned("two-point-triple", ScenarioKind::Quantum, o, {{"family", "two-point-triple"}}));
    } else if (name == "shift") {
        r = reproduce_shift(o);
    } else if (name == "compact-family") {
        r = reproduce_compact_family(o);
    } else if (name == "ps-units") {
        r = reproduce_ps_units(o);
    } else {
        throw UnknownScenario("unknown reproduction '" + std::string(name) + "'");
    }
    r.id = std::string(name);
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
}

void print_checks(std::ostream& os, const ScenarioResult& r) {
    for (const auto& c : r.checks) {
        os << (c.pass ? "PASS  " : "FAIL  ") << r.id << ": " << c.name;
        if (!c.detail.empty()) os << "  (" << c.detail << ")";
        os << '\n';
    }
}

std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& report,
                                                  const std::filesystem::path& out_dir) {
    std::ifstream in(report);
    if (!in) throw IoError("cannot read " + report.string());
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw IoError(report.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw IoError(report.string() + ": expected a JSON object");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    if (!doc.contains("tables")) return written;
    if (!doc["tables"].is_object()) throw IoError(report.string() + ": 'tables' must be an object");
    for (const auto& [name, tj] : doc["tables"].items()) {
        if (name.empty() || name.find_first_of("/\\") != std::string::npos) throw IoError("bad table name '" + name + "'");
        const auto path = out_dir / (name + ".csv");
        write_text(path, to_csv(Table::from_json(tj)));
        written.push_back(path);
    }
    return written;
}

} // namespace qlip::harness
