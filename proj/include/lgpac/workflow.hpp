#pragma once

// End-to-end drivers tying documents, compilation, simulation and limit
// extraction together: these are what the command-line tool and the
// acceptance suite call.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lgpac/constructions.hpp"
#include "lgpac/simulate.hpp"

namespace lgpac {

/// Turn a document's textual bindings into evaluable ones.
inline BindingMap document_bindings(const DslDocument& doc) {
    BindingMap out;
    for (const auto& [name, expr] : doc.bindings) {
        const InputDecl* in = doc.network.find_input(name);
        if (!in) throw BindError("bind target '" + name + "' is not a declared input");
        switch (in->kind) {
            case ChannelKind::RScalar:
                out.emplace(name, Binding::r_scalar(ast_eval(expr, 0.0, 0.0)));
                break;
            case ChannelKind::XScalar:
                out.emplace(name, Binding::x_scalar([expr = expr](double x) {
                    return ast_eval(expr, x, 0.0);
                }));
                break;
            case ChannelKind::RStream: {
                AstPtr d = ast_derivative_t(expr);
                out.emplace(name, Binding::r_stream(
                                      [expr = expr](double t) { return ast_eval(expr, 0.0, t); },
                                      [d](double t) { return ast_eval(d, 0.0, t); }));
                break;
            }
            case ChannelKind::XStream: {
                AstPtr d = ast_derivative_t(expr);
                out.emplace(name, Binding::x_stream(
                                      [expr = expr](double t, double x) { return ast_eval(expr, x, t); },
                                      [d](double t, double x) { return ast_eval(d, x, t); }));
                break;
            }
        }
    }
    return out;
}

/// Compile and bind a document against its own grid (extra bindings may
/// supply inputs the document leaves open).
inline BoundNetwork bind_document(const DslDocument& doc, const BindingMap& extra = {}) {
    BindingMap all = document_bindings(doc);
    for (const auto& [k, v] : extra) all.insert_or_assign(k, v);
    return proper_input_binding(doc.network, doc.grid.to_grid(), all);
}

/// Solver defaults used by the drivers; LGPAC_SOLVER_TOL is applied by the
/// command-line tool, not here.
inline SolverConfig default_solver_config() { return SolverConfig{}; }

/// Resolve a network-generated modulus into a tabulated one by simulating the
/// generating network densely up to tau_max. Unnamed references are looked up
/// in the construction catalog. Other representations pass through.
inline Modulus materialize_modulus(const Modulus& m, double tau_max,
                                   SolverConfig cfg = default_solver_config()) {
    if (m.rep() != Modulus::Rep::NetworkGenerated) return m;
    std::shared_ptr<const Network> net = m.network();
    std::string channel = m.network_channel();
    GridPtr grid;
    BindingMap binds;
    if (!net) {
        const Construction* c = find_construction(m.network_name());
        if (!c)
            throw std::invalid_argument("modulus references unknown network '" +
                                        m.network_name() + "'");
        net = std::make_shared<const Network>(c->network());
        channel = c->trace_channel;
        grid = c->grid();
        binds = document_bindings(c->document);
    } else {
        grid = make_point_grid({0.0}, 0.0, 0.0);
    }
    auto bn = proper_input_binding(*net, grid, binds);
    double horizon = std::max(tau_max, 1e-6);
    auto res = simulate(bn, TimeGrid::uniform(horizon, 257), cfg);
    const auto& tr = res.trace(channel);
    std::vector<std::pair<double, double>> pts;
    pts.reserve(res.times.size());
    for (std::size_t i = 0; i < res.times.size(); ++i)
        pts.emplace_back(res.times[i], tr.at(i, 0));
    auto tab = Modulus::tabulated(std::move(pts));
    if (!tab.check_nondecreasing(0.0, horizon))
        throw std::invalid_argument("network-generated modulus is not nondecreasing");
    return tab;
}

/// The metric setup matching a tap: the grid's standard pseudonorm family for
/// function-valued streams, a single-point family for real streams.
inline PseudonormFamily family_for_tap(const CompiledSystem& sys, const LimitTap& tap) {
    if (is_x_kind(tap.input_kind)) return PseudonormFamily::standard(sys.grid());
    return PseudonormFamily::standard(make_point_grid({0.0}, 0.0, 0.0));
}

struct LimitRun {
    std::string output;   // limit module name
    std::string channel;  // probed stream
    CertifiedLimit limit;
};

/// Run the limit workflow for one tap: simulate once to T(tau+1) with the two
/// probe times in the sample set, then certify via the two-probe rule.
inline LimitRun run_certified_limit(const BoundNetwork& bn, const LimitTap& tap,
                                    const Modulus& modulus, double tau,
                                    SolverConfig cfg = default_solver_config(),
                                    const MetricConfig& mcfg = {}) {
    Modulus m = materialize_modulus(modulus, tau + 1.0, cfg);
    if (!m.check_nondecreasing(0.0, tau + 1.0))
        throw std::invalid_argument("limit modulus must be nonnegative and nondecreasing");
    double t1 = m(tau), t2 = m(tau + 1.0);
    auto tg = TimeGrid::uniform(std::max(t2, 1e-6), 201).merged_with({t1, t2});
    auto res = simulate(bn, tg, cfg);

    auto fam = family_for_tap(*bn.system, tap);
    auto probe = [&](double t) -> GridFunction {
        auto sample = grid_sample(res, tap.channel, res.sample_index(t, 1e-9));
        if (is_x_kind(tap.input_kind)) return sample;
        // real-valued stream: collapse onto the single-point family
        return GridFunction::constant(fam.grid, sample.value(0));
    };
    LimitRun run;
    run.output = tap.output;
    run.channel = tap.channel;
    run.limit = continuous_limit(probe, m, tau, fam, mcfg);
    if (!is_x_kind(tap.input_kind))
        run.limit.value = run.limit.grid_value().value(0);
    return run;
}

/// Probe gaps d(u(T(tau)), u(T(tau+1))) for a whole ladder of taus out of one
/// simulation.
inline std::vector<std::pair<double, double>> probe_gaps(
    const BoundNetwork& bn, const std::string& channel, const Modulus& modulus,
    std::span<const double> taus, SolverConfig cfg = default_solver_config(),
    const MetricConfig& mcfg = {}) {
    if (taus.empty()) return {};
    double tau_max = *std::max_element(taus.begin(), taus.end());
    Modulus m = materialize_modulus(modulus, tau_max + 1.0, cfg);
    std::vector<double> probes;
    for (double tau : taus) {
        probes.push_back(m(tau));
        probes.push_back(m(tau + 1.0));
    }
    double horizon = *std::max_element(probes.begin(), probes.end());
    auto tg = TimeGrid::uniform(std::max(horizon, 1e-6), 201).merged_with(probes);
    auto res = simulate(bn, tg, cfg);

    const auto& entry = bn.system->channel(channel);
    PseudonormFamily fam = is_x_kind(entry.kind)
                               ? PseudonormFamily::standard(bn.system->grid())
                               : PseudonormFamily::standard(make_point_grid({0.0}, 0.0, 0.0));
    auto at = [&](double t) -> GridFunction {
        auto sample = grid_sample(res, channel, res.sample_index(t, 1e-9));
        if (is_x_kind(entry.kind)) return sample;
        return GridFunction::constant(fam.grid, sample.value(0));
    };
    std::vector<std::pair<double, double>> out;
    for (double tau : taus)
        out.emplace_back(tau, metric(at(m(tau)), at(m(tau + 1.0)), fam, mcfg));
    return out;
}

struct DocumentLimits {
    std::vector<LimitRun> runs;
    double tau = 0;
};

/// Run every limit module declared in a document.
inline DocumentLimits run_document_limits(const DslDocument& doc, std::optional<double> tau_opt,
                                          SolverConfig cfg = default_solver_config()) {
    double tau = tau_opt ? *tau_opt : doc.directives.tau.value_or(8.0);
    auto bn = bind_document(doc);
    DocumentLimits out;
    out.tau = tau;
    for (const auto& tap : bn.system->taps()) {
        const Modulus* m = doc.network.find_modulus(tap.modulus);
        if (!m) throw std::invalid_argument("limit tap references unknown modulus");
        out.runs.push_back(run_certified_limit(bn, tap, *m, tau, cfg));
    }
    return out;
}

/// Simulate a document with optional horizon/sample overrides.
inline SimulationResult simulate_document(const DslDocument& doc,
                                          std::optional<double> t_end = {},
                                          std::optional<int> samples = {},
                                          SolverConfig cfg = default_solver_config()) {
    double horizon = t_end ? *t_end : doc.directives.t_end.value_or(10.0);
    int n = samples ? *samples : doc.directives.samples.value_or(201);
    auto bn = bind_document(doc);
    return simulate(bn, TimeGrid::uniform(horizon, n), cfg);
}

}  // namespace lgpac
