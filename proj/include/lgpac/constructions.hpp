#pragma once

// Catalog of built-in networks: the inverter and time-warp primitives, the
// two-part gamma pipeline, and the six-step zeta pipeline, each carried as
// network-description source text (so the catalog, the parser and the shipped
// example files can never drift apart) together with reference oracles and
// recommended moduli.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lgpac/dsl.hpp"
#include "lgpac/oracles.hpp"

namespace lgpac {

struct Construction {
    std::string name;
    std::string source;
    DslDocument document;
    // closed-form or quadrature reference for one designated stream channel,
    // valid under the document's default bindings
    std::string trace_channel;
    std::function<double(double t, double x)> trace_oracle;
    // reference for the limit value (entries ending in a limit module)
    std::function<double(double x)> limit_oracle;

    [[nodiscard]] GridPtr grid() const { return document.grid.to_grid(); }
    [[nodiscard]] const Network& network() const { return document.network; }
};

namespace detail {

inline std::string gamma_source(const std::string& grid_line) {
    std::string s;
    s += "# gamma: two-part integral pipeline whose limit is the gamma function\n";
    s += grid_line + "\n";
    s += "\n";
    s += "modulus mgamma = exp2 3\n";
    s += "\n";
    s += "time t\n";
    s += "const onex : xstream = 1\n";
    s += "const neg1x : xstream = -1\n";
    s += "const neg2x : xstream = -2\n";
    s += "const xid : xstream = x\n";
    s += "const zerox : xscalar = 0\n";
    s += "const onexs : xscalar = 1\n";
    s += "const einv : xscalar = exp(-1)\n";
    s += "\n";
    s += "# t as an x-stream\n";
    s += "integrator tx : xstream { c = zerox; u = onex; v = t }\n";
    s += "\n";
    s += "# sd = 1/(1+t), inverter loop\n";
    s += "mul sdsq { a = sd; b = sd }\n";
    s += "mul nsdsq { a = sdsq; b = neg1x }\n";
    s += "integrator sd : xstream { c = onexs; u = nsdsq; v = t }\n";
    s += "\n";
    s += "# u1 = -(x + x t + t) sd^2\n";
    s += "mul xt { a = xid; b = tx }\n";
    s += "add xpxt { a = xid; b = xt }\n";
    s += "add poly1 { a = xpxt; b = tx }\n";
    s += "mul num1 { a = poly1; b = sdsq }\n";
    s += "mul u1 { a = num1; b = neg1x }\n";
    s += "\n";
    s += "# g1'' = u1 g1'\n";
    s += "mul g1pp { a = u1; b = g1p }\n";
    s += "integrator g1p : xstream { c = einv; u = g1pp; v = t }\n";
    s += "integrator g1 : xstream { c = zerox; u = g1p; v = t }\n";
    s += "\n";
    s += "# u2 = (x - t - 2) sd\n";
    s += "mul negt { a = tx; b = neg1x }\n";
    s += "add xm2 { a = xid; b = neg2x }\n";
    s += "add poly2 { a = xm2; b = negt }\n";
    s += "mul u2 { a = poly2; b = sd }\n";
    s += "\n";
    s += "# g2'' = u2 g2'\n";
    s += "mul g2pp { a = u2; b = g2p }\n";
    s += "integrator g2p : xstream { c = einv; u = g2pp; v = t }\n";
    s += "integrator g2 : xstream { c = zerox; u = g2p; v = t }\n";
    s += "\n";
    s += "add gammasum { a = g1; b = g2 }\n";
    s += "limit gamma { in = gammasum; modulus = mgamma }\n";
    s += "\n";
    s += "output gamma\n";
    s += "\n";
    s += "precision tau = 8\n";
    s += "simulate t_end = 1536 samples = 385\n";
    return s;
}

inline std::string zeta_source(const std::string& grid_line) {
    std::string s;
    s += "# zeta: bounded Abel-Plana integral whose limit is the zeta function\n";
    s += grid_line + "\n";
    s += "\n";
    s += "modulus mzeta = linear 1\n";
    s += "\n";
    s += "time t\n";
    s += "const onex : xstream = 1\n";
    s += "const neg1x : xstream = -1\n";
    s += "const xid : xstream = x\n";
    s += "const negx : xstream = -x\n";
    s += "const negpix : xstream = -pi\n";
    s += "const zerox : xscalar = 0\n";
    s += "const onexs : xscalar = 1\n";
    s += "const einv : xscalar = exp(-1)\n";
    s += "const chead : xscalar = 2^x / (x - 1)\n";
    s += "const negp2x : xstream = -2^x\n";
    s += "\n";
    s += "# t as an x-stream\n";
    s += "integrator tx : xstream { c = zerox; u = onex; v = t }\n";
    s += "\n";
    s += "# step 1: q = 1/(1+t^2), inverter against b = t^2\n";
    s += "mul tsq { a = t; b = t }\n";
    s += "mul qsq { a = q; b = q }\n";
    s += "mul nqsq { a = qsq; b = neg1x }\n";
    s += "integrator q : xstream { c = onexs; u = nqsq; v = tsq }\n";
    s += "\n";
    s += "# step 2: at = arctan t\n";
    s += "integrator at : xstream { c = zerox; u = q; v = t }\n";
    s += "\n";
    s += "# step 3: sine pair on theta = x arctan t\n";
    s += "mul theta { a = xid; b = at }\n";
    s += "mul negs { a = s; b = neg1x }\n";
    s += "integrator s : xstream { c = zerox; u = co; v = theta }\n";
    s += "integrator co : xstream { c = onexs; u = negs; v = theta }\n";
    s += "\n";
    s += "# step 4: pw = (1+t^2)^(-x/2)\n";
    s += "mul pm1 { a = q; b = negx }\n";
    s += "mul pm2 { a = pm1; b = tx }\n";
    s += "mul pm3 { a = pm2; b = pw }\n";
    s += "integrator pw : xstream { c = onexs; u = pm3; v = t }\n";
    s += "\n";
    s += "# step 5: ex = exp(-pi t - 1)\n";
    s += "mul expi { a = ex; b = negpix }\n";
    s += "integrator ex : xstream { c = einv; u = expi; v = t }\n";
    s += "\n";
    s += "# step 6: zeta2 = s pw ex\n";
    s += "mul spw { a = s; b = pw }\n";
    s += "mul zeta2 { a = spw; b = ex }\n";
    s += "\n";
    s += "# zeta1 = 2^x/(x-1) - 2^x INT zeta2 dt\n";
    s += "mul integrand { a = zeta2; b = negp2x }\n";
    s += "integrator zeta1 : xstream { c = chead; u = integrand; v = t }\n";
    s += "\n";
    s += "limit zeta { in = zeta1; modulus = mzeta }\n";
    s += "\n";
    s += "output zeta\n";
    s += "\n";
    s += "precision tau = 16\n";
    s += "simulate t_end = 17 samples = 341\n";
    return s;
}

inline std::string slice_before(const std::string& full, const char* marker,
                                const std::string& tail) {
    auto pos = full.find(marker);
    if (pos == std::string::npos)
        throw std::logic_error("construction source slice: marker not found");
    return full.substr(0, pos) + tail;
}

inline DslDocument parse_or_die(const std::string& src, const std::string& name) {
    auto res = parse(src);
    if (!res.ok() || !res.document) {
        std::string msg = "internal construction '" + name + "' fails to parse:";
        for (const auto& d : res.diagnostics)
            msg += "\n  line " + std::to_string(d.line) + ": " + d.message;
        throw std::logic_error(msg);
    }
    return std::move(*res.document);
}

inline Construction make_entry(std::string name, std::string src, std::string trace_channel,
                               std::function<double(double, double)> trace_oracle,
                               std::function<double(double)> limit_oracle = {}) {
    Construction c;
    c.document = parse_or_die(src, name);
    c.name = std::move(name);
    c.source = std::move(src);
    c.trace_channel = std::move(trace_channel);
    c.trace_oracle = std::move(trace_oracle);
    c.limit_oracle = std::move(limit_oracle);
    return c;
}

inline std::vector<Construction> build_catalog() {
    std::vector<Construction> cat;

    cat.push_back(make_entry(
        "inverter",
        "# inverter: a' = -a^2 b', a(0) = k; under the default bindings a = 1/(1+t)\n"
        "grid [0, 1] step 1\n"
        "\n"
        "input k : rscalar\n"
        "input b : rstream\n"
        "\n"
        "const neg1 : rstream = -1\n"
        "mul asq { a = inv; b = inv }\n"
        "mul nasq { a = asq; b = neg1 }\n"
        "integrator inv : rstream { c = k; u = nasq; v = b }\n"
        "\n"
        "output inv\n"
        "\n"
        "bind k = 1\n"
        "bind b = t\n"
        "simulate t_end = 10 samples = 501\n",
        "inv", [](double t, double) { return 1.0 / (1.0 + t); }));

    cat.push_back(make_entry(
        "slowdown",
        "# slowdown: warps [0, inf) into [0, 1) as t/(1+t)\n"
        "grid [0, 1] step 1\n"
        "\n"
        "time t\n"
        "const onek : rscalar = 1\n"
        "const neg1 : rstream = -1\n"
        "mul asq { a = sd; b = sd }\n"
        "mul nasq { a = asq; b = neg1 }\n"
        "integrator sd : rstream { c = onek; u = nasq; v = t }\n"
        "mul slowdown { a = sd; b = t }\n"
        "\n"
        "output slowdown\n"
        "\n"
        "simulate t_end = 10 samples = 501\n",
        "slowdown", [](double t, double) { return t / (1.0 + t); }));

    cat.push_back(make_entry(
        "speedup",
        "# speedup: warps [0, 1) into [0, inf) as t/(1-t); diverges at t = 1\n"
        "grid [0, 1] step 1\n"
        "\n"
        "time t\n"
        "const onek : rscalar = 1\n"
        "const neg1 : rstream = -1\n"
        "mul negt { a = t; b = neg1 }\n"
        "mul asq { a = su; b = su }\n"
        "mul nasq { a = asq; b = neg1 }\n"
        "integrator su : rstream { c = onek; u = nasq; v = negt }\n"
        "mul speedup { a = su; b = t }\n"
        "\n"
        "output speedup\n"
        "\n"
        "simulate t_end = 0.9 samples = 451\n",
        "speedup", [](double t, double) { return t / (1.0 - t); }));

    cat.push_back(make_entry(
        "exp_feedback",
        "# exp_feedback: w = g + INT w du1 solved by w = g exp(u1 - u1(0))\n"
        "grid [0, 2] step 0.5\n"
        "\n"
        "input g : xscalar\n"
        "input u1 : xstream\n"
        "\n"
        "const xid : xstream = x\n"
        "integrator w : xstream { c = g; u = w; v = u1 }\n"
        "mul prod { a = w; b = xid }\n"
        "\n"
        "output prod\n"
        "\n"
        "bind g = 1\n"
        "bind u1 = t*x\n"
        "simulate t_end = 2 samples = 201\n",
        "prod", [](double t, double x) { return x * std::exp(t * x); }));

    // gamma pipeline and its published pieces
    const std::string gamma_grid = "grid [1, inf] step 0.25 upto 6";
    std::string gamma_full = gamma_source(gamma_grid);

    cat.push_back(make_entry(
        "gamma_u1",
        slice_before(gamma_full, "# g1'' = ",
                     "output u1\n\nsimulate t_end = 24 samples = 193\n"),
        "u1",
        [](double t, double x) { return -(x + x * t + t) / ((1.0 + t) * (1.0 + t)); }));

    cat.push_back(make_entry(
        "gamma1",
        slice_before(gamma_full, "# u2 = ", "output g1\n\nsimulate t_end = 24 samples = 193\n"),
        "g1", [](double t, double x) { return gamma1_partial(t, x); }));

    {
        // u2/g2 standalone sources: drop the u1/g1 blocks from the full text
        std::string head = slice_before(gamma_full, "# u1 = ", "");
        auto tail_from = [&](const char* marker) {
            auto pos = gamma_full.find(marker);
            if (pos == std::string::npos) throw std::logic_error("gamma slice: marker not found");
            return gamma_full.substr(pos);
        };
        std::string u2_src =
            head + slice_before(tail_from("# u2 = "), "# g2'' = ",
                                "output u2\n\nsimulate t_end = 24 samples = 193\n");
        cat.push_back(make_entry(
            "gamma_u2", u2_src, "u2",
            [](double t, double x) { return (x - t - 2.0) / (1.0 + t); }));

        std::string g2_src =
            head + slice_before(tail_from("# u2 = "), "add gammasum",
                                "output g2\n\nsimulate t_end = 24 samples = 193\n");
        cat.push_back(make_entry("gamma2", g2_src, "g2",
                                 [](double t, double x) { return gamma2_partial(t, x); }));
    }

    cat.push_back(make_entry(
        "gamma", gamma_full, "gammasum",
        [](double t, double x) { return gamma1_partial(t, x) + gamma2_partial(t, x); },
        [](double x) { return gamma_oracle(x); }));

    // zeta pipeline and its six steps
    const std::string zeta_grid = "grid [2, inf] step 0.25 upto 6";
    std::string zeta_full = zeta_source(zeta_grid);

    cat.push_back(make_entry(
        "zeta_step1",
        slice_before(zeta_full, "# step 2: ", "output q\n\nsimulate t_end = 10 samples = 201\n"),
        "q", [](double t, double) { return 1.0 / (1.0 + t * t); }));

    cat.push_back(make_entry(
        "zeta_step2",
        slice_before(zeta_full, "# step 3: ", "output at\n\nsimulate t_end = 10 samples = 201\n"),
        "at", [](double t, double) { return std::atan(t); }));

    cat.push_back(make_entry(
        "zeta_step3",
        slice_before(zeta_full, "# step 4: ", "output s\n\nsimulate t_end = 10 samples = 201\n"),
        "s", [](double t, double x) { return std::sin(x * std::atan(t)); }));

    cat.push_back(make_entry(
        "zeta_step4",
        slice_before(zeta_full, "# step 5: ", "output pw\n\nsimulate t_end = 10 samples = 201\n"),
        "pw", [](double t, double x) { return std::pow(1.0 + t * t, -x / 2.0); }));

    {
        // step 5 does not need steps 1-4; compose it from the prologue
        std::string head = slice_before(zeta_full, "# t as an x-stream", "");
        auto pos = zeta_full.find("# step 5: ");
        auto end = zeta_full.find("# step 6: ");
        std::string body = zeta_full.substr(pos, end - pos);
        cat.push_back(make_entry(
            "zeta_step5", head + body + "output ex\n\nsimulate t_end = 10 samples = 201\n", "ex",
            [](double t, double) { return std::exp(-M_PI * t - 1.0); }));
    }

    cat.push_back(make_entry(
        "zeta_step6",
        slice_before(zeta_full, "# zeta1 = ",
                     "output zeta2\n\nsimulate t_end = 10 samples = 201\n"),
        "zeta2", [](double t, double x) { return zeta2_closed(t, x); }));

    cat.push_back(make_entry(
        "zeta1",
        slice_before(zeta_full, "limit zeta",
                     "output zeta1\n\nsimulate t_end = 17 samples = 341\n"),
        "zeta1", [](double t, double x) { return zeta1_partial(t, x); }));

    cat.push_back(make_entry(
        "zeta", zeta_full, "zeta1",
        [](double t, double x) { return zeta1_partial(t, x); },
        [](double x) { return zeta_oracle(x); }));

    return cat;
}

}  // namespace detail

inline const std::vector<Construction>& construction_catalog() {
    static const std::vector<Construction> catalog = detail::build_catalog();
    return catalog;
}

inline const Construction* find_construction(std::string_view name) {
    for (const auto& c : construction_catalog())
        if (c.name == name) return &c;
    return nullptr;
}

inline Network build_inverter() { return find_construction("inverter")->network(); }
inline Network build_speedup() { return find_construction("speedup")->network(); }
inline Network build_slowdown() { return find_construction("slowdown")->network(); }

/// Gamma pipeline on [1, gridK], returned with its recommended exponential
/// modulus.
inline std::pair<Network, Modulus> build_gamma(double gridK = 6.0) {
    if (!(gridK >= 1.0)) throw std::invalid_argument("build_gamma: gridK must be at least 1");
    std::string grid_line = "grid [1, inf] step 0.25 upto " + format_double(gridK);
    auto doc = detail::parse_or_die(detail::gamma_source(grid_line), "gamma");
    return {doc.network, *doc.network.find_modulus("mgamma")};
}

/// Zeta pipeline on [2, gridK], returned with its recommended linear modulus.
inline std::pair<Network, Modulus> build_zeta(double gridK = 6.0) {
    if (!(gridK >= 2.0)) throw std::invalid_argument("build_zeta: gridK must be at least 2");
    std::string grid_line = "grid [2, inf] step 0.25 upto " + format_double(gridK);
    auto doc = detail::parse_or_die(detail::zeta_source(grid_line), "zeta");
    return {doc.network, *doc.network.find_modulus("mzeta")};
}

// --- analytic tail bounds ----------------------------------------------------

/// Gap bound for the slowly decaying gamma part past horizon T (any
/// pseudonorm index).
inline double gamma1_tail_bound(double T) {
    return T > 0 ? 1.0 / T : std::numeric_limits<double>::infinity();
}

/// Gap bound for the fast gamma part on x in [1, k+1] past horizon T:
/// (k+1)! (T+1)^k e^{-(T+1)}.
inline double gamma2_tail_bound(int k, double T) {
    double fact = 1;
    for (int i = 2; i <= k + 1; ++i) fact *= i;
    return fact * std::pow(T + 1.0, k) * std::exp(-(T + 1.0));
}

/// Gap bound for the Abel-Plana integral on x in [2, k] past horizon T:
/// (2^k / (e pi)) e^{-pi T}.
inline double zeta_tail_bound(int k, double T) {
    return std::exp2(k) / (M_E * M_PI) * std::exp(-M_PI * T);
}

/// Analytic per-index tail bounds at T = modulus(tau) plus the aggregated
/// metric bound 2^-tau.
struct ErrorBudget {
    std::string construction;
    double tau = 0;
    double horizon = 0;       // T = modulus(tau)
    double metric_bound = 0;  // 2^-tau
    struct Row {
        int k;
        double part1;  // slow part (gamma only)
        double part2;  // fast / oscillatory part
        double total;
    };
    std::vector<Row> rows;

    [[nodiscard]] const Row& row(int k) const {
        for (const auto& r : rows)
            if (r.k == k) return r;
        throw std::out_of_range("ErrorBudget: no such pseudonorm index");
    }
};

inline ErrorBudget certified_error_budget(std::string_view construction, double tau) {
    if (tau < 0) throw std::invalid_argument("certified_error_budget: tau must be nonnegative");
    ErrorBudget b;
    b.construction = std::string(construction);
    b.tau = tau;
    b.metric_bound = std::exp2(-tau);
    if (construction == "gamma") {
        b.horizon = 3.0 * std::exp2(tau);
        for (int k = 0; k <= 5; ++k) {
            double p1 = gamma1_tail_bound(b.horizon);
            double p2 = gamma2_tail_bound(k, b.horizon);
            b.rows.push_back({k, p1, p2, p1 + p2});
        }
        return b;
    }
    if (construction == "zeta") {
        b.horizon = tau;
        for (int k = 2; k <= 6; ++k) {
            double p2 = zeta_tail_bound(k, b.horizon);
            b.rows.push_back({k, 0.0, p2, p2});
        }
        return b;
    }
    throw std::invalid_argument("certified_error_budget: unknown construction '" +
                                std::string(construction) + "'");
}

}  // namespace lgpac
