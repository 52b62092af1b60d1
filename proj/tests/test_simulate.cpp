#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lgpac/simulate.hpp"

using namespace lgpac;

namespace {

Network inverter_network() {
    Network net;
    net.add_input("k", ChannelKind::RScalar);
    net.add_input("b", ChannelKind::RStream);
    net.add_constant("neg1", ChannelKind::RStream, -1.0);
    net.add_multiplier("asq", "inv", "inv");
    net.add_multiplier("nasq", "asq", "neg1");
    net.add_integrator("inv", ChannelKind::RStream, "k", "nasq", "b");
    net.mark_output("inv");
    return net;
}

BindingMap linear_time_bindings(double k) {
    BindingMap b;
    b.emplace("k", Binding::r_scalar(k));
    b.emplace("b", Binding::r_stream([](double t) { return t; }, [](double) { return 1.0; }));
    return b;
}

GridPtr point_grid() { return make_point_grid({0.0}, 0.0, 0.0); }

double max_error_vs(const SimulationResult& res, const std::string& channel,
                    const std::function<double(double)>& exact) {
    const auto& tr = res.trace(channel);
    double worst = 0;
    for (std::size_t i = 0; i < res.times.size(); ++i)
        worst = std::max(worst, std::abs(tr.at(i) - exact(res.times[i])));
    return worst;
}

}  // namespace

TEST_CASE("inverter matches its closed form", "[simulate]") {
    auto bn = proper_input_binding(inverter_network(), point_grid(), linear_time_bindings(1.0));
    auto res = simulate(bn, TimeGrid::uniform(10.0, 501));
    CHECK(max_error_vs(res, "inv", [](double t) { return 1.0 / (1.0 + t); }) < 1e-6);
    CHECK(res.trace("inv").at(res.sample_index(1.0)) == Catch::Approx(0.5).margin(1e-7));
}

TEST_CASE("inverter with k = 0 stays at zero", "[simulate]") {
    auto bn = proper_input_binding(inverter_network(), point_grid(), linear_time_bindings(0.0));
    auto res = simulate(bn, TimeGrid::uniform(5.0, 51));
    CHECK(max_error_vs(res, "inv", [](double) { return 0.0; }) == 0.0);
}

TEST_CASE("integral of 1 dt is linear", "[simulate]") {
    Network net;
    net.add_time("t");
    net.add_constant("one", ChannelKind::RStream, 1.0);
    net.add_constant("c0", ChannelKind::RScalar, 0.5);
    net.add_integrator("w", ChannelKind::RStream, "c0", "one", "t");
    auto bn = proper_input_binding(net, point_grid(), {});
    auto res = simulate(bn, TimeGrid::uniform(4.0, 101));
    CHECK(max_error_vs(res, "w", [](double t) { return 0.5 + t; }) < 1e-12);
}

TEST_CASE("feedback network reproduces x exp(tx)", "[simulate]") {
    Network net;
    net.add_input("g", ChannelKind::XScalar);
    net.add_input("u1", ChannelKind::XStream);
    net.add_constant("xid", ChannelKind::XStream, ast_variable("x"));
    net.add_integrator("w", ChannelKind::XStream, "g", "w", "u1");
    net.add_multiplier("prod", "w", "xid");

    auto grid = make_uniform_grid(0.0, 2.0, 0.5);
    BindingMap b;
    b.emplace("g", Binding::x_scalar(GridFunction::constant(grid, 1.0)));
    b.emplace("u1", Binding::x_stream([](double t, double x) { return t * x; },
                                      [](double, double x) { return x; }));
    auto bn = proper_input_binding(net, grid, b);
    auto res = simulate(bn, TimeGrid::uniform(2.0, 101));

    double worst = 0;
    const auto& tr = res.trace("prod");
    for (std::size_t ti = 0; ti < res.times.size(); ++ti)
        for (std::size_t p = 0; p < grid->size(); ++p) {
            double x = grid->point(p);
            double exact = x * std::exp(res.times[ti] * x);
            worst = std::max(worst, std::abs(tr.at(ti, static_cast<int>(p)) - exact));
        }
    CHECK(worst < 1e-5);
}

TEST_CASE("channel evaluation interpolates exactly at nodes", "[simulate]") {
    auto bn = proper_input_binding(inverter_network(), point_grid(), linear_time_bindings(1.0));
    auto res = simulate(bn, TimeGrid::uniform(10.0, 201));
    double node_t = res.times[37];
    double stored = res.trace("inv").at(37);
    CHECK(std::get<double>(evaluate_channel(res, "inv", node_t)) == stored);
    CHECK(std::get<double>(evaluate_channel(res, "inv", 3.0)) == Catch::Approx(0.25).margin(1e-6));
    // off-node evaluation stays close to the closed form
    CHECK(std::get<double>(evaluate_channel(res, "inv", 3.017)) ==
          Catch::Approx(1.0 / 4.017).margin(1e-5));
    CHECK_THROWS_AS(evaluate_channel(res, "inv", 11.0), std::out_of_range);
    CHECK_THROWS_AS(evaluate_channel(res, "ghost", 1.0), std::out_of_range);
}

TEST_CASE("fixed RK4 converges at fourth order", "[simulate]") {
    auto bn = proper_input_binding(inverter_network(), point_grid(), linear_time_bindings(1.0));
    auto exact = [](double t) { return 1.0 / (1.0 + t); };

    SolverConfig coarse;
    coarse.method = SolverMethod::RK4Fixed;
    coarse.h_init = 0.2;
    coarse.h_max = 0.2;
    SolverConfig fine = coarse;
    fine.h_init = 0.1;

    auto tg = TimeGrid::uniform(10.0, 51);
    double e_coarse = max_error_vs(simulate(bn, tg, coarse), "inv", exact);
    double e_fine = max_error_vs(simulate(bn, tg, fine), "inv", exact);
    double ratio = e_coarse / e_fine;
    INFO("errors " << e_coarse << " / " << e_fine << " ratio " << ratio);
    CHECK(ratio > 8.0);
    CHECK(ratio < 32.0);
}

TEST_CASE("adaptive solver meets its tolerance", "[simulate]") {
    auto bn = proper_input_binding(inverter_network(), point_grid(), linear_time_bindings(1.0));
    SolverConfig cfg;
    cfg.abs_tol = 1e-9;
    cfg.rel_tol = 1e-9;
    auto res = simulate(bn, TimeGrid::uniform(10.0, 201), cfg);
    const auto& tr = res.trace("inv");
    for (std::size_t i = 0; i < res.times.size(); ++i) {
        double exact = 1.0 / (1.0 + res.times[i]);
        CHECK(std::abs(tr.at(i) - exact) <= 10 * (cfg.abs_tol + cfg.rel_tol * std::abs(exact)));
    }
}

TEST_CASE("grid points evolve independently", "[simulate]") {
    // u' = x u per grid point; fixed steps make the union of two grids
    // bitwise equal to the runs on each part
    auto build = [](const GridPtr& grid) {
        Network net;
        net.add_time("t");
        net.add_constant("one", ChannelKind::XScalar, 1.0);
        net.add_constant("xid", ChannelKind::XStream, ast_variable("x"));
        net.add_multiplier("xu", "xid", "u");
        net.add_integrator("u", ChannelKind::XStream, "one", "xu", "t");
        return proper_input_binding(net, grid, {});
    };
    SolverConfig cfg;
    cfg.method = SolverMethod::RK4Fixed;
    cfg.h_init = 0.05;
    auto tg = TimeGrid::uniform(1.0, 21);

    auto g1 = make_point_grid({0.0, 0.5}, 0.0, 2.0);
    auto g2 = make_point_grid({1.0, 2.0}, 0.0, 2.0);
    auto gu = make_point_grid({0.0, 0.5, 1.0, 2.0}, 0.0, 2.0);

    auto r1 = simulate(build(g1), tg, cfg);
    auto r2 = simulate(build(g2), tg, cfg);
    auto ru = simulate(build(gu), tg, cfg);

    const auto& t1 = r1.trace("u");
    const auto& t2 = r2.trace("u");
    const auto& tu = ru.trace("u");
    for (std::size_t ti = 0; ti < ru.times.size(); ++ti) {
        CHECK(tu.at(ti, 0) == t1.at(ti, 0));
        CHECK(tu.at(ti, 1) == t1.at(ti, 1));
        CHECK(tu.at(ti, 2) == t2.at(ti, 0));
        CHECK(tu.at(ti, 3) == t2.at(ti, 1));
    }
}

TEST_CASE("integration is linear in the integrand", "[simulate]") {
    auto build = [](double c, bool both) {
        Network net;
        net.add_time("t");
        net.add_constant("cinit", ChannelKind::RScalar, c);
        net.add_constant("one", ChannelKind::RStream, 1.0);
        // u1 = t (via an integrator), u2 = sin-free polynomial t*t
        net.add_integrator("tx", ChannelKind::RStream, "czero", "one", "t");
        net.add_constant("czero", ChannelKind::RScalar, 0.0);
        net.add_multiplier("tsq", "tx", "tx");
        if (both) {
            net.add_adder("integrand", "tx", "tsq");
            net.add_integrator("w", ChannelKind::RStream, "cinit", "integrand", "t");
        } else {
            net.add_integrator("w", ChannelKind::RStream, "cinit", "tsq", "t");
        }
        return proper_input_binding(net, point_grid(), {});
    };
    auto build_u1 = [](double c) {
        Network net;
        net.add_time("t");
        net.add_constant("cinit", ChannelKind::RScalar, c);
        net.add_constant("czero", ChannelKind::RScalar, 0.0);
        net.add_constant("one", ChannelKind::RStream, 1.0);
        net.add_integrator("tx", ChannelKind::RStream, "czero", "one", "t");
        net.add_integrator("w", ChannelKind::RStream, "cinit", "tx", "t");
        return proper_input_binding(net, point_grid(), {});
    };

    SolverConfig cfg;
    auto tg = TimeGrid::uniform(3.0, 61);
    auto sum = simulate(build(1.0, true), tg, cfg);
    auto part1 = simulate(build_u1(1.0), tg, cfg);
    auto part2 = simulate(build(0.0, false), tg, cfg);

    double tol = 5 * (cfg.abs_tol + cfg.rel_tol * 12.0);
    for (std::size_t ti = 0; ti < sum.times.size(); ++ti) {
        double lhs = sum.trace("w").at(ti);
        double rhs = part1.trace("w").at(ti) + part2.trace("w").at(ti);
        CHECK(std::abs(lhs - rhs) <= tol);
    }
}

TEST_CASE("finite-time blow-up stops with the frontier time", "[simulate]") {
    // a' = a^2, a(0) = 1 diverges at t = 1
    Network net;
    net.add_input("b", ChannelKind::RStream);
    net.add_constant("k", ChannelKind::RScalar, 1.0);
    net.add_constant("neg1", ChannelKind::RStream, -1.0);
    net.add_multiplier("asq", "inv", "inv");
    net.add_multiplier("nasq", "asq", "neg1");
    net.add_integrator("inv", ChannelKind::RStream, "k", "nasq", "b");
    BindingMap b;
    b.emplace("b", Binding::r_stream([](double t) { return -t; }, [](double) { return -1.0; }));
    auto bn = proper_input_binding(net, point_grid(), b);
    try {
        simulate(bn, TimeGrid::uniform(1.2, 121));
        FAIL("expected SimulationError");
    } catch (const SimulationError& e) {
        CHECK(e.last_valid_time > 0.9);
        CHECK(e.last_valid_time <= 1.05);
    }
}
