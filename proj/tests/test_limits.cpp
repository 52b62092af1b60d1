#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lgpac/limits.hpp"
#include "lgpac/simulate.hpp"

using namespace lgpac;

namespace {

GridPtr point_grid() { return make_point_grid({0.0}, 0.0, 0.0); }

// u(t) = 1 - e^{-t} as a one-integrator network: E' = -E, u = 1 - E
std::function<GridFunction(double)> saturating_probe() {
    Network net;
    net.add_time("t");
    net.add_constant("one", ChannelKind::RStream, 1.0);
    net.add_constant("cone", ChannelKind::RScalar, 1.0);
    net.add_constant("neg1", ChannelKind::RStream, -1.0);
    net.add_multiplier("negE", "E", "neg1");
    net.add_integrator("E", ChannelKind::RStream, "cone", "negE", "t");
    net.add_adder("u", "one", "negE");
    auto bn = proper_input_binding(net, point_grid(), {});
    return [bn](double t) {
        auto res = simulate(bn, TimeGrid::uniform(std::max(t, 1e-6), 33).merged_with({t}));
        return grid_sample(res, "u", res.sample_index(t));
    };
}

}  // namespace

TEST_CASE("modulus representations", "[limits]") {
    auto lin = Modulus::linear(2.0, 1.0);
    CHECK(lin(3.0) == 7.0);
    auto e2 = Modulus::exp2(3.0);
    CHECK(e2(8.0) == 3.0 * 256.0);
    auto tab = Modulus::tabulated({{0.0, 1.0}, {1.0, 2.0}, {2.0, 8.0}});
    CHECK(tab(0.5) == 1.5);
    CHECK(tab(5.0) == 8.0);  // clamps
    CHECK_THROWS_AS(Modulus::tabulated({{0.0, 2.0}, {1.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(Modulus::linear(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(lin(-1.0), std::invalid_argument);

    auto disc = Modulus::linear(1.0, 2.0, Modulus::Flavor::Discrete);
    CHECK(disc.at_index(3) == 5);

    auto netref = Modulus::from_named_network("slowdown");
    CHECK_THROWS_AS(netref(1.0), std::logic_error);

    CHECK(lin.check_nondecreasing(0.0, 10.0));
    auto bad = Modulus::callable([](double t) { return -t; }, Modulus::Flavor::Continuous);
    CHECK_FALSE(bad.check_nondecreasing(0.0, 10.0));
}

TEST_CASE("continuous limit certifies a saturating stream", "[limits]") {
    auto probe = saturating_probe();
    // |u(s) - u(t)| <= e^{-T(tau)} = e^{-1} 2^{-tau} < 2^{-tau} for T(tau) = tau ln2 + 1
    auto modulus = Modulus::linear(std::log(2.0), 1.0);
    auto grid = point_grid();
    auto fam = PseudonormFamily::standard(grid);

    auto lim = continuous_limit(probe, modulus, 10.0, fam);
    CHECK(lim.certified);
    CHECK(lim.bound == std::exp2(-10.0));
    CHECK(lim.empirical_gap < lim.bound);
    CHECK(std::abs(lim.grid_value().value(0) - 1.0) < std::exp2(-10.0));

    // certifying at tau implies certifying at every smaller tau here
    for (double tau : {1.0, 3.0, 5.0, 7.0, 9.0})
        CHECK(continuous_limit(probe, modulus, tau, fam).certified);
}

TEST_CASE("continuous limit of a constant stream", "[limits]") {
    auto grid = make_uniform_grid(1.0, 4.0, 0.5);
    auto fam = PseudonormFamily::standard(grid);
    auto g = GridFunction::sample(grid, [](double x) { return std::cos(x); });
    auto probe = [g](double) { return g; };
    for (double tau : {0.0, 4.0, 12.0, 30.0}) {
        auto lim = continuous_limit(probe, Modulus::identity(), tau, fam);
        CHECK(lim.certified);
        CHECK(lim.empirical_gap == 0.0);
        CHECK(lim.grid_value().values()[3] == g.values()[3]);
    }
}

TEST_CASE("continuous limit rejects bad moduli", "[limits]") {
    auto probe = [](double) { return GridFunction::constant(point_grid(), 0.0); };
    auto fam = PseudonormFamily::standard(point_grid());
    CHECK_THROWS_AS(continuous_limit(probe, Modulus::identity(), -1.0, fam),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        continuous_limit(probe, Modulus::identity(Modulus::Flavor::Discrete), 1.0, fam),
        std::invalid_argument);
    auto decreasing = Modulus::callable([](double t) { return 10.0 - t; },
                                        Modulus::Flavor::Continuous);
    CHECK_THROWS_AS(continuous_limit(probe, decreasing, 1.0, fam), std::invalid_argument);
}

TEST_CASE("discrete limit of geometric partial sums", "[limits]") {
    auto grid = make_uniform_grid(2.0, 3.0, 0.125);
    auto fam = PseudonormFamily::standard(grid);

    // g_n(x) = sum_{k<=n} x^{-k} -> x/(x-1); tail <= 2^{-(n-1)} on x >= 2
    std::vector<GridFunction> seq;
    for (int n = 0; n <= 16; ++n)
        seq.push_back(GridFunction::sample(grid, [n](double x) {
            double s = 0;
            for (int k = 0; k <= n; ++k) s += std::pow(x, -k);
            return s;
        }));

    auto modulus = Modulus::linear(1.0, 2.0, Modulus::Flavor::Discrete);  // N(nu) = nu + 2
    for (int nu = 1; nu <= 8; ++nu) {
        auto lim = discrete_limit(seq, modulus, nu, fam);
        CHECK(lim.certified);
        const auto& got = lim.grid_value();
        for (std::size_t i = 0; i < grid->size(); ++i) {
            double x = grid->point(i);
            CHECK(std::abs(got.value(i) - x / (x - 1)) < std::exp2(-nu));
        }
    }

    CHECK_THROWS_AS(discrete_limit(seq, modulus, 20, fam), std::out_of_range);
}

TEST_CASE("discrete limit of a constant sequence", "[limits]") {
    auto grid = make_uniform_grid(1.0, 3.0, 0.5);
    auto fam = PseudonormFamily::standard(grid);
    auto g = GridFunction::sample(grid, [](double x) { return x * x; });
    std::vector<GridFunction> seq(12, g);
    auto lim = discrete_limit(seq, Modulus::identity(Modulus::Flavor::Discrete), 6, fam);
    CHECK(lim.certified);
    CHECK(lim.empirical_gap == 0.0);
}

TEST_CASE("alternating sequence is never certified", "[limits]") {
    auto grid = make_uniform_grid(1.0, 3.0, 0.5);
    auto fam = PseudonormFamily::standard(grid);
    std::vector<GridFunction> seq;
    for (int n = 0; n < 24; ++n)
        seq.push_back(GridFunction::constant(grid, n % 2 == 0 ? 1.0 : -1.0));
    for (int nu = 1; nu <= 8; ++nu) {
        auto lim = discrete_limit(seq, Modulus::identity(Modulus::Flavor::Discrete), nu, fam);
        CHECK_FALSE(lim.certified);
    }
}

TEST_CASE("reindexing composes with the modulus", "[limits]") {
    auto grid = point_grid();
    // identity leaves the stream alone
    auto u = [grid](double t) { return GridFunction::constant(grid, 1.0 / (1.0 + t)); };
    auto r_id = reindex_by_modulus(std::function<GridFunction(double)>(u), Modulus::identity());
    CHECK(r_id(3.0).value(0) == u(3.0).value(0));

    // N(n) = 2n on g_n = 1/(n+1) gives 1/(2n+1)
    auto g = [grid](int n) { return GridFunction::constant(grid, 1.0 / (n + 1)); };
    auto r2 = reindex_by_modulus(std::function<GridFunction(int)>(g),
                                 Modulus::linear(2.0, 0.0, Modulus::Flavor::Discrete));
    for (int n = 0; n < 6; ++n) CHECK(r2(n).value(0) == 1.0 / (2 * n + 1));
}

TEST_CASE("modulus conversion formulas", "[limits]") {
    // shifted argument: identity modulus gives n + nu
    auto pn_disc = metric_to_pseudonorm_modulus(Modulus::identity(Modulus::Flavor::Discrete));
    CHECK(pn_disc.at_index(2, 3) == 5);

    auto pn_cont = metric_to_pseudonorm_modulus(Modulus::exp2(3.0));
    CHECK(pn_cont(1, 4.0) == 3.0 * std::exp2(5.0));

    // max over sections: M(n, nu) = n + nu gives N(nu) = 2 nu + 2
    PseudonormModulus add_sections(Modulus::Flavor::Discrete,
                                   [](int n, double nu) { return n + nu; });
    auto back = pseudonorm_to_metric_modulus(add_sections);
    for (int nu = 0; nu <= 6; ++nu) CHECK(back.at_index(nu) == 2 * nu + 2);

    // M(n, tau) = n tau gives T(tau) = floor(tau + 2) (tau + 1)
    PseudonormModulus mul_sections(Modulus::Flavor::Continuous,
                                   [](int n, double tau) { return n * tau; });
    auto back_c = pseudonorm_to_metric_modulus(mul_sections);
    CHECK(back_c(3.0) == 5.0 * 4.0);
    CHECK(back_c(3.5) == 5.0 * 4.5);

    // conversions preserve monotone sections
    for (int n = 1; n <= 4; ++n) CHECK(pn_cont.section(n).check_nondecreasing(0.0, 8.0));
    CHECK(back_c.check_nondecreasing(0.0, 8.0));
}

TEST_CASE("conversion soundness on geometric tails", "[limits][property]") {
    auto grid = make_uniform_grid(1.0, 6.0, 0.5);
    auto fam = PseudonormFamily::standard(grid);

    // u(t) = g (1 + 2^{-t}) is T-convergent for T(tau) = tau + 1
    auto u = [&](double t) {
        return GridFunction::constant(grid, 1.0 + std::exp2(-t));
    };
    auto T = Modulus::linear(1.0, 1.0);
    for (double tau : {0.0, 2.0, 5.0, 9.0}) {
        double s1 = T(tau), s2 = T(tau) + 3.0;
        CHECK(metric(u(s1), u(s2), fam) < std::exp2(-tau));
    }

    // its pseudonorm modulus passes the per-index Cauchy check on a lattice
    auto pn = metric_to_pseudonorm_modulus(T);
    for (int n = 1; n <= 6; ++n) {
        for (int nu = 0; nu <= 10; ++nu) {
            double start = pn(n, nu);
            for (double d1 : {0.0, 0.5, 2.0}) {
                for (double d2 : {0.25, 1.0, 4.0}) {
                    double a = start + d1, b = start + d2;
                    CHECK(pseudonorm_diff(u(a), u(b), n, fam) < std::exp2(-nu));
                }
            }
        }
    }

    // and a pseudonorm-modulus-convergent stream passes the metric check
    // under the max-over-sections conversion
    PseudonormModulus pm(Modulus::Flavor::Continuous,
                         [](int, double tau) { return tau + 1.0; });
    auto Tm = pseudonorm_to_metric_modulus(pm);
    for (double tau : {0.0, 1.0, 4.0, 8.0}) {
        double start = Tm(tau);
        CHECK(metric(u(start), u(start + 2.0), fam) < std::exp2(-tau));
    }
}
