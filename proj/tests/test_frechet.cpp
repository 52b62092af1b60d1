#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "lgpac/frechet.hpp"

using namespace lgpac;

namespace {

GridFunction random_function(const GridPtr& grid, std::mt19937& rng, double amplitude = 1.0) {
    std::uniform_real_distribution<double> dist(-amplitude, amplitude);
    std::vector<double> v(grid->size());
    for (auto& x : v) x = dist(rng);
    return GridFunction(grid, std::move(v));
}

}  // namespace

TEST_CASE("spatial grid invariants", "[frechet]") {
    CHECK_THROWS_AS(SpatialGrid(0.0, 1.0, {}), std::invalid_argument);
    CHECK_THROWS_AS(SpatialGrid(0.0, 1.0, {0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(SpatialGrid(1.0, 2.0, {0.5}), std::invalid_argument);
    CHECK_THROWS_AS(SpatialGrid(0.0, 1.0, {0.0, 2.0}), std::invalid_argument);

    auto g = make_uniform_grid(1.0, 6.0, 0.25);
    CHECK(g->size() == 21);
    CHECK(g->point(0) == 1.0);
    CHECK(g->point(20) == 6.0);

    auto unb = make_unbounded_grid(1.0, 6.0, 0.5);
    CHECK_FALSE(unb->upper().has_value());
    CHECK(unb->max_point() == 6.0);
}

TEST_CASE("grid function invariants", "[frechet]") {
    auto g = make_uniform_grid(0.0, 1.0, 0.5);
    CHECK_THROWS_AS(GridFunction(g, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(GridFunction(g, {1.0, 2.0, std::nan("")}), std::invalid_argument);
    auto f = GridFunction::sample(g, [](double x) { return 2 * x; });
    CHECK(f.value(2) == 2.0);
}

TEST_CASE("pseudonorm basics", "[frechet]") {
    auto g3 = make_point_grid({1.0, 2.0, 3.0}, 1.0, 3.0);
    auto fam3 = PseudonormFamily::standard(g3);
    CHECK(fam3.start_index == 1);
    CHECK(fam3.last_index() == 3);

    auto zero = GridFunction::constant(g3, 0.0);
    for (int n = 1; n <= 3; ++n) CHECK(pseudonorm(zero, n, fam3) == 0.0);

    auto ident = GridFunction::sample(g3, [](double x) { return x; });
    CHECK(pseudonorm(ident, 2, fam3) == 2.0);

    // brute-force sup over all samples within the widest interval
    auto g101 = make_uniform_grid(1.0, 4.0, 0.03);
    auto fam = PseudonormFamily::standard(g101);
    auto f = GridFunction::sample(g101, [](double x) { return std::sin(x); });
    double brute = 0;
    for (double v : f.values()) brute = std::max(brute, std::abs(v));
    CHECK(pseudonorm(f, fam.last_index(), fam) == Catch::Approx(brute).epsilon(0));

    CHECK_THROWS_AS(pseudonorm(f, 99, fam), std::out_of_range);
    auto other = GridFunction::constant(g3, 1.0);
    CHECK_THROWS_AS(pseudonorm(other, 1, fam), std::invalid_argument);
}

TEST_CASE("pseudonorm is monotone in the index", "[frechet]") {
    auto g = make_uniform_grid(1.0, 6.0, 0.25);
    auto fam = PseudonormFamily::standard(g);
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        auto f = random_function(g, rng, 5.0);
        for (int n = fam.start_index; n < fam.last_index(); ++n)
            CHECK(pseudonorm(f, n, fam) <= pseudonorm(f, n + 1, fam));
    }
}

TEST_CASE("metric basics", "[frechet]") {
    auto g = make_uniform_grid(1.0, 6.0, 0.5);
    auto fam = PseudonormFamily::standard(g);
    auto f = GridFunction::sample(g, [](double x) { return x * x; });
    CHECK(metric(f, f, fam) == 0.0);

    // constant difference of 1: geometric series sums to 1 up to the floor
    auto a = GridFunction::constant(g, 0.0);
    auto b = GridFunction::constant(g, 1.0);
    CHECK(metric(a, b, fam) == Catch::Approx(1.0).margin(1e-15));

    // direct series oracle on a random pair
    std::mt19937 rng(21);
    auto u = random_function(g, rng, 2.0);
    auto v = random_function(g, rng, 2.0);
    double expect = 0;
    for (int n = 1; n <= 60; ++n) {
        int idx = std::min(n, fam.last_index());
        double pn = 0;
        for (std::size_t i = 0; i < g->size(); ++i)
            if (g->point(i) <= fam.cutoff(idx) + 1e-12)
                pn = std::max(pn, std::abs(u.value(i) - v.value(i)));
        expect += std::ldexp(1.0, -n) * std::min(pn, 1.0);
    }
    CHECK(metric(u, v, fam) == Catch::Approx(expect).epsilon(1e-14));
}

TEST_CASE("metric axioms on random triples", "[frechet]") {
    auto g = make_uniform_grid(1.0, 8.0, 0.5);
    auto fam = PseudonormFamily::standard(g);
    std::mt19937 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        auto a = random_function(g, rng, 3.0);
        auto b = random_function(g, rng, 3.0);
        auto c = random_function(g, rng, 3.0);
        double dab = metric(a, b, fam);
        double dba = metric(b, a, fam);
        double dac = metric(a, c, fam);
        double dcb = metric(c, b, fam);
        CHECK(dab >= 0.0);
        CHECK(dab == dba);
        CHECK(dab <= dac + dcb + 1e-14);
        // clamp bound: d never exceeds the weight sum
        CHECK(dab <= 1.0);
    }
    auto a = random_function(g, rng, 3.0);
    auto b = a;
    CHECK(metric(a, b, fam) == 0.0);
}

TEST_CASE("bound conversion values", "[frechet]") {
    CHECK(metric_to_pseudonorm_bound(0.5, 3) == 0.0625);
    CHECK(metric_to_pseudonorm_bound(0.5, 0) == 0.5);
    CHECK_THROWS_AS(metric_to_pseudonorm_bound(1.5, 2), std::invalid_argument);
    CHECK_THROWS_AS(metric_to_pseudonorm_bound(0.0, 2), std::invalid_argument);

    auto b = pseudonorm_to_metric_bound(0.5);
    CHECK(b.delta == 0.25);
    CHECK(b.M == 2);
    for (int k = 1; k <= 10; ++k) {
        auto bk = pseudonorm_to_metric_bound(std::ldexp(1.0, -k));
        CHECK(bk.delta == std::ldexp(1.0, -k - 1));
        CHECK(bk.M == k + 1);
    }
    CHECK_THROWS_AS(pseudonorm_to_metric_bound(1.0), std::invalid_argument);
}

namespace {

// rescale h so that metric(f, f + s*h) drops below the target
GridFunction scaled_within(const GridFunction& f, const GridFunction& h, double target,
                           const PseudonormFamily& fam) {
    double lo = 0.0, hi = 1.0;
    auto shifted = [&](double s) {
        std::vector<double> v(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) v[i] = f.value(i) + s * h.value(i);
        return GridFunction(f.grid(), std::move(v));
    };
    if (metric(f, shifted(1.0), fam) < target) return shifted(1.0);
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        if (metric(f, shifted(mid), fam) < target) lo = mid;
        else hi = mid;
    }
    return shifted(lo);
}

}  // namespace

TEST_CASE("smallness transfers hold on random pairs", "[frechet][property]") {
    auto g = make_uniform_grid(1.0, 12.0, 0.5);
    auto fam = PseudonormFamily::standard(g);
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> eps_dist(0.01, 0.99);
    std::uniform_int_distribution<int> m_dist(0, 8);

    for (int trial = 0; trial < 300; ++trial) {
        double eps = eps_dist(rng);
        int M = m_dist(rng);
        double delta = metric_to_pseudonorm_bound(eps, M);
        auto f = random_function(g, rng, 4.0);
        auto h = random_function(g, rng, 4.0);
        auto gfn = scaled_within(f, h, delta, fam);
        REQUIRE(metric(f, gfn, fam) < delta);
        for (int n = 1; n <= M; ++n) CHECK(pseudonorm_diff(f, gfn, n, fam) < eps);
    }

    for (int trial = 0; trial < 300; ++trial) {
        double eps = eps_dist(rng);
        auto [delta, M] = pseudonorm_to_metric_bound(eps);
        auto f = random_function(g, rng, 4.0);
        // small inside the first M cutoffs, wild beyond them
        std::vector<double> v(g->size());
        std::uniform_real_distribution<double> small(-delta * 0.99, delta * 0.99);
        std::uniform_real_distribution<double> wild(-10.0, 10.0);
        double cutoff = fam.cutoff(std::min(M, fam.last_index()));
        for (std::size_t i = 0; i < g->size(); ++i)
            v[i] = f.value(i) + (g->point(i) <= cutoff + 1e-12 ? small(rng) : wild(rng));
        GridFunction gfn(g, std::move(v));
        for (int n = 1; n <= std::min(M, fam.last_index()); ++n)
            REQUIRE(pseudonorm_diff(f, gfn, n, fam) < delta);
        CHECK(metric(f, gfn, fam) < eps);
    }
}
