#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lgpac/expr.hpp"

using namespace lgpac;

TEST_CASE("ast evaluation and folding", "[expr]") {
    auto e = ast_binary('/', ast_binary('^', ast_number(2), ast_variable("x")),
                        ast_binary('-', ast_variable("x"), ast_number(1)));
    CHECK(ast_eval(e, 3.0, 0.0) == Catch::Approx(8.0 / 2.0));
    CHECK(ast_print(e) == "2^x / (x - 1)");

    auto folded = ast_binary('+', ast_number(1), ast_number(2));
    CHECK(folded->kind == AstNode::Kind::Number);
    CHECK(folded->number == 3.0);

    CHECK(ast_print(ast_negate(ast_number(1))) == "-1");
    CHECK(ast_uses(e, 'x'));
    CHECK_FALSE(ast_uses(e, 't'));
}

TEST_CASE("symbolic time derivative", "[expr]") {
    auto t = ast_variable("t");
    auto x = ast_variable("x");

    // d/dt (t*x) = x
    auto d1 = ast_derivative_t(ast_binary('*', t, x));
    CHECK(ast_eval(d1, 5.0, 2.0) == 5.0);

    // d/dt t^3 = 3 t^2
    auto d2 = ast_derivative_t(ast_binary('^', t, ast_number(3)));
    CHECK(ast_eval(d2, 0.0, 2.0) == Catch::Approx(12.0));

    // d/dt sin(2t) = 2 cos(2t)
    auto d3 = ast_derivative_t(ast_call("sin", ast_binary('*', ast_number(2), t)));
    CHECK(ast_eval(d3, 0.0, 0.7) == Catch::Approx(2 * std::cos(1.4)));

    // d/dt exp(-t) = -exp(-t)
    auto d4 = ast_derivative_t(ast_call("exp", ast_negate(t)));
    CHECK(ast_eval(d4, 0.0, 1.3) == Catch::Approx(-std::exp(-1.3)));

    // d/dt atan(t) = 1/(1+t^2)
    auto d5 = ast_derivative_t(ast_call("atan", t));
    CHECK(ast_eval(d5, 0.0, 2.0) == Catch::Approx(0.2));

    // d/dt 2^t = log(2) 2^t
    auto d6 = ast_derivative_t(ast_binary('^', ast_number(2), t));
    CHECK(ast_eval(d6, 0.0, 3.0) == Catch::Approx(std::log(2.0) * 8.0));

    // quotients
    auto d7 = ast_derivative_t(ast_binary('/', ast_number(1), ast_binary('+', ast_number(1), t)));
    CHECK(ast_eval(d7, 0.0, 4.0) == Catch::Approx(-1.0 / 25.0));

    CHECK_THROWS_AS(ast_derivative_t(ast_binary('^', t, t)), std::invalid_argument);
}
