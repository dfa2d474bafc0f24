#include <cmath>
#include <random>

#include "doctest.h"
#include "planeflow/errors.hpp"
#include "planeflow/expr.hpp"

using namespace pflow;

namespace {
const std::vector<std::string> kXYZ = {"x", "y", "z"};

double eval_at(const ExprPtr& e, double x, double y, double z) {
    double c[3] = {x, y, z};
    return e->eval(std::span<const double>(c, 3));
}
} // namespace

TEST_CASE("parse and evaluate basic arithmetic") {
    auto e = parse("2*x + y^2 - z/4", kXYZ);
    CHECK(eval_at(e, 1.0, 3.0, 8.0) == doctest::Approx(2 + 9 - 2).epsilon(1e-15));

    auto f = parse("sin(x)*cos(y) + exp(z)", kXYZ);
    CHECK(eval_at(f, 0.5, 0.25, -1.0) ==
          doctest::Approx(std::sin(0.5) * std::cos(0.25) + std::exp(-1.0)).epsilon(1e-15));

    auto g = parse("atan2(y, x)", kXYZ);
    CHECK(eval_at(g, 1.0, 1.0, 0.0) == doctest::Approx(M_PI / 4).epsilon(1e-15));

    auto h = parse("pow(x, 3) + sqrt(y)", kXYZ);
    CHECK(eval_at(h, 2.0, 9.0, 0.0) == doctest::Approx(11.0).epsilon(1e-15));

    CHECK(eval_at(parse("pi", kXYZ), 0, 0, 0) == doctest::Approx(M_PI));
}

TEST_CASE("operator precedence and associativity") {
    CHECK(eval_at(parse("2 + 3*4", kXYZ), 0, 0, 0) == 14.0);
    CHECK(eval_at(parse("2 - 3 - 4", kXYZ), 0, 0, 0) == -5.0);
    CHECK(eval_at(parse("2^3^2", kXYZ), 0, 0, 0) == 512.0); // right-assoc
    CHECK(eval_at(parse("-x^2", kXYZ), 3, 0, 0) == -9.0);
    CHECK(eval_at(parse("(2 - 3) - 4", kXYZ), 0, 0, 0) == -5.0);
    CHECK(eval_at(parse("2 - (3 - 4)", kXYZ), 0, 0, 0) == 3.0);
    CHECK(eval_at(parse("1e-2 + x", kXYZ), 1, 0, 0) == doctest::Approx(1.01));
}

TEST_CASE("parameters bind and missing parameters throw") {
    auto e = parse("a*x + b", kXYZ);
    ParamMap params{{"a", 2.0}, {"b", -1.0}};
    auto bound = bind_params(e, params);
    CHECK(eval_at(bound, 3, 0, 0) == 5.0);
    double c[3] = {0, 0, 0};
    CHECK_THROWS_AS(e->eval(std::span<const double>(c, 3)), UnknownParam);
    CHECK_THROWS_AS(bind_params(e, ParamMap{{"a", 1.0}}), UnknownParam);
}

TEST_CASE("symbolic derivatives match finite differences") {
    std::vector<std::string> exprs = {
        "x^2*y + sin(z*x)",
        "exp(-x^2 - y^2)*cos(z)",
        "sqrt(x^2 + y^2 + 1)",
        "atan2(y, x) + log(1 + x^2)",
        "pow(x^2 + 1, y)",
        "x/(y^2 + 1) - z*x*y",
    };
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(0.2, 1.4);
    for (const auto& text : exprs) {
        auto e = parse(text, kXYZ);
        for (int axis = 0; axis < 3; ++axis) {
            auto de = diff(e, axis);
            for (int trial = 0; trial < 5; ++trial) {
                double p[3] = {unif(rng), unif(rng), unif(rng)};
                double h = 1e-6;
                double pp[3] = {p[0], p[1], p[2]};
                double pm[3] = {p[0], p[1], p[2]};
                pp[axis] += h;
                pm[axis] -= h;
                double fd = (eval_at(parse(text, kXYZ), pp[0], pp[1], pp[2]) -
                             eval_at(parse(text, kXYZ), pm[0], pm[1], pm[2])) /
                            (2 * h);
                double sym = eval_at(de, p[0], p[1], p[2]);
                CHECK(sym == doctest::Approx(fd).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("smart constructors fold trivial algebra") {
    auto x = coord(0);
    CHECK(is_zero(add(x, neg(x))));
    CHECK(is_zero(sub(x, x)));
    CHECK(is_zero(mul(constant(0.0), x)));
    CHECK(same(mul(constant(1.0), x), x));
    CHECK(same(add(constant(0.0), x), x));
    CHECK(is_const(pow_e(x, constant(0.0)), 1.0));
}

namespace {

ExprPtr random_tree(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, 9);
    std::uniform_real_distribution<double> val(-3.0, 3.0);
    if (depth == 0 || pick(rng) < 2) {
        switch (pick(rng) % 3) {
        case 0: return constant(std::round(val(rng) * 16) / 16);
        case 1: return coord(pick(rng) % 3);
        default: return param("k");
        }
    }
    auto a = random_tree(rng, depth - 1);
    auto b = random_tree(rng, depth - 1);
    switch (pick(rng)) {
    case 0: return add(a, b);
    case 1: return sub(a, b);
    case 2: return mul(a, b);
    case 3: return div(a, b);
    case 4: return pow_e(a, b);
    case 5: return atan2_e(a, b);
    case 6: return neg(a);
    case 7: return sin_e(a);
    case 8: return cos_e(a);
    default: return sqrt_e(a);
    }
}

bool has_nonfinite_const(const ExprPtr& e) {
    if (e->kind == Expr::Kind::Const) return !std::isfinite(e->value);
    bool bad = false;
    if (e->a) bad = bad || has_nonfinite_const(e->a);
    if (e->b) bad = bad || has_nonfinite_const(e->b);
    return bad;
}

} // namespace

TEST_CASE("emit/parse round trip is the identity on canonical trees") {
    std::mt19937 rng(42);
    for (int i = 0; i < 400; ++i) {
        auto tree = random_tree(rng, 4);
        if (has_nonfinite_const(tree)) continue; // sqrt(-2) etc. folds to NaN
        auto text = to_string(tree, kXYZ);
        auto back = parse(text, kXYZ);
        CAPTURE(text);
        CHECK(same(tree, back));
    }
}

TEST_CASE("parse errors are reported") {
    CHECK_THROWS_AS(parse("x +", kXYZ), ParseError);
    CHECK_THROWS_AS(parse("(x", kXYZ), ParseError);
    CHECK_THROWS_AS(parse("foo(x)", kXYZ), ParseError);
    CHECK_THROWS_AS(parse("x 2", kXYZ), ParseError);
    CHECK_THROWS_AS(parse("atan2(x)", kXYZ), ParseError);
}
