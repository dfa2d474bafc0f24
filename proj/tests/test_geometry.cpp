#include <cmath>
#include <random>

#include "doctest.h"
#include "planeflow/errors.hpp"
#include "planeflow/geometry.hpp"

using namespace pflow;

namespace {

Chart unit_box() {
    return Chart::box({Interval{-2, 2}, Interval{-2, 2}, Interval{-2, 2}});
}

Vec vec3(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
}

Vec vec4(double a, double b, double c, double d) {
    Vec v(4);
    v << a, b, c, d;
    return v;
}

OneForm dz_form() { return OneForm::parse_on(unit_box(), {"0", "0", "1"}); }
OneForm xdy_form() { return OneForm::parse_on(unit_box(), {"0", "x", "1"}); }

OneForm tight_s3() {
    return OneForm::parse_on(
        Chart::sphere(),
        {"-0.5*x2", "0.5*x1", "-0.5*x4", "0.5*x3"});
}

} // namespace

TEST_CASE("plane_basis spans the kernel orthonormally") {
    PlaneField pf{dz_form()};
    auto [e1, e2] = plane_basis(pf, vec3(0, 0, 0));
    CHECK(std::abs(e1[2]) < 1e-14);
    CHECK(std::abs(e2[2]) < 1e-14);
    CHECK(e1.dot(e2) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(e1.norm() == doctest::Approx(1.0));
    CHECK(e2.norm() == doctest::Approx(1.0));

    PlaneField pf2{xdy_form()};
    Vec p = vec3(1, 0, 0);
    auto [f1, f2] = plane_basis(pf2, p);
    Vec a = pf2.form.covector(p); // (0, 1, 1)
    CHECK(a.isApprox(vec3(0, 1, 1)));
    CHECK(std::abs(a.dot(f1)) < 1e-10);
    CHECK(std::abs(a.dot(f2)) < 1e-10);
    CHECK(f1.dot(f2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("plane_basis on the tight S^3 form") {
    PlaneField pf{tight_s3()};
    Vec p = vec4(1, 0, 0, 0);
    auto [e1, e2] = plane_basis(pf, p);
    CHECK(std::abs(pf.form.apply(p, e1)) < 1e-10);
    CHECK(std::abs(pf.form.apply(p, e2)) < 1e-10);
    CHECK(std::abs(e1.dot(p)) < 1e-10);
    CHECK(std::abs(e2.dot(p)) < 1e-10);
    CHECK(e1.dot(e2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("plane_basis rejects a degenerate form") {
    auto degenerate = OneForm::parse_on(unit_box(), {"x", "0", "0"});
    PlaneField pf{degenerate};
    CHECK_THROWS_AS(plane_basis(pf, vec3(0, 0.5, 0)), DegenerateForm);
}

TEST_CASE("frobenius density: integrable, contact, and the S^3 value") {
    auto a0 = dz_form();
    CHECK(frobenius_density(a0, vec3(0.3, -0.2, 0.7)) == doctest::Approx(0.0));

    auto a1 = xdy_form();
    for (double x : {-1.0, 0.0, 0.5})
        CHECK(frobenius_density(a1, vec3(x, 0.4, -0.3)) == doctest::Approx(1.0).epsilon(1e-14));

    auto s3 = tight_s3();
    CHECK(frobenius_density(s3, vec4(1, 0, 0, 0)) == doctest::Approx(0.5).epsilon(1e-12));
    // constant on the whole sphere by symmetry of the form
    CHECK(frobenius_density(s3, vec4(0.5, 0.5, 0.5, 0.5)) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("frobenius density scales as lambda^2 under constant rescaling") {
    auto a = xdy_form();
    double lambda = 2.75;
    std::vector<ExprPtr> scaled;
    for (const auto& c : a.coeffs()) scaled.push_back(mul(constant(lambda), c));
    OneForm la(unit_box(), scaled);
    Vec p = vec3(0.7, -0.9, 0.1);
    CHECK(frobenius_density(la, p) ==
          doctest::Approx(lambda * lambda * frobenius_density(a, p)).epsilon(1e-13));
}

TEST_CASE("project_vector matches the hand computation and is idempotent") {
    PlaneField pf{xdy_form()};
    Vec p = vec3(1, 0, 0);
    Vec v = vec3(0, 1, 0);
    Vec pv = project_vector(pf, v, p);
    CHECK(pv.isApprox(vec3(0, 0.5, -0.5), 1e-14));

    PlaneField pfz{dz_form()};
    CHECK(project_vector(pfz, vec3(0, 0, 1), vec3(0, 0, 0)).norm() < 1e-14);

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Vec q = vec3(unif(rng), unif(rng), unif(rng));
        Vec w = vec3(unif(rng), unif(rng), unif(rng));
        Vec u = vec3(unif(rng), unif(rng), unif(rng));
        Vec pw = project_vector(pf, w, q);
        CHECK((project_vector(pf, pw, q) - pw).norm() < 1e-10);          // idempotent
        CHECK(std::abs(pf.form.apply(q, pw)) < 1e-10);                   // lands in kernel
        double lhs = project_vector(pf, w, q).dot(u);
        double rhs = w.dot(project_vector(pf, u, q));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));               // self-adjoint
    }
}

TEST_CASE("sphere projections return tangent vectors") {
    PlaneField pf{tight_s3()};
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        Vec p = vec4(unif(rng), unif(rng), unif(rng), unif(rng));
        p.normalize();
        Vec v = vec4(unif(rng), unif(rng), unif(rng), unif(rng));
        Vec pv = project_vector(pf, v, p);
        CHECK(std::abs(pv.dot(p)) < 1e-10);
        auto [e1, e2] = plane_basis(pf, p);
        CHECK(std::abs(e1.dot(p)) < 1e-10);
        CHECK(std::abs(e2.dot(p)) < 1e-10);
    }
}

TEST_CASE("lift_family produces tangent fields with matching zeros") {
    Chart box = unit_box();
    auto names = box.coord_names();

    // g = 0 decouples zdot
    PlanarFamily radial{parse("-x", names), parse("-y", names)};
    auto X0 = lift_family(radial, constant(0.0), box);
    CHECK(X0(vec3(0.5, -0.25, 0.8)).isApprox(vec3(-0.5, 0.25, 0.0)));

    // saddle-node normal form lift: (lx*x, z - a*y^2, -g*(z - a*y^2))
    PlanarFamily sn{parse("-x", names), parse("z - y^2", names)};
    auto g = parse("y", names);
    auto X = lift_family(sn, g, box);
    Vec p = vec3(0.2, 0.5, 0.7);
    double f2 = 0.7 - 0.25;
    CHECK(X(p).isApprox(vec3(-0.2, f2, -0.5 * f2), 1e-14));

    // tangency holds identically
    OneForm alpha(box, {constant(0.0), g, constant(1.0)});
    CHECK(is_zero(pairing_expr(alpha, X)));

    // zero section lifts to zero
    PlanarFamily zero{constant(0.0), constant(0.0)};
    auto Z = lift_family(zero, g, box);
    CHECK(Z(vec3(0.1, 0.2, 0.3)).norm() == 0.0);

    // warning when g(0) != 0
    std::string warning;
    lift_family(radial, constant(1.0), box, &warning);
    CHECK(!warning.empty());
}

TEST_CASE("reduce_to_family inverts lift_family and rejects non-tangent fields") {
    Chart box = unit_box();
    auto names = box.coord_names();
    auto g = parse("y", names);

    PlanarFamily sn{parse("-x", names), parse("z - y^2", names)};
    auto X = lift_family(sn, g, box);
    auto back = reduce_to_family(X, g);

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> unif(-1.5, 1.5);
    for (int trial = 0; trial < 100; ++trial) {
        double c[3] = {unif(rng), unif(rng), unif(rng)};
        std::span<const double> s(c, 3);
        CHECK(back.f1->eval(s) == doctest::Approx(sn.f1->eval(s)).epsilon(1e-12));
        CHECK(back.f2->eval(s) == doctest::Approx(sn.f2->eval(s)).epsilon(1e-12));
    }

    auto bad = VectorField::parse_on(box, {"0", "0", "1"});
    CHECK_THROWS_AS(reduce_to_family(bad, g), NotTangent);
}

TEST_CASE("rescale_to_unit_dz divides by the dz coefficient") {
    Chart box = unit_box();
    auto alpha = OneForm::parse_on(box, {"x", "y", "2 + x^2"});
    auto scaled = rescale_to_unit_dz(alpha);
    Vec p = vec3(0.5, -1.0, 0.25);
    double cz = 2 + 0.25;
    CHECK(scaled.covector(p).isApprox(vec3(0.5 / cz, -1.0 / cz, 1.0), 1e-14));

    auto vanishing = OneForm::parse_on(box, {"1", "0", "x"});
    CHECK_THROWS_AS(rescale_to_unit_dz(vanishing), DegenerateForm);
}
