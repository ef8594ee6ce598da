#include <cmath>
#include <random>

#include "doctest.h"
#include "qt/sphere.hpp"

using namespace qt;

namespace {

SpherePoint random_interior_point(std::mt19937& rng) {
    std::normal_distribution<double> gauss;
    Vec5 v;
    for (double& x : v) x = gauss(rng);
    v[4] = std::abs(v[4]) + 1e-3;
    return SpherePoint::project(v);
}

BoundaryPoint random_boundary_point(std::mt19937& rng) {
    std::normal_distribution<double> gauss;
    Vec4 v;
    for (double& x : v) x = gauss(rng);
    return BoundaryPoint::of(v);
}

// Fixed list of genuinely harmonic polynomials per degree.
struct Harmonic {
    int degree;
    Expr e;
};

std::vector<Harmonic> harmonic_list() {
    std::vector<Harmonic> h;
    for (int i = 1; i <= 5; ++i) h.push_back({1, Expr::var(i)});
    h.push_back({2, parse("x1*x2")});
    h.push_back({2, parse("x2*x5")});
    h.push_back({2, parse("x1^2 - x3^2")});
    h.push_back({2, parse("x1^2 + x2^2 - 2*x4^2")});
    h.push_back({3, parse("x1*x2*x3")});
    h.push_back({3, parse("x2*x4*x5")});
    h.push_back({3, parse("x1*(x2^2 - x3^2)")});
    h.push_back({3, parse("x5^3") - Expr(3.0 / 7.0) * parse("x5*r^2")});
    h.push_back({3, parse("x1^3") - Expr(3.0 / 7.0) * parse("x1*r^2")});
    return h;
}

}  // namespace

TEST_CASE("point type invariants") {
    CHECK_THROWS_AS(SpherePoint(Vec5{1.0, 1.0, 0.0, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(SpherePoint(Vec5{0.0, 0.0, 0.0, 0.0, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(BoundaryPoint(Vec5{0.0, 0.0, 0.0, 0.6, 0.8}), std::invalid_argument);
    CHECK(SpherePoint::project(Vec5{2.0, 0.0, 0.0, 0.0, 0.0}).x[0] == doctest::Approx(1.0));
}

TEST_CASE("gradient of coordinate functions") {
    std::mt19937 rng(1);
    for (int k = 0; k < 25; ++k) {
        SpherePoint p = random_interior_point(rng);
        for (int i = 1; i <= 5; ++i) {
            ScalarField xi(Expr::var(i));
            Vec5 g = grad(xi, p);
            // X_i(x) = e_i - x_i x
            for (int j = 0; j < 5; ++j) {
                double expect = (j == i - 1 ? 1.0 : 0.0) - p.x[i - 1] * p.x[j];
                CHECK(g[j] == doctest::Approx(expect).epsilon(1e-12));
            }
            CHECK(std::abs(dot(g, p.x)) <= 1e-12);
            CHECK(dot(g, g) == doctest::Approx(1.0 - p.x[i - 1] * p.x[i - 1]).epsilon(1e-12));
        }
        Vec5 gz = grad(ScalarField(Expr(4.2)), p);
        for (double v : gz) CHECK(v == 0.0);
    }
}

TEST_CASE("eigenvalue ladder for laplace and paneitz4") {
    std::mt19937 rng(2);
    std::vector<double> scratch;
    for (const Harmonic& h : harmonic_list()) {
        ScalarField f(h.e);
        double lam = -static_cast<double>(h.degree * (h.degree + 3));
        double pan =
            static_cast<double>(h.degree * (h.degree + 1) * (h.degree + 2) * (h.degree + 3));
        Tape tf(f.expr());
        Tape tl(laplace(f).expr());
        Tape tp(paneitz4(f).expr());
        for (int k = 0; k < 50; ++k) {
            SpherePoint p = random_interior_point(rng);
            double fv = tf.eval1(p.data(), scratch);
            CHECK(std::abs(tl.eval1(p.data(), scratch) - lam * fv) <= 1e-9);
            CHECK(std::abs(tp.eval1(p.data(), scratch) - pan * fv) <= 1e-9 * std::max(1.0, pan));
        }
    }
}

TEST_CASE("laplace fixed examples") {
    std::mt19937 rng(3);
    ScalarField x1(parse("x1"));
    ScalarField x1x2(parse("x1*x2"));
    ScalarField one(parse("1"));
    Tape l1(laplace(x1).expr());
    Tape l2(laplace(x1x2).expr());
    std::vector<double> scratch;
    for (int k = 0; k < 20; ++k) {
        SpherePoint p = random_interior_point(rng);
        CHECK(l1.eval1(p.data(), scratch) == doctest::Approx(-4.0 * p.x[0]).epsilon(1e-12));
        CHECK(l2.eval1(p.data(), scratch) ==
              doctest::Approx(-10.0 * p.x[0] * p.x[1]).epsilon(1e-11));
    }
    CHECK(laplace(one).expr().is_constant(0.0));
    CHECK(paneitz4(one).expr().is_constant(0.0));

    // lap(x5^3) = -18 x5^3 + 6 x5 on the sphere
    Tape l3(laplace(ScalarField(parse("x5^3"))).expr());
    for (int k = 0; k < 20; ++k) {
        SpherePoint p = random_interior_point(rng);
        double x5 = p.x[4];
        CHECK(l3.eval1(p.data(), scratch) ==
              doctest::Approx(-18.0 * x5 * x5 * x5 + 6.0 * x5).epsilon(1e-11));
    }
}

TEST_CASE("paneitz4 fixed examples") {
    std::mt19937 rng(4);
    std::vector<double> scratch;
    Tape p1(paneitz4(ScalarField(parse("x3"))).expr());
    Tape p2(paneitz4(ScalarField(parse("x1*x2"))).expr());
    for (int k = 0; k < 20; ++k) {
        SpherePoint p = random_interior_point(rng);
        CHECK(p1.eval1(p.data(), scratch) == doctest::Approx(24.0 * p.x[2]).epsilon(1e-10));
        CHECK(p2.eval1(p.data(), scratch) ==
              doctest::Approx(120.0 * p.x[0] * p.x[1]).epsilon(1e-10));
    }
}

TEST_CASE("normal derivative at the equator") {
    std::mt19937 rng(5);
    for (int k = 0; k < 20; ++k) {
        BoundaryPoint q = random_boundary_point(rng);
        CHECK(std::abs(normal_derivative(ScalarField(parse("x1")), q)) <= 1e-14);
        CHECK(normal_derivative(ScalarField(parse("x5")), q) == doctest::Approx(-1.0));
        CHECK(normal_derivative(laplace(ScalarField(parse("x5^3"))), q) ==
              doctest::Approx(-6.0).epsilon(1e-12));
    }
}

TEST_CASE("paneitz3 values and precondition") {
    std::mt19937 rng(6);
    for (int k = 0; k < 10; ++k) {
        BoundaryPoint q = random_boundary_point(rng);
        CHECK(paneitz3(ScalarField(parse("x5^3")), q) == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(std::abs(paneitz3(ScalarField(parse("x1")), q)) <= 1e-12);
        CHECK(std::abs(paneitz3(ScalarField(parse("1")), q)) <= 1e-15);
    }
    BoundaryPoint q(Vec5{1, 0, 0, 0, 0});
    CHECK_THROWS_AS(paneitz3(ScalarField(parse("x5")), q), NotInH);
}

TEST_CASE("dirderiv pairings") {
    std::mt19937 rng(7);
    ScalarField x1(parse("x1"));
    ScalarField x2(parse("x2"));
    ScalarField x3(parse("x3"));
    for (int k = 0; k < 25; ++k) {
        SpherePoint p = random_interior_point(rng);
        auto grad_x1 = [&](const SpherePoint& s) { return grad(x1, s); };
        auto grad_x2 = [&](const SpherePoint& s) { return grad(x2, s); };
        CHECK(dirderiv(grad_x1, x1, p) ==
              doctest::Approx(1.0 - p.x[0] * p.x[0]).epsilon(1e-12));
        CHECK(dirderiv(grad_x2, x1, p) == doctest::Approx(-p.x[0] * p.x[1]).epsilon(1e-12));
        // rotation field in the (1,2) plane annihilates x3
        auto rot12 = [](const SpherePoint& s) {
            return Vec5{-s.x[1], s.x[0], 0.0, 0.0, 0.0};
        };
        CHECK(std::abs(dirderiv(rot12, x3, p)) <= 1e-14);
    }
}

TEST_CASE("extension independence of the restriction") {
    // laplace from homogenize0(f) vs from an extension with extra
    // (r^2 - 1) g freedom agree on the sphere.
    std::mt19937 rng(8);
    Expr f = parse("x1*x2 + 0.3*x5^2");
    Expr g = parse("x3 + 0.5*x1");
    Expr modified = f * (Expr(1.0) + (parse("r^2") - Expr(1.0)) * g);
    Tape la(laplace(ScalarField(f)).expr());
    Tape lb(laplace(ScalarField(modified)).expr());
    std::vector<double> scratch;
    for (int k = 0; k < 40; ++k) {
        SpherePoint p = random_interior_point(rng);
        CHECK(std::abs(la.eval1(p.data(), scratch) - lb.eval1(p.data(), scratch)) <= 1e-9);
    }
}

TEST_CASE("background solves the constant-curvature problem") {
    // u = 0: paneitz4(0) + 6 = 6 = 2 Q e^0 with Q = 3; paneitz3(0) = 0
    ScalarField zero(parse("0"));
    CHECK(paneitz4(zero).expr().is_constant(0.0));
    BoundaryPoint q(Vec5{0, 1, 0, 0, 0});
    CHECK(paneitz3(zero, q) == 0.0);
}
