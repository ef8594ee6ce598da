#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qt/functionals.hpp"
#include "qt/runner.hpp"

using namespace qt;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPiSq = 4.0 * kPi * kPi;

struct Rules {
    QuadRule interior = hemisphere_rule(12, 12, 24);
    QuadRule boundary = boundary_rule(12, 24);
};

const Rules& rules() {
    static Rules r;
    return r;
}

PrescribedData make(const char* u_src) {
    return manufacture(CandidateSolution(ScalarField(parse(u_src)), rules().boundary));
}

}  // namespace

TEST_CASE("candidate admission enforces the Neumann condition") {
    CHECK_THROWS_AS(CandidateSolution(ScalarField(parse("x5")), rules().boundary), NotInH);
    CHECK_NOTHROW(CandidateSolution(ScalarField(parse("x5^2")), rules().boundary));
    CHECK_NOTHROW(CandidateSolution(ScalarField(parse("0.2*x1*x2 + 0.1*x5^3")),
                                    rules().boundary));
}

TEST_CASE("manufacture background and closed forms") {
    PrescribedData bg = make("0");
    CHECK(bg.Q.expr().is_constant(3.0));
    double north[5] = {0, 0, 0, 0, 1};
    CHECK(eval(bg.Q.expr(), north) == 3.0);
    double eq[5] = {1, 0, 0, 0, 0};
    CHECK(eval(bg.T.expr(), eq) == 0.0);

    // u = a x1: Q = (3 + 12 a x1) e^{-4 a x1}, T = 0
    const double alpha = 0.25;
    PrescribedData lin = make("0.25*x1");
    double p[5] = {0.3, 0.1, -0.5, 0.2, std::sqrt(1 - 0.09 - 0.01 - 0.25 - 0.04)};
    double expect = (3.0 + 12.0 * alpha * p[0]) * std::exp(-4.0 * alpha * p[0]);
    CHECK(eval(lin.Q.expr(), p) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(std::abs(eval(lin.T.expr(), eq)) <= 1e-14);

    // u = x5^3: Q = (3 + 180 x5^3 - 72 x5) e^{-4 x5^3}, T = 3
    PrescribedData cub = make("x5^3");
    double x5 = p[4];
    double expect_q = (3.0 + 180.0 * x5 * x5 * x5 - 72.0 * x5) * std::exp(-4.0 * x5 * x5 * x5);
    CHECK(eval(cub.Q.expr(), p) == doctest::Approx(expect_q).epsilon(1e-11));
    double eq2[5] = {0.0, 0.6, 0.0, -0.8, 0.0};
    CHECK(eval(cub.T.expr(), eq2) == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("curvature integrals") {
    ScalarField zero(parse("0"));
    PrescribedData bg = make("0");
    auto [nq0, bt0] = curvature_integrals(zero, bg, rules().interior, rules().boundary);
    CHECK(nq0 == doctest::Approx(kFourPiSq).epsilon(1e-13));
    CHECK(std::abs(bt0) <= 1e-14);

    ScalarField cub(parse("x5^3"));
    PrescribedData data = make("x5^3");
    auto [nq, bt] = curvature_integrals(cub, data, rules().interior, rules().boundary);
    CHECK(nq == doctest::Approx(-2.0 * kPi * kPi).epsilon(1e-8));
    CHECK(bt == doctest::Approx(6.0 * kPi * kPi).epsilon(1e-8));

    // linearity in T
    PrescribedData doubled{data.Q, ScalarField(Expr(2.0) * data.T.expr())};
    auto [nq2, bt2] = curvature_integrals(cub, doubled, rules().interior, rules().boundary);
    CHECK(bt2 == doctest::Approx(2.0 * bt).epsilon(1e-14));
    CHECK(nq2 == nq);
}

TEST_CASE("gauss-bonnet-chern defect vanishes for manufactured data") {
    for (const char* u_src : {"0", "0.25*x1", "x5^3", "0.3*x1 + 0.2*x5^3",
                              "0.2*x1*x2 + 0.1*x5^3"}) {
        ScalarField u(parse(u_src));
        PrescribedData data = make(u_src);
        double defect = gbc_defect(u, data, rules().interior, rules().boundary);
        CHECK(std::abs(defect) <= 1e-7 * kFourPiSq);
    }
}

TEST_CASE("s functional closed forms") {
    CHECK(s_functional(ScalarField(parse("0")), rules().interior) == 0.0);
    double sc = s_functional(ScalarField(parse("0.7")), rules().interior);
    CHECK(sc == doctest::Approx(16.0 * kPi * kPi * 0.7).epsilon(1e-13));

    // S(x1) = 16 int x1^2 + 2 int (1 - x1^2)
    double m2 = hemisphere_monomial_moment(2, 0, 0, 0, 0);
    double vol = hemisphere_monomial_moment(0, 0, 0, 0, 0);
    double expect = 16.0 * m2 + 2.0 * (vol - m2);
    CHECK(s_functional(ScalarField(parse("x1")), rules().interior) ==
          doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("q bilinear properties") {
    const Rules& r = rules();
    ScalarField u(parse("x5^3"));
    ScalarField v(parse("x1^2"));
    double quv = q_bilinear(u, v, r.interior);
    double qvu = q_bilinear(v, u, r.interior);
    CHECK(quv == doctest::Approx(qvu).epsilon(1e-11));

    // q(u,u) + 12 int u = S(u)
    double lhs = q_bilinear(u, u, r.interior) + 12.0 * integrate(u.expr(), r.interior);
    CHECK(lhs == doctest::Approx(s_functional(u, r.interior)).epsilon(1e-10));

    // equivalence with the definition through P4 and P3
    double rhs = integrate(paneitz4(u).expr() * v.expr(), r.interior);
    BoundaryPoint q0(Vec5{1, 0, 0, 0, 0});
    double p3val = paneitz3(u, q0);  // constant 3 on the equator
    rhs += 2.0 * p3val * integrate(v.expr(), r.boundary);
    CHECK(quv == doctest::Approx(rhs).epsilon(1e-7));

    // positive semidefinite on the test battery
    for (const auto& [name, vexpr] : weak_test_functions())
        CHECK(q_bilinear(ScalarField(vexpr), ScalarField(vexpr), r.interior) >= -1e-10);
}

TEST_CASE("energy decomposition") {
    const Rules& r = rules();
    ScalarField zero(parse("0"));
    PrescribedData bg = make("0");
    CHECK(energy(zero, bg, r.interior, r.boundary) ==
          doctest::Approx(-kFourPiSq).epsilon(1e-13));

    ScalarField u(parse("0.3*x1 + 0.2*x5^3"));
    PrescribedData data = make("0.3*x1 + 0.2*x5^3");
    auto [nq, bt] = curvature_integrals(u, data, r.interior, r.boundary);
    double direct = s_functional(u, r.interior) - nq - (4.0 / 3.0) * bt;
    CHECK(energy(u, data, r.interior, r.boundary) == doctest::Approx(direct).epsilon(1e-15));
}

TEST_CASE("weak residual vanishes for manufactured solutions") {
    const Rules& r = rules();
    ScalarField zero(parse("0"));
    PrescribedData bg = make("0");
    for (const auto& [name, vexpr] : weak_test_functions()) {
        double res = weak_residual(zero, bg, ScalarField(vexpr), r.interior, r.boundary);
        CHECK(std::abs(res) <= 1e-10);
    }

    ScalarField u(parse("x5^3"));
    PrescribedData data = make("x5^3");
    for (const char* v_src : {"x1^2", "x1*x2", "x5^2"}) {
        ScaledValue sv =
            weak_residual_detail(u, data, ScalarField(parse(v_src)), r.interior, r.boundary);
        CHECK(std::abs(sv.value) <= 1e-7 * sv.scale);
    }
    // v = 0 gives exactly zero
    CHECK(weak_residual(u, data, ScalarField(parse("0")), r.interior, r.boundary) == 0.0);
}

TEST_CASE("cocycle identity") {
    const Rules& r = rules();
    ScalarField u(parse("0.3*x1 + 0.2*x5^3"));
    PrescribedData data = make("0.3*x1 + 0.2*x5^3");

    CHECK(cocycle_defect(u, data, ScalarField(parse("0")), r.interior, r.boundary) == 0.0);

    // u = 0 background: both sides reduce to S_g(v)
    ScalarField zero(parse("0"));
    PrescribedData bg = make("0");
    for (const char* v_src : {"x1", "x2*x3", "x5^2"}) {
        double d = cocycle_defect(zero, bg, ScalarField(parse(v_src)), r.interior, r.boundary);
        CHECK(std::abs(d) <= 1e-11);
    }

    ScalarField v(parse("0.5*x2*x3"));
    ScaledValue sv = cocycle_defect_detail(u, data, v, r.interior, r.boundary);
    CHECK(std::abs(sv.value) <= 1e-6 * sv.scale);

    for (const auto& [name, vexpr] : random_test_functions(3, 99u)) {
        ScaledValue d =
            cocycle_defect_detail(u, data, ScalarField(vexpr), r.interior, r.boundary);
        CHECK(std::abs(d.value) <= 1e-6 * d.scale);
    }
}
