#include "qt/functionals.hpp"

#include <cmath>
#include <numbers>

namespace qt {

namespace {

constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

// <P grad f, P grad g> from raw ambient gradients at a sphere point.
double tangential_dot(const Vec5& p, const double* gf, const double* gg) {
    double rf = 0.0, rg = 0.0, fg = 0.0;
    for (int i = 0; i < 5; ++i) {
        rf += gf[i] * p[i];
        rg += gg[i] * p[i];
        fg += gf[i] * gg[i];
    }
    return fg - rf * rg;
}

}  // namespace

CandidateSolution::CandidateSolution(ScalarField u, const QuadRule& boundary)
    : u_(std::move(u)), max_nd_(0.0) {
    if (boundary.domain != Domain::Boundary)
        throw std::invalid_argument("CandidateSolution needs a boundary rule");
    Tape nd(diff(u_.extension(), 5));
    std::vector<double> scratch(nd.scratch_size());
    for (const Vec5& q : boundary.points)
        max_nd_ = std::max(max_nd_, std::abs(nd.eval1(q.data(), scratch)));
    if (max_nd_ > 1e-9)
        throw NotInH("candidate not in H: max |du/dnu| = " + std::to_string(max_nd_) +
                     " on the equator");
}

PrescribedData manufacture(const CandidateSolution& cand) {
    const ScalarField& u = cand.u();
    ScalarField p4 = paneitz4(u);
    Expr qexpr = (p4.expr() + Expr(6.0)) * exp(Expr(-4.0) * u.expr()) / Expr(2.0);
    // T(q) = -d(lap u)/dnu e^{-3u}/2; the normal derivative of the
    // degree-0 extension is -d5, so T = +d5(ext(lap u)) e^{-3u} / 2.
    Expr texpr = diff(laplace(u).extension(), 5) * exp(Expr(-3.0) * u.expr()) / Expr(2.0);
    return PrescribedData{ScalarField(qexpr), ScalarField(texpr)};
}

std::pair<double, double> curvature_integrals(const ScalarField& u, const PrescribedData& data,
                                              const QuadRule& interior, const QuadRule& boundary) {
    double nq = integrate(data.Q.expr() * exp(Expr(4.0) * u.expr()), interior);
    double bt = integrate(data.T.expr() * exp(Expr(3.0) * u.expr()), boundary);
    return {nq, bt};
}

double gbc_defect(const ScalarField& u, const PrescribedData& data, const QuadRule& interior,
                  const QuadRule& boundary) {
    auto [nq, bt] = curvature_integrals(u, data, interior, boundary);
    return nq + bt - kFourPiSq;
}

double s_functional(const ScalarField& u, const QuadRule& interior) {
    ScalarField lap = laplace(u);
    Tape tape({lap.expr(), u.expr(), diff(u.expr(), 1), diff(u.expr(), 2), diff(u.expr(), 3),
               diff(u.expr(), 4), diff(u.expr(), 5)});
    double sums[3];
    integrate_multi(tape, interior, 3,
                    [](const Vec5& p, const double* out, double* terms) {
                        terms[0] = out[0] * out[0];
                        terms[1] = tangential_dot(p, out + 2, out + 2);
                        terms[2] = out[1];
                    },
                    sums);
    return sums[0] + 2.0 * sums[1] + 12.0 * sums[2];
}

double q_bilinear(const ScalarField& u, const ScalarField& v, const QuadRule& interior) {
    ScalarField lu = laplace(u);
    ScalarField lv = laplace(v);
    std::vector<Expr> outs{lu.expr(), lv.expr()};
    for (int i = 1; i <= 5; ++i) outs.push_back(diff(u.expr(), i));
    for (int i = 1; i <= 5; ++i) outs.push_back(diff(v.expr(), i));
    Tape tape(outs);
    double sums[2];
    integrate_multi(tape, interior, 2,
                    [](const Vec5& p, const double* out, double* terms) {
                        terms[0] = out[0] * out[1];
                        terms[1] = tangential_dot(p, out + 2, out + 7);
                    },
                    sums);
    return sums[0] + 2.0 * sums[1];
}

double energy(const ScalarField& u, const PrescribedData& data, const QuadRule& interior,
              const QuadRule& boundary) {
    auto [nq, bt] = curvature_integrals(u, data, interior, boundary);
    return s_functional(u, interior) - nq - (4.0 / 3.0) * bt;
}

double weak_residual(const ScalarField& u, const PrescribedData& data, const ScalarField& v,
                     const QuadRule& interior, const QuadRule& boundary) {
    ScalarField lu = laplace(u);
    ScalarField lv = laplace(v);
    std::vector<Expr> outs{lu.expr(), lv.expr(), v.expr(),
                           data.Q.expr() * exp(Expr(4.0) * u.expr())};
    for (int i = 1; i <= 5; ++i) outs.push_back(diff(u.expr(), i));
    for (int i = 1; i <= 5; ++i) outs.push_back(diff(v.expr(), i));
    Tape tape(outs);
    double sums[1];
    integrate_multi(tape, interior, 1,
                    [](const Vec5& p, const double* out, double* terms) {
                        terms[0] = out[0] * out[1] + 2.0 * tangential_dot(p, out + 4, out + 9) +
                                   6.0 * out[2] - 2.0 * out[3] * out[2];
                    },
                    sums);
    double bterm =
        integrate(Expr(2.0) * data.T.expr() * exp(Expr(3.0) * u.expr()) * v.expr(), boundary);
    return sums[0] - bterm;
}

double cocycle_defect(const ScalarField& u, const PrescribedData& data, const ScalarField& v,
                      const QuadRule& interior, const QuadRule& boundary) {
    ScalarField upv = u + v;
    double lhs = s_functional(upv, interior);
    double su = s_functional(u, interior);
    double qvv = q_bilinear(v, v, interior);
    double qv =
        integrate(data.Q.expr() * v.expr() * exp(Expr(4.0) * u.expr()), interior);
    double tv = integrate(data.T.expr() * v.expr() * exp(Expr(3.0) * u.expr()), boundary);
    double s_tilde = qvv + 4.0 * qv + 4.0 * tv;
    return lhs - su - s_tilde;
}

}  // namespace qt
