#pragma once

#include <array>
#include <memory>
#include <stdexcept>

#include "qt/expr.hpp"
#include "qt/geom.hpp"
#include "qt/sphere.hpp"
#include "qt/tape.hpp"

namespace qt {

struct FlowError : std::runtime_error {
    explicit FlowError(const std::string& message) : std::runtime_error(message) {}
};

// Point of the closed unit 4-ball (stereographic image of the hemisphere).
struct BallPoint {
    Vec4 y;
    explicit BallPoint(const Vec4& v) : y(v) {
        if (norm(v) > 1.0 + 1e-12)
            throw std::invalid_argument("BallPoint must satisfy |y| <= 1, |y| = " +
                                        std::to_string(norm(v)));
    }
};

// Ball automorphism parameters: y -> Phi_a(R y).
struct MobiusMap {
    Vec4 a{};
    Mat4 R = identity4();

    MobiusMap() = default;
    MobiusMap(const Vec4& a_, const Mat4& R_) : a(a_), R(R_) {
        if (norm(a) >= 1.0 - 1e-9)
            throw std::invalid_argument("Mobius parameter needs |a| < 1");
        if (!is_orthogonal(R)) throw std::invalid_argument("rotation part must be orthogonal");
    }
};

// Stereographic projection from the south pole: hemisphere -> ball,
// identity on the equator.
BallPoint stereo(const SpherePoint& p);
SpherePoint stereo_inv(const BallPoint& y);

// Phi_a(R y) by the ball-automorphism formula.
BallPoint mobius_ball(const MobiusMap& m, const BallPoint& y);
Vec4 mobius_ball_raw(const Vec4& a, const Vec4& y);

// Boundary-preserving conformal diffeomorphism Psi = Pi^-1 Phi_a R Pi of
// the hemisphere, with its inverse, conformal factor (Psi* g = e^{2P} g)
// and ambient-expression forms of everything for symbolic work.
class ConformalMap {
  public:
    explicit ConformalMap(const MobiusMap& m);

    const MobiusMap& params() const { return m_; }

    SpherePoint forward(const SpherePoint& p) const;
    SpherePoint inverse(const SpherePoint& p) const;

    double factor(const SpherePoint& p) const;  // P(p)
    const ScalarField& factor_field() const { return factor_field_; }

    const std::array<Expr, 5>& forward_exprs() const { return fwd_; }
    const std::array<Expr, 5>& inverse_exprs() const { return inv_; }

    // Ambient Jacobian dPsi at p (5x5, row i = gradient of component i);
    // applied to tangent vectors it is the intrinsic differential.
    std::array<Vec5, 5> jacobian(const SpherePoint& p) const;

  private:
    MobiusMap m_;
    std::array<Expr, 5> fwd_;
    std::array<Expr, 5> inv_;
    ScalarField factor_field_;
    mutable std::shared_ptr<const Tape> jac_tape_;  // 25 outputs dPsi_i/dx_j
};

// Coefficients over the fixed basis of boundary-preserving conformal
// fields: B1..B6 rotations J_12, J_13, J_14, J_23, J_24, J_34 and
// B7..B10 gradient fields X_i = e_i - x_i x, i = 1..4.
struct AlgebraElement {
    std::array<double, 10> c{};

    static AlgebraElement basis(int j) {  // j in [0,10)
        AlgebraElement e;
        e.c.at(j) = 1.0;
        return e;
    }
    bool is_rotation_only() const {
        return c[6] == 0.0 && c[7] == 0.0 && c[8] == 0.0 && c[9] == 0.0;
    }
};

// Value of one basis field at an ambient point.
Vec5 algebra_basis_eval(int j, const double x[5]);

// Sum of the basis fields; tangent to the sphere and tangential to the
// equator at boundary points.
Vec5 algebra_eval(const AlgebraElement& c, const SpherePoint& p);
Vec5 algebra_eval_raw(const AlgebraElement& c, const double x[5]);

// div_g of the field: rotations are Killing (0), gradients give -4 x_i.
double divergence(const AlgebraElement& c, const SpherePoint& p);

// dPsi applied to the field at Psi^{-1}(p).
Vec5 pushforward(const ConformalMap& map, const AlgebraElement& c, const SpherePoint& p);

struct FlowResult {
    SpherePoint endpoint;
    double factor;  // P_t at the start point
};

enum class FactorMethod {
    GramFd,         // 1/8 log det of the finite-difference Gram matrix
    DivergenceOde,  // integrate dP/dt = div X / 4 along the flow
};

// Integrates the flow of the field for time t (RK4 with renormalization,
// exact plane rotations for rotation-only fields) and computes P_t at p.
// The Gram construction carries ~1e-11 cancellation noise from its 1e-5
// differencing step; the ODE route is smooth and is used where the factor
// gets differentiated again.
FlowResult flow(const AlgebraElement& c, const SpherePoint& p, double t,
                FactorMethod method = FactorMethod::GramFd);

// Endpoint only (skips the factor).
SpherePoint flow_endpoint(const AlgebraElement& c, const SpherePoint& p, double t);

// exp(t Omega) on the first four coordinates for a rotation-only element.
Mat4 rotation_flow_matrix(const AlgebraElement& c, double t);

}  // namespace qt
