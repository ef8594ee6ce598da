#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "qt/expr.hpp"
#include "qt/geom.hpp"
#include "qt/tape.hpp"

namespace qt {

// A field on S^4_+ (or S^3), carried by an on-sphere Expr. The cached
// degree-0 extension feeds the intrinsic operators; the raw expression
// is any other valid extension, so tangential quantities can use its
// (cheaper) ambient gradient with a projection.
class ScalarField {
  public:
    ScalarField() : ScalarField(Expr(0.0)) {}
    explicit ScalarField(Expr e);

    const Expr& expr() const { return expr_; }
    const Expr& extension() const;  // degree-0 homogeneous extension

    double value(const SpherePoint& p) const;
    double value(const BoundaryPoint& q) const;

    // Tape over [f, d1 f .. d5 f] of the raw on-sphere expression.
    const Tape& grad_tape() const;
    // Tape over [F, d1 F .. d5 F] of the degree-0 extension.
    const Tape& extension_grad_tape() const;

    ScalarField operator+(const ScalarField& o) const { return ScalarField(expr_ + o.expr_); }
    ScalarField operator*(double c) const { return ScalarField(expr_ * Expr(c)); }

  private:
    Expr expr_;
    mutable std::shared_ptr<const Expr> extension_;
    mutable std::shared_ptr<const Tape> grad_tape_;
    mutable std::shared_ptr<const Tape> ext_grad_tape_;
};

// Field whose boundary normal derivative violates the Neumann condition.
struct NotInH : std::runtime_error {
    explicit NotInH(const std::string& message) : std::runtime_error(message) {}
};

// Intrinsic gradient: tangential projection of the ambient gradient of
// any extension; satisfies <grad, p> = 0.
Vec5 grad(const ScalarField& f, const SpherePoint& p);

// Laplace-Beltrami via the flat Laplacian of the degree-0 extension,
// restricted back to the sphere; iterable.
ScalarField laplace(const ScalarField& f);

// Paneitz operator on the round S^4: laplace(laplace f) - 2 laplace f.
ScalarField paneitz4(const ScalarField& f);

// df/dnu at the equator, nu = -x5: equals -d5 F of the degree-0 extension.
double normal_derivative(const ScalarField& f, const BoundaryPoint& q);

// Third-order boundary operator -1/2 d(laplace f)/dnu; requires the
// Neumann condition at q (checked to 1e-9).
double paneitz3(const ScalarField& f, const BoundaryPoint& q);

// Directional derivative <X(p), grad f(p)> for a tangent evaluator X.
double dirderiv(const std::function<Vec5(const SpherePoint&)>& X, const ScalarField& f,
                const SpherePoint& p);

// Tangential gradient within S^3 at a boundary point: ambient gradient
// of any extension projected onto the tangent space of the equator.
Vec5 boundary_grad(const ScalarField& f, const BoundaryPoint& q);

}  // namespace qt
