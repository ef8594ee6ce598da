#include "qt/sphere.hpp"

#include <cmath>
#include <vector>

namespace qt {

ScalarField::ScalarField(Expr e) : expr_(std::move(e)) {}

const Expr& ScalarField::extension() const {
    if (!extension_) extension_ = std::make_shared<const Expr>(homogenize0(expr_));
    return *extension_;
}

const Tape& ScalarField::grad_tape() const {
    if (!grad_tape_) grad_tape_ = std::make_shared<const Tape>(gradient_tape(expr_));
    return *grad_tape_;
}

const Tape& ScalarField::extension_grad_tape() const {
    if (!ext_grad_tape_) ext_grad_tape_ = std::make_shared<const Tape>(gradient_tape(extension()));
    return *ext_grad_tape_;
}

double ScalarField::value(const SpherePoint& p) const { return eval(expr_, p.data()); }
double ScalarField::value(const BoundaryPoint& q) const { return eval(expr_, q.data()); }

Vec5 grad(const ScalarField& f, const SpherePoint& p) {
    std::vector<double> scratch(f.grad_tape().scratch_size());
    double out[6];
    f.grad_tape().eval(p.data(), scratch.data(), out);
    double radial = 0.0;
    for (int i = 0; i < 5; ++i) radial += out[i + 1] * p.x[i];
    Vec5 g;
    for (int i = 0; i < 5; ++i) g[i] = out[i + 1] - radial * p.x[i];
    return g;
}

ScalarField laplace(const ScalarField& f) {
    const Expr& F = f.extension();
    Expr lap(0.0);
    for (int i = 1; i <= 5; ++i) lap = lap + diff(diff(F, i), i);
    return ScalarField(restrict_to_sphere(lap));
}

ScalarField paneitz4(const ScalarField& f) {
    ScalarField lf = laplace(f);
    return ScalarField(laplace(lf).expr() - Expr(2.0) * lf.expr());
}

double normal_derivative(const ScalarField& f, const BoundaryPoint& q) {
    return -eval(diff(f.extension(), 5), q.data());
}

double paneitz3(const ScalarField& f, const BoundaryPoint& q) {
    double nd = normal_derivative(f, q);
    if (std::abs(nd) > 1e-9)
        throw NotInH("field not in H: normal derivative " + std::to_string(nd) +
                     " at boundary point");
    return -0.5 * normal_derivative(laplace(f), q);
}

double dirderiv(const std::function<Vec5(const SpherePoint&)>& X, const ScalarField& f,
                const SpherePoint& p) {
    return dot(X(p), grad(f, p));
}

Vec5 boundary_grad(const ScalarField& f, const BoundaryPoint& q) {
    std::vector<double> scratch(f.grad_tape().scratch_size());
    double out[6];
    f.grad_tape().eval(q.data(), scratch.data(), out);
    double radial = 0.0;
    for (int i = 0; i < 4; ++i) radial += out[i + 1] * q.x[i];
    Vec5 g;
    for (int i = 0; i < 4; ++i) g[i] = out[i + 1] - radial * q.x[i];
    g[4] = 0.0;  // kill the normal-to-S3 directions (e5 and radial)
    return g;
}

}  // namespace qt
