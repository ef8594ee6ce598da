#include "qt/conformal.hpp"

#include <cmath>
#include <vector>

namespace qt {

BallPoint stereo(const SpherePoint& p) {
    if (p.x[4] <= -1.0 + 1e-9)
        throw std::invalid_argument("stereographic projection undefined near the south pole");
    double d = 1.0 + p.x[4];
    return BallPoint({p.x[0] / d, p.x[1] / d, p.x[2] / d, p.x[3] / d});
}

SpherePoint stereo_inv(const BallPoint& y) {
    double s = dot(y.y, y.y);
    double d = 1.0 + s;
    Vec5 x{2.0 * y.y[0] / d, 2.0 * y.y[1] / d, 2.0 * y.y[2] / d, 2.0 * y.y[3] / d,
           (1.0 - s) / d};
    return SpherePoint::project(x);
}

Vec4 mobius_ball_raw(const Vec4& a, const Vec4& y) {
    double ay = dot(a, y);
    double yy = dot(y, y);
    double aa = dot(a, a);
    double den = 1.0 + 2.0 * ay + aa * yy;
    double cy = 1.0 - aa;
    double ca = 1.0 + 2.0 * ay + yy;
    Vec4 out;
    for (int i = 0; i < 4; ++i) out[i] = (cy * y[i] + ca * a[i]) / den;
    return out;
}

BallPoint mobius_ball(const MobiusMap& m, const BallPoint& y) {
    Vec4 out = mobius_ball_raw(m.a, matvec(m.R, y.y));
    // clamp roundoff just outside the closed ball
    double n = norm(out);
    if (n > 1.0 && n < 1.0 + 1e-12)
        for (double& v : out) v /= n;
    return BallPoint(out);
}

namespace {

// Ambient expressions for Pi^-1 ∘ M2 ∘ Phi_b ∘ M1 ∘ Pi and the factor
// of the sphere map, using
//   y_i = x_i/(1+x5), S = |y|^2, z = M1 y, A = b.z,
//   D = 1 + 2A + |b|^2 S, N_i = (1-|b|^2) z_i + (1 + 2A + S) b_i,
//   E = 2D - (1-|b|^2)(1-S),
//   out_i = 2 (M2 N)_i / E, out_5 = (1-|b|^2)(1-S)/E,
//   P = log(1-|b|^2) + log(1+S) - log(E).
struct MapExprs {
    std::array<Expr, 5> out;
    Expr factor;
};

MapExprs build_map_exprs(const Vec4& b, const Mat4& M1, const Mat4& M2) {
    Expr one(1.0);
    Expr den = one + Expr::var(5);
    std::array<Expr, 4> y;
    for (int i = 0; i < 4; ++i) y[i] = Expr::var(i + 1) / den;
    Expr S = y[0] * y[0];
    for (int i = 1; i < 4; ++i) S = S + y[i] * y[i];

    std::array<Expr, 4> z;
    for (int i = 0; i < 4; ++i) {
        z[i] = Expr(0.0);
        for (int j = 0; j < 4; ++j) z[i] = z[i] + Expr(M1[i][j]) * y[j];
    }
    Expr A(0.0);
    for (int i = 0; i < 4; ++i) A = A + Expr(b[i]) * z[i];
    double bb = dot(b, b);
    Expr D = one + Expr(2.0) * A + Expr(bb) * S;
    Expr ca = one + Expr(2.0) * A + S;
    std::array<Expr, 4> N;
    for (int i = 0; i < 4; ++i) N[i] = Expr(1.0 - bb) * z[i] + ca * Expr(b[i]);
    Expr E = Expr(2.0) * D - Expr(1.0 - bb) * (one - S);

    MapExprs m;
    for (int i = 0; i < 4; ++i) {
        Expr vi(0.0);
        for (int j = 0; j < 4; ++j) vi = vi + Expr(M2[i][j]) * N[j];
        m.out[i] = Expr(2.0) * vi / E;
    }
    m.out[4] = Expr(1.0 - bb) * (one - S) / E;
    m.factor = log(Expr(1.0 - bb) * (one + S)) - log(E);
    return m;
}

Vec4 neg(const Vec4& a) { return {-a[0], -a[1], -a[2], -a[3]}; }

}  // namespace

ConformalMap::ConformalMap(const MobiusMap& m) : m_(m) {
    MapExprs fwd = build_map_exprs(m.a, m.R, identity4());
    MapExprs inv = build_map_exprs(neg(m.a), identity4(), transpose(m.R));
    fwd_ = fwd.out;
    inv_ = inv.out;
    factor_field_ = ScalarField(fwd.factor);

    // The gyro-inverse Phi_{-a} is design-supplied; check it round-trip
    // before the map is used.
    const Vec5 probes[] = {
        {0.0, 0.0, 0.0, 0.0, 1.0},
        {0.6, 0.0, 0.48, 0.0, 0.64},
        {-0.3, 0.5, -0.1, 0.4, std::sqrt(1.0 - 0.51)},
        {0.0, -0.8, 0.0, 0.0, 0.6},
    };
    for (const Vec5& v : probes) {
        SpherePoint p(normalized(v));
        SpherePoint q = inverse(forward(p));
        double err = 0.0;
        for (int i = 0; i < 5; ++i) err = std::max(err, std::abs(q.x[i] - p.x[i]));
        if (err > 1e-11)
            throw std::runtime_error("Mobius inverse round-trip failed, error " +
                                     std::to_string(err));
    }
}

SpherePoint ConformalMap::forward(const SpherePoint& p) const {
    BallPoint y = stereo(p);
    return stereo_inv(mobius_ball(m_, y));
}

SpherePoint ConformalMap::inverse(const SpherePoint& p) const {
    BallPoint y = stereo(p);
    Vec4 w = mobius_ball_raw(neg(m_.a), y.y);
    Vec4 z = matvec(transpose(m_.R), w);
    double n = norm(z);
    if (n > 1.0 && n < 1.0 + 1e-12)
        for (double& v : z) v /= n;
    return stereo_inv(BallPoint(z));
}

double ConformalMap::factor(const SpherePoint& p) const {
    BallPoint y = stereo(p);
    double S = dot(y.y, y.y);
    Vec4 z = matvec(m_.R, y.y);
    double A = dot(m_.a, z);
    double aa = dot(m_.a, m_.a);
    double D = 1.0 + 2.0 * A + aa * S;
    double E = 2.0 * D - (1.0 - aa) * (1.0 - S);
    return std::log((1.0 - aa) * (1.0 + S)) - std::log(E);
}

std::array<Vec5, 5> ConformalMap::jacobian(const SpherePoint& p) const {
    if (!jac_tape_) {
        std::vector<Expr> outs;
        outs.reserve(25);
        for (int i = 0; i < 5; ++i)
            for (int j = 1; j <= 5; ++j) outs.push_back(diff(fwd_[i], j));
        jac_tape_ = std::make_shared<const Tape>(outs);
    }
    std::vector<double> scratch(jac_tape_->scratch_size());
    std::vector<double> out(25);
    jac_tape_->eval(p.data(), scratch.data(), out.data());
    std::array<Vec5, 5> J;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) J[i][j] = out[i * 5 + j];
    return J;
}

Vec5 algebra_basis_eval(int j, const double x[5]) {
    static constexpr int kPlane[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    Vec5 v{};
    if (j < 6) {
        int i = kPlane[j][0], k = kPlane[j][1];
        v[k] = x[i];
        v[i] = -x[k];
    } else {
        int i = j - 6;
        for (int k = 0; k < 5; ++k) v[k] = -x[i] * x[k];
        v[i] += 1.0;
    }
    return v;
}

Vec5 algebra_eval_raw(const AlgebraElement& c, const double x[5]) {
    Vec5 v{};
    for (int j = 0; j < 10; ++j) {
        if (c.c[j] == 0.0) continue;
        Vec5 b = algebra_basis_eval(j, x);
        for (int k = 0; k < 5; ++k) v[k] += c.c[j] * b[k];
    }
    return v;
}

Vec5 algebra_eval(const AlgebraElement& c, const SpherePoint& p) {
    return algebra_eval_raw(c, p.data());
}

double divergence(const AlgebraElement& c, const SpherePoint& p) {
    double d = 0.0;
    for (int i = 0; i < 4; ++i) d += c.c[6 + i] * (-4.0 * p.x[i]);
    return d;
}

Vec5 pushforward(const ConformalMap& map, const AlgebraElement& c, const SpherePoint& p) {
    SpherePoint q = map.inverse(p);
    Vec5 v = algebra_eval(c, q);
    std::array<Vec5, 5> J = map.jacobian(q);
    Vec5 w{};
    for (int i = 0; i < 5; ++i) w[i] = dot(J[i], v);
    // clean the tangential projection at p
    double radial = dot(w, p.x);
    for (int i = 0; i < 5; ++i) w[i] -= radial * p.x[i];
    return w;
}

namespace {

// Exact flow of a rotation-only element: exp(t Omega) on the first four
// coordinates, Omega antisymmetric.
Mat4 rotation_generator(const AlgebraElement& c) {
    static constexpr int kPlane[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    Mat4 om{};
    for (int j = 0; j < 6; ++j) {
        int i = kPlane[j][0], k = kPlane[j][1];
        om[k][i] += c.c[j];
        om[i][k] -= c.c[j];
    }
    return om;
}

Mat4 mat_exp(const Mat4& m) {
    // scaling and squaring with a Taylor series; ||m|| is small here
    double maxabs = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) maxabs = std::max(maxabs, std::abs(m[i][j]));
    int squarings = 0;
    double scale = 1.0;
    while (maxabs * scale > 0.25) {
        scale *= 0.5;
        ++squarings;
    }
    Mat4 a{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a[i][j] = m[i][j] * scale;
    Mat4 result = identity4();
    Mat4 term = identity4();
    for (int k = 1; k <= 16; ++k) {
        term = matmul(term, a);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) term[i][j] /= k;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) result[i][j] += term[i][j];
    }
    for (int s = 0; s < squarings; ++s) result = matmul(result, result);
    return result;
}

// RK4 on the augmented state (x, p) with xdot = X(x), pdot = div X / 4;
// p accumulates the conformal factor by its cocycle property.
std::pair<Vec5, double> rk4_flow(const AlgebraElement& c, Vec5 x, double t) {
    const double max_step = 1e-3;
    int nsteps = std::max(1, static_cast<int>(std::ceil(std::abs(t) / max_step)));
    double dt = t / nsteps;
    double p = 0.0;
    auto divq = [&c](const Vec5& v) {
        double d = 0.0;
        for (int i = 0; i < 4; ++i) d += c.c[6 + i] * (-4.0 * v[i]);
        return d;
    };
    for (int s = 0; s < nsteps; ++s) {
        Vec5 k1 = algebra_eval_raw(c, x.data());
        Vec5 x2, x3, x4;
        for (int i = 0; i < 5; ++i) x2[i] = x[i] + 0.5 * dt * k1[i];
        Vec5 k2 = algebra_eval_raw(c, x2.data());
        for (int i = 0; i < 5; ++i) x3[i] = x[i] + 0.5 * dt * k2[i];
        Vec5 k3 = algebra_eval_raw(c, x3.data());
        for (int i = 0; i < 5; ++i) x4[i] = x[i] + dt * k3[i];
        Vec5 k4 = algebra_eval_raw(c, x4.data());
        p += dt / 6.0 * (divq(x) + 2.0 * divq(x2) + 2.0 * divq(x3) + divq(x4)) / 4.0;
        for (int i = 0; i < 5; ++i)
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        double n = norm(x);
        if (std::abs(n - 1.0) > 1e-6) throw FlowError("flow step left the sphere");
        for (int i = 0; i < 5; ++i) x[i] /= n;
    }
    return {x, p};
}

Vec5 flow_raw(const AlgebraElement& c, const Vec5& x, double t) {
    if (c.is_rotation_only()) {
        Mat4 rot = rotation_flow_matrix(c, t);
        Vec4 xy{x[0], x[1], x[2], x[3]};
        Vec4 ry = matvec(rot, xy);
        return {ry[0], ry[1], ry[2], ry[3], x[4]};
    }
    return rk4_flow(c, x, t).first;
}

// Orthonormal tangent frame at p by Gram-Schmidt over projected axes.
std::array<Vec5, 4> tangent_frame(const Vec5& p) {
    std::array<Vec5, 4> frame;
    int found = 0;
    for (int k = 0; k < 5 && found < 4; ++k) {
        Vec5 v{};
        v[k] = 1.0;
        double r = dot(v, p);
        for (int i = 0; i < 5; ++i) v[i] -= r * p[i];
        for (int f = 0; f < found; ++f) {
            double pr = dot(v, frame[f]);
            for (int i = 0; i < 5; ++i) v[i] -= pr * frame[f][i];
        }
        double n = norm(v);
        if (n < 1e-6) continue;
        for (int i = 0; i < 5; ++i) v[i] /= n;
        frame[found++] = v;
    }
    if (found < 4) throw FlowError("failed to build tangent frame");
    return frame;
}

double det4(const Mat4& m) {
    Mat4 a = m;
    double det = 1.0;
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int rw = col + 1; rw < 4; ++rw)
            if (std::abs(a[rw][col]) > std::abs(a[piv][col])) piv = rw;
        if (a[piv][col] == 0.0) return 0.0;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            det = -det;
        }
        det *= a[col][col];
        for (int rw = col + 1; rw < 4; ++rw) {
            double f = a[rw][col] / a[col][col];
            for (int cc = col; cc < 4; ++cc) a[rw][cc] -= f * a[col][cc];
        }
    }
    return det;
}

}  // namespace

Mat4 rotation_flow_matrix(const AlgebraElement& c, double t) {
    Mat4 om = rotation_generator(c);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) om[i][j] *= t;
    return mat_exp(om);
}

SpherePoint flow_endpoint(const AlgebraElement& c, const SpherePoint& p, double t) {
    if (std::abs(t) > 0.5 + 1e-12) throw FlowError("|t| must be <= 0.5");
    Vec5 x = flow_raw(c, p.x, t);
    if (x[4] < -1e-9) throw FlowError("flow left the hemisphere");
    if (x[4] < 0.0) x[4] = 0.0;
    return SpherePoint(normalized(x));
}

FlowResult flow(const AlgebraElement& c, const SpherePoint& p, double t, FactorMethod method) {
    if (method == FactorMethod::DivergenceOde) {
        if (std::abs(t) > 0.5 + 1e-12) throw FlowError("|t| must be <= 0.5");
        if (c.is_rotation_only()) return FlowResult{flow_endpoint(c, p, t), 0.0};
        auto [x, factor] = rk4_flow(c, p.x, t);
        if (x[4] < -1e-9) throw FlowError("flow left the hemisphere");
        if (x[4] < 0.0) x[4] = 0.0;
        return FlowResult{SpherePoint(normalized(x)), factor};
    }
    SpherePoint endpoint = flow_endpoint(c, p, t);

    const double h = 1e-5;  // differential step for the Gram factor
    std::array<Vec5, 4> frame = tangent_frame(p.x);
    std::array<Vec5, 4> cols;
    for (int k = 0; k < 4; ++k) {
        Vec5 plus = p.x, minus = p.x;
        for (int i = 0; i < 5; ++i) {
            plus[i] += h * frame[k][i];
            minus[i] -= h * frame[k][i];
        }
        Vec5 fp = flow_raw(c, normalized(plus), t);
        Vec5 fm = flow_raw(c, normalized(minus), t);
        for (int i = 0; i < 5; ++i) cols[k][i] = (fp[i] - fm[i]) / (2.0 * h);
    }
    Mat4 gram;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) gram[i][j] = dot(cols[i], cols[j]);
    // gram = e^{2P} I_4, so det = e^{8P}
    double det = det4(gram);
    if (det <= 0.0) throw FlowError("degenerate differential along flow");
    return FlowResult{endpoint, std::log(det) / 8.0};
}

}  // namespace qt
