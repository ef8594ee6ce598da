#include "qt/kwcert.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "qt/parallel.hpp"

namespace qt {

namespace {

// X(f) at a sphere point from the raw gradient outputs [f, d1..d5]
// of a gradient tape: tangential projection applied to the gradient.
double field_action(const Vec5& p, const Vec5& X, const double* grad_out) {
    double radial = 0.0, xg = 0.0, xp = 0.0;
    for (int i = 0; i < 5; ++i) {
        radial += grad_out[i + 1] * p[i];
        xg += grad_out[i + 1] * X[i];
        xp += X[i] * p[i];
    }
    return xg - radial * xp;
}

// Boundary variant: project the gradient onto the tangent space of S^3
// (drop the e5 and radial-in-R^4 components).
double boundary_field_action(const Vec5& q, const Vec5& X, const double* grad_out) {
    double radial = 0.0;
    for (int i = 0; i < 4; ++i) radial += grad_out[i + 1] * q[i];
    double v = 0.0;
    for (int i = 0; i < 4; ++i) v += X[i] * (grad_out[i + 1] - radial * q[i]);
    return v;
}

void check_admissible(const VectorField& X) {
    const Vec5 interior_probes[] = {
        {0.0, 0.0, 0.0, 0.0, 1.0},
        {0.6, 0.0, 0.48, 0.0, 0.64},
        {-0.3, 0.5, -0.1, 0.4, std::sqrt(1.0 - 0.51)},
    };
    for (const Vec5& v : interior_probes) {
        Vec5 p = normalized(v);
        Vec5 x = X(p);
        if (std::abs(dot(x, p)) > 1e-8)
            throw std::invalid_argument("vector field is not tangent to the sphere");
    }
    const Vec5 boundary_probes[] = {
        {1.0, 0.0, 0.0, 0.0, 0.0},
        {0.0, 0.6, -0.8, 0.0, 0.0},
        {0.5, 0.5, 0.5, 0.5, 0.0},
    };
    for (const Vec5& q : boundary_probes) {
        Vec5 x = X(normalized(q));
        if (std::abs(x[4]) > 1e-8)
            throw std::invalid_argument("vector field does not preserve the boundary");
    }
}

}  // namespace

VectorField basis_field(const AlgebraElement& c) {
    return [c](const Vec5& x) { return algebra_eval_raw(c, x.data()); };
}

VectorField pushforward_field(const ConformalMap& map, const AlgebraElement& c) {
    auto shared = std::make_shared<ConformalMap>(map);
    return [shared, c](const Vec5& x) {
        return pushforward(*shared, c, SpherePoint::project(x));
    };
}

KWResidual kw_residual(const ScalarField& u, const PrescribedData& data, const VectorField& X,
                       const QuadRule& interior, const QuadRule& boundary) {
    check_admissible(X);

    std::vector<Expr> iouts{data.Q.expr()};
    for (int i = 1; i <= 5; ++i) iouts.push_back(diff(data.Q.expr(), i));
    iouts.push_back(exp(Expr(4.0) * u.expr()));
    Tape itape(iouts);
    double isums[3];
    integrate_multi(itape, interior, 3,
                    [&X](const Vec5& p, const double* out, double* terms) {
                        double xq = field_action(p, X(p), out);
                        double w = out[6];
                        terms[0] = xq * w;
                        terms[1] = std::abs(xq) * w;
                        terms[2] = std::abs(out[0]) * w;
                    },
                    isums);

    std::vector<Expr> bouts{data.T.expr()};
    for (int i = 1; i <= 5; ++i) bouts.push_back(diff(data.T.expr(), i));
    bouts.push_back(exp(Expr(3.0) * u.expr()));
    Tape btape(bouts);
    double bsums[3];
    integrate_multi(btape, boundary, 3,
                    [&X](const Vec5& q, const double* out, double* terms) {
                        double xt = boundary_field_action(q, X(q), out);
                        double w = out[6];
                        terms[0] = xt * w;
                        terms[1] = std::abs(xt) * w;
                        terms[2] = std::abs(out[0]) * w;
                    },
                    bsums);

    // A field can annihilate the data identically; the 1e-8 data-scale
    // floor keeps such entries from reporting a noise/noise ratio.
    double data_scale = isums[2] + (4.0 / 3.0) * bsums[2];
    KWResidual r;
    r.raw = isums[0] + (4.0 / 3.0) * bsums[0];
    r.normalization = isums[1] + (4.0 / 3.0) * bsums[1] + 1e-8 * data_scale + 1e-300;
    r.normalized = r.raw / r.normalization;
    return r;
}

KWReport kw_report(const ScalarField& u, const PrescribedData& data, const QuadRule& interior,
                   const QuadRule& boundary, double tolerance) {
    // One streaming pass evaluates the shared tapes once per node for
    // all ten basis fields.
    std::vector<Expr> iouts{data.Q.expr()};
    for (int i = 1; i <= 5; ++i) iouts.push_back(diff(data.Q.expr(), i));
    iouts.push_back(exp(Expr(4.0) * u.expr()));
    Tape itape(iouts);
    double isums[21];
    integrate_multi(itape, interior, 21,
                    [](const Vec5& p, const double* out, double* terms) {
                        double w = out[6];
                        for (int j = 0; j < 10; ++j) {
                            Vec5 X = algebra_basis_eval(j, p.data());
                            double xq = field_action(p, X, out);
                            terms[2 * j] = xq * w;
                            terms[2 * j + 1] = std::abs(xq) * w;
                        }
                        terms[20] = std::abs(out[0]) * w;
                    },
                    isums);

    std::vector<Expr> bouts{data.T.expr()};
    for (int i = 1; i <= 5; ++i) bouts.push_back(diff(data.T.expr(), i));
    bouts.push_back(exp(Expr(3.0) * u.expr()));
    Tape btape(bouts);
    double bsums[21];
    integrate_multi(btape, boundary, 21,
                    [](const Vec5& q, const double* out, double* terms) {
                        double w = out[6];
                        for (int j = 0; j < 10; ++j) {
                            Vec5 X = algebra_basis_eval(j, q.data());
                            double xt = boundary_field_action(q, X, out);
                            terms[2 * j] = xt * w;
                            terms[2 * j + 1] = std::abs(xt) * w;
                        }
                        terms[20] = std::abs(out[0]) * w;
                    },
                    bsums);

    double data_scale = isums[20] + (4.0 / 3.0) * bsums[20];
    KWReport rep;
    rep.tolerance = tolerance;
    rep.max_normalized = 0.0;
    for (int j = 0; j < 10; ++j) {
        KWReport::Entry e;
        e.field_index = j;
        e.raw = isums[2 * j] + (4.0 / 3.0) * bsums[2 * j];
        e.normalization =
            isums[2 * j + 1] + (4.0 / 3.0) * bsums[2 * j + 1] + 1e-8 * data_scale + 1e-300;
        e.normalized = e.raw / e.normalization;
        rep.max_normalized = std::max(rep.max_normalized, std::abs(e.normalized));
        rep.entries.push_back(e);
    }
    rep.pass = rep.max_normalized < tolerance;
    return rep;
}

// ---------------------------------------------------------------------------
// Orbit derivative check

namespace {

// Numeric curve value u_t(x) = u(phi_t(x)) + P_t(x) for |x| ~ 1, as a
// degree-0 extension (the argument is normalized first).
class CurveEvaluator {
  public:
    CurveEvaluator(const ScalarField& u, const AlgebraElement& c, double t)
        : tape_(u.expr()), c_(c), t_(t) {}

    double operator()(const Vec5& x, std::vector<double>& scratch) const {
        SpherePoint p = SpherePoint::project(x);
        // the ODE factor is smooth enough to difference spatially
        FlowResult fr = flow(c_, p, t_, FactorMethod::DivergenceOde);
        return tape_.eval1(fr.endpoint.data(), scratch) + fr.factor;
    }

  private:
    Tape tape_;
    AlgebraElement c_;
    double t_;
};

struct CurveFunctionals {
    double n_q, b_t, s;
};

// Rotation-only elements flow by a linear map, so u_t = u o phi_t is an
// Expr and the functionals evaluate through the symbolic path.
CurveFunctionals curve_functionals_rotation(const ScalarField& u, const PrescribedData& data,
                                            const AlgebraElement& c, double t,
                                            const QuadRule& interior, const QuadRule& boundary) {
    Mat4 rot = rotation_flow_matrix(c, t);
    Expr map[5];
    for (int i = 0; i < 4; ++i) {
        Expr comp(0.0);
        for (int j = 0; j < 4; ++j) comp = comp + Expr(rot[i][j]) * Expr::var(j + 1);
        map[i] = comp;
    }
    map[4] = Expr::var(5);
    ScalarField ut(compose(u.expr(), map));
    auto [nq, bt] = curvature_integrals(ut, data, interior, boundary);
    return {nq, bt, s_functional(ut, interior)};
}

// N_Q, B_T, S at u_t; Laplacian and gradient of u_t by ambient central
// differences on the degree-0 numeric extension.
CurveFunctionals curve_functionals(const ScalarField& u, const PrescribedData& data,
                                   const AlgebraElement& c, double t, const QuadRule& interior,
                                   const QuadRule& boundary) {
    if (c.is_rotation_only())
        return curve_functionals_rotation(u, data, c, t, interior, boundary);
    CurveEvaluator ut(u, c, t);
    const double delta = 1e-3;

    Tape qtape(data.Q.expr());
    const std::size_t n = interior.size();
    std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> pnq(nblocks, 0.0), ps(nblocks, 0.0);
    parallel_blocks(n, [&](std::size_t bi, std::size_t lo, std::size_t hi) {
        std::vector<double> scratch;
        std::vector<double> tnq(hi - lo), ts(hi - lo);
        for (std::size_t k = lo; k < hi; ++k) {
            const Vec5& p = interior.points[k];
            double center = ut(p, scratch);
            double lap = 0.0, radial = 0.0;
            Vec5 g;
            for (int i = 0; i < 5; ++i) {
                Vec5 plus = p, minus = p;
                plus[i] += delta;
                minus[i] -= delta;
                double fp = ut(plus, scratch);
                double fm = ut(minus, scratch);
                lap += (fp - 2.0 * center + fm) / (delta * delta);
                g[i] = (fp - fm) / (2.0 * delta);
                radial += g[i] * p[i];
            }
            // the extension is degree-0; remove the O(delta^2) radial
            // contamination of the FD gradient
            double grad2 = 0.0;
            for (int i = 0; i < 5; ++i) grad2 += (g[i] - radial * p[i]) * (g[i] - radial * p[i]);
            double qv = qtape.eval1(p.data(), scratch);
            tnq[k - lo] = interior.weights[k] * qv * std::exp(4.0 * center);
            ts[k - lo] =
                interior.weights[k] * (lap * lap + 2.0 * grad2 + 12.0 * center);
        }
        pnq[bi] = pairwise_sum(tnq.data(), tnq.size());
        ps[bi] = pairwise_sum(ts.data(), ts.size());
    });

    Tape ttape(data.T.expr());
    const std::size_t nb = boundary.size();
    std::size_t nbblocks = (nb + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> pbt(nbblocks, 0.0);
    parallel_blocks(nb, [&](std::size_t bi, std::size_t lo, std::size_t hi) {
        std::vector<double> scratch;
        std::vector<double> tbt(hi - lo);
        for (std::size_t k = lo; k < hi; ++k) {
            const Vec5& q = boundary.points[k];
            double center = ut(q, scratch);
            double tv = ttape.eval1(q.data(), scratch);
            tbt[k - lo] = boundary.weights[k] * tv * std::exp(3.0 * center);
        }
        pbt[bi] = pairwise_sum(tbt.data(), tbt.size());
    });

    CurveFunctionals cf;
    cf.n_q = pairwise_combine(std::move(pnq));
    cf.b_t = pairwise_combine(std::move(pbt));
    cf.s = pairwise_combine(std::move(ps));
    return cf;
}

}  // namespace

OrbitCheck orbit_derivative_check(const ScalarField& u, const PrescribedData& data,
                                  const AlgebraElement& c, double h, const QuadRule& interior,
                                  const QuadRule& boundary) {
    if (std::abs(h) < 1e-4 || std::abs(h) > 1e-2)
        throw std::invalid_argument("orbit step |h| must lie in [1e-4, 1e-2]");

    CurveFunctionals plus = curve_functionals(u, data, c, h, interior, boundary);
    CurveFunctionals minus = curve_functionals(u, data, c, -h, interior, boundary);

    // theory terms at t = 0
    std::vector<Expr> iouts{data.Q.expr()};
    for (int i = 1; i <= 5; ++i) iouts.push_back(diff(data.Q.expr(), i));
    iouts.push_back(exp(Expr(4.0) * u.expr()));
    Tape itape(iouts);
    double xq_int[1];
    integrate_multi(itape, interior, 1,
                    [&c](const Vec5& p, const double* out, double* terms) {
                        Vec5 X = algebra_eval_raw(c, p.data());
                        terms[0] = field_action(p, X, out) * out[6];
                    },
                    xq_int);
    std::vector<Expr> bouts{data.T.expr()};
    for (int i = 1; i <= 5; ++i) bouts.push_back(diff(data.T.expr(), i));
    bouts.push_back(exp(Expr(3.0) * u.expr()));
    Tape btape(bouts);
    double xt_bd[1];
    integrate_multi(btape, boundary, 1,
                    [&c](const Vec5& q, const double* out, double* terms) {
                        Vec5 X = algebra_eval_raw(c, q.data());
                        terms[0] = boundary_field_action(q, X, out) * out[6];
                    },
                    xt_bd);

    auto [nq0, bt0] = curvature_integrals(u, data, interior, boundary);

    OrbitCheck oc;
    double dn = (plus.n_q - minus.n_q) / (2.0 * h);
    double db = (plus.b_t - minus.b_t) / (2.0 * h);
    oc.d1 = dn + xq_int[0];
    oc.d2 = db + xt_bd[0];
    oc.d3 = (plus.s - minus.s) / (2.0 * h);
    oc.n_q = nq0;
    oc.b_t = bt0;
    oc.s_u = s_functional(u, interior);
    oc.scale1 = std::max(1.0, std::abs(dn) + std::abs(xq_int[0]));
    oc.scale2 = std::max(1.0, std::abs(db) + std::abs(xt_bd[0]));
    oc.scale3 = std::max(1.0, std::abs(oc.s_u));
    return oc;
}

// ---------------------------------------------------------------------------
// Certification

std::vector<Vec5> subsample(const QuadRule& rule, std::size_t count) {
    std::vector<Vec5> out;
    const std::size_t n = rule.size();
    if (count == 0 || n == 0) return out;
    count = std::min(count, n);
    // Stride coprime with the node count: a plain n/count stride can be a
    // multiple of the psi-grid period and collapse the samples onto a
    // lower-dimensional slice.
    std::size_t stride = std::max<std::size_t>(1, n / count);
    while (std::gcd(stride, n) != 1) ++stride;
    out.reserve(count);
    std::size_t idx = 0;
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(rule.points[idx]);
        idx = (idx + stride) % n;
    }
    return out;
}

namespace {

// Rows of the constraint matrix: action of each basis field on f over
// the sample points (pushforward basis when a map is given). The map
// inverse and Jacobian are shared across the ten fields per point.
std::vector<std::array<double, 10>> assemble_rows(const ScalarField& f,
                                                  const std::vector<Vec5>& points,
                                                  bool boundary, const ConformalMap* map) {
    Tape gtape = gradient_tape(f.expr());
    std::vector<std::array<double, 10>> rows(points.size());
    parallel_blocks(points.size(), [&](std::size_t, std::size_t lo, std::size_t hi) {
        std::vector<double> scratch(gtape.scratch_size());
        double out[6];
        for (std::size_t k = lo; k < hi; ++k) {
            const Vec5& p = points[k];
            gtape.eval(p.data(), scratch.data(), out);
            if (map) {
                SpherePoint sp = SpherePoint::project(p);
                SpherePoint q = map->inverse(sp);
                std::array<Vec5, 5> J = map->jacobian(q);
                for (int j = 0; j < 10; ++j) {
                    Vec5 v = algebra_basis_eval(j, q.data());
                    Vec5 w{};
                    for (int i = 0; i < 5; ++i) w[i] = dot(J[i], v);
                    double radial = dot(w, sp.x);
                    for (int i = 0; i < 5; ++i) w[i] -= radial * sp.x[i];
                    rows[k][j] = boundary ? boundary_field_action(p, w, out)
                                          : field_action(p, w, out);
                }
            } else {
                for (int j = 0; j < 10; ++j) {
                    Vec5 X = algebra_basis_eval(j, p.data());
                    rows[k][j] = boundary ? boundary_field_action(p, X, out)
                                          : field_action(p, X, out);
                }
            }
        }
    });
    return rows;
}

// min/max margins of row . c, mirroring verify_certificate.
CertMargins margins_from_rows(const std::vector<std::array<double, 10>>& irows,
                              const std::vector<std::array<double, 10>>& brows,
                              const AlgebraElement& c) {
    CertMargins m;
    m.min_interior = irows.empty() ? 0.0 : std::numeric_limits<double>::infinity();
    m.min_boundary = brows.empty() ? 0.0 : std::numeric_limits<double>::infinity();
    m.max_value = -std::numeric_limits<double>::infinity();
    double max_abs_q = 0.0, max_abs_t = 0.0;
    for (const auto& row : irows) {
        double v = 0.0;
        for (int j = 0; j < 10; ++j) v += row[j] * c.c[j];
        m.min_interior = std::min(m.min_interior, v);
        m.max_value = std::max(m.max_value, v);
        max_abs_q = std::max(max_abs_q, std::abs(v));
    }
    for (const auto& row : brows) {
        double v = 0.0;
        for (int j = 0; j < 10; ++j) v += row[j] * c.c[j];
        m.min_boundary = std::min(m.min_boundary, v);
        m.max_value = std::max(m.max_value, v);
        max_abs_t = std::max(max_abs_t, std::abs(v));
    }
    m.scale = max_abs_q + max_abs_t;
    return m;
}

}  // namespace

CertMargins verify_certificate(const AlgebraElement& c, const PrescribedData& data,
                               const std::vector<Vec5>& interior_points,
                               const std::vector<Vec5>& boundary_points,
                               const ConformalMap* map) {
    bool nonzero = false;
    for (double v : c.c) nonzero = nonzero || v != 0.0;
    if (!nonzero) throw std::invalid_argument("certificate coefficients are all zero");

    auto irows = assemble_rows(data.Q, interior_points, false, map);
    auto brows = assemble_rows(data.T, boundary_points, true, map);
    return margins_from_rows(irows, brows, c);
}

CertifyResult certify(const PrescribedData& data, const CertifyOptions& options) {
    if (options.n_interior < 500 || options.n_boundary < 200)
        throw std::invalid_argument("certify needs >= 500 interior and >= 200 boundary samples");

    std::unique_ptr<ConformalMap> map;
    if (options.conjugation) map = std::make_unique<ConformalMap>(*options.conjugation);

    // For a conjugated search, (Psi_* B_j)(f) o Psi = B_j(f o Psi): work
    // with the composed data on the regular grid instead of pushforward
    // fields at warped preimages, which samples the domain evenly.
    PrescribedData eff = data;
    if (map) {
        Expr fwd[5];
        for (int i = 0; i < 5; ++i) fwd[i] = map->forward_exprs()[i];
        eff.Q = ScalarField(compose(data.Q.expr(), fwd));
        eff.T = ScalarField(compose(data.T.expr(), fwd));
    }

    // Coarse samples straight off the quadrature grids.
    QuadRule coarse_int = hemisphere_rule(8, 8, 16);
    QuadRule coarse_bd = boundary_rule(8, 16);
    std::vector<Vec5> pts_int = subsample(coarse_int, options.n_interior);
    std::vector<Vec5> pts_bd = subsample(coarse_bd, options.n_boundary);

    auto irows = assemble_rows(eff.Q, pts_int, false, nullptr);
    auto brows = assemble_rows(eff.T, pts_bd, true, nullptr);

    // Verification grid: the full nodes of a finer rule (well over 10x
    // the sample count), assembled once and reused as the pool of
    // cutting planes.
    QuadRule fine_int = hemisphere_rule(12, 12, 24);
    QuadRule fine_bd = boundary_rule(12, 24);
    const std::vector<Vec5>& fpts_int = fine_int.points;
    const std::vector<Vec5>& fpts_bd = fine_bd.points;
    auto firows = assemble_rows(eff.Q, fpts_int, false, nullptr);
    auto fbrows = assemble_rows(eff.T, fpts_bd, true, nullptr);

    std::array<double, 10> mu{};
    auto add_mean = [&mu](const std::vector<std::array<double, 10>>& rows, double w) {
        for (const auto& r : rows)
            for (int j = 0; j < 10; ++j) mu[j] += w * r[j];
    };
    if (!irows.empty()) add_mean(irows, 1.0 / static_cast<double>(irows.size()));
    if (!brows.empty()) add_mean(brows, 1.0 / static_cast<double>(brows.size()));

    // LP in split coordinates c = cp - cn with cp, cn in [0,1]^10: the
    // all-slack origin is feasible (c = 0 satisfies every sign row), so
    // no phase-1 pass is needed.
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    auto push_row = [&](const std::array<double, 10>& r) {
        double mag = 0.0;
        for (double v : r) mag = std::max(mag, std::abs(v));
        if (mag < 1e-14) return;  // identically-zero action row
        std::vector<double> arow(20);
        for (int j = 0; j < 10; ++j) {
            arow[j] = -r[j];
            arow[10 + j] = r[j];
        }
        A.push_back(std::move(arow));
        b.push_back(0.0);
    };
    for (const auto& r : irows) push_row(r);
    for (const auto& r : brows) push_row(r);
    for (int j = 0; j < 20; ++j) {
        std::vector<double> arow(20, 0.0);
        arow[j] = 1.0;
        A.push_back(std::move(arow));
        b.push_back(1.0);
    }
    std::vector<double> objective_row(20);
    for (int j = 0; j < 10; ++j) {
        objective_row[j] = mu[j];
        objective_row[10 + j] = -mu[j];
    }

    // Certificates are rays; report them at sup-norm 1 (the box scale).
    auto extract = [](const LpResult& sol) {
        AlgebraElement c;
        double sup = 0.0;
        for (int j = 0; j < 10; ++j) {
            c.c[j] = sol.x[j] - sol.x[10 + j];
            if (std::abs(c.c[j]) < 1e-9) c.c[j] = 0.0;
            sup = std::max(sup, std::abs(c.c[j]));
        }
        if (sup > 0.0)
            for (double& v : c.c) v /= sup;
        return c;
    };
    auto accepted = [&](const CertMargins& m) {
        double eps_verify = options.eps_verify_rel * m.scale;
        double eps_strict = options.eps_strict_rel * m.scale;
        return m.min_interior >= -eps_verify && m.min_boundary >= -eps_verify &&
               m.max_value > eps_strict;
    };
    auto add_cuts = [&](const AlgebraElement& c) {
        // constrain the fine-grid points this direction violates
        int added = 0;
        for (const auto& rowset : {std::cref(firows), std::cref(fbrows)}) {
            for (const auto& r : rowset.get()) {
                double v = 0.0;
                for (int j = 0; j < 10; ++j) v += r[j] * c.c[j];
                if (v < 0.0) {
                    push_row(r);
                    ++added;
                }
            }
        }
        return added;
    };

    CertifyResult result;
    AlgebraElement c;
    CertMargins margins{};
    double lp_objective = 0.0;
    bool have_direction = false;

    for (int round = 0; round < 6 && !have_direction; ++round) {
        LpResult lp = solve_lp(A, b, objective_row);
        if (lp.status == LpResult::Status::Unbounded)
            throw LpError("certificate LP unbounded despite box bounds");
        if (lp.status == LpResult::Status::Infeasible)
            throw LpError("certificate LP infeasible despite feasible origin");
        lp_objective = lp.objective;
        if (lp_objective <= options.eps_objective) {
            result.note =
                "no certificate found: mean-slack objective " + std::to_string(lp_objective) +
                " below threshold; absence of a certificate does not prove existence";
            return result;
        }
        c = extract(lp);
        // The optimal face is usually degenerate; prefer the sparsest
        // direction achieving most of the objective, which strips
        // sample-gap components.
        std::vector<std::vector<double>> A2 = A;
        std::vector<double> b2 = b;
        std::vector<double> floor_row(20);
        for (int j = 0; j < 20; ++j) floor_row[j] = -objective_row[j];
        A2.push_back(std::move(floor_row));
        b2.push_back(-0.8 * lp_objective);
        LpResult lp2 = solve_lp(A2, b2, std::vector<double>(20, -1.0));
        AlgebraElement c_sparse = lp2.status == LpResult::Status::Optimal ? extract(lp2) : c;

        margins = margins_from_rows(firows, fbrows, c_sparse);
        if (accepted(margins)) {
            c = c_sparse;
            have_direction = true;
            break;
        }
        CertMargins m1 = margins_from_rows(firows, fbrows, c);
        if (accepted(m1)) {
            margins = m1;
            have_direction = true;
            break;
        }
        int tightened = add_cuts(c_sparse) + add_cuts(c);
        if (tightened == 0) break;  // nothing left to tighten
    }

    if (!have_direction) {
        result.note =
            "LP direction failed dense verification (min interior " +
            std::to_string(margins.min_interior) + ", min boundary " +
            std::to_string(margins.min_boundary) + ", max " + std::to_string(margins.max_value) +
            "); absence of a certificate does not prove existence";
        return result;
    }

    Certificate cert;
    cert.c = c;
    cert.conjugated = map != nullptr;
    cert.objective = 0.0;
    for (int j = 0; j < 10; ++j) cert.objective += mu[j] * c.c[j];
    cert.n_interior = pts_int.size();
    cert.n_boundary = pts_bd.size();
    CertMargins coarse = margins_from_rows(irows, brows, c);
    cert.coarse_min_interior = coarse.min_interior;
    cert.coarse_min_boundary = coarse.min_boundary;
    cert.fine_min_interior = margins.min_interior;
    cert.fine_min_boundary = margins.min_boundary;
    cert.fine_max = margins.max_value;
    cert.scale = margins.scale;
    cert.n_interior_fine = fpts_int.size();
    cert.n_boundary_fine = fpts_bd.size();
    result.certificate = cert;
    result.note = "certificate verified on the fine grid";
    return result;
}

}  // namespace qt
