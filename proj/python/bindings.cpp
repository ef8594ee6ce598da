#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qt/conformal.hpp"
#include "qt/expr.hpp"
#include "qt/functionals.hpp"
#include "qt/kwcert.hpp"
#include "qt/parallel.hpp"
#include "qt/quadrature.hpp"
#include "qt/runner.hpp"
#include "qt/sphere.hpp"

namespace py = pybind11;
using namespace qt;

namespace {

Vec5 to_vec5(const std::vector<double>& v) {
    if (v.size() != 5) throw std::invalid_argument("expected a 5-vector");
    return {v[0], v[1], v[2], v[3], v[4]};
}

Vec4 to_vec4(const std::vector<double>& v) {
    if (v.size() != 4) throw std::invalid_argument("expected a 4-vector");
    return {v[0], v[1], v[2], v[3]};
}

AlgebraElement to_element(const std::vector<double>& v) {
    if (v.size() != 10) throw std::invalid_argument("expected 10 coefficients");
    AlgebraElement c;
    std::copy(v.begin(), v.end(), c.c.begin());
    return c;
}

MobiusMap make_mobius(const std::vector<double>& a,
                      const std::vector<std::tuple<int, int, double>>& rotations) {
    Mat4 R = identity4();
    for (const auto& [i, j, ang] : rotations) R = matmul(plane_rotation(i, j, ang), R);
    return MobiusMap(to_vec4(a), R);
}

py::dict margins_dict(const CertMargins& m) {
    py::dict d;
    d["min_interior"] = m.min_interior;
    d["min_boundary"] = m.min_boundary;
    d["max_value"] = m.max_value;
    d["scale"] = m.scale;
    return d;
}

py::dict certificate_dict(const Certificate& c) {
    py::dict d;
    d["c"] = std::vector<double>(c.c.c.begin(), c.c.c.end());
    d["conjugated"] = c.conjugated;
    d["objective"] = c.objective;
    d["coarse_min_interior"] = c.coarse_min_interior;
    d["coarse_min_boundary"] = c.coarse_min_boundary;
    d["fine_min_interior"] = c.fine_min_interior;
    d["fine_min_boundary"] = c.fine_min_boundary;
    d["fine_max"] = c.fine_max;
    d["scale"] = c.scale;
    d["n_interior"] = c.n_interior;
    d["n_boundary"] = c.n_boundary;
    d["n_interior_fine"] = c.n_interior_fine;
    d["n_boundary_fine"] = c.n_boundary_fine;
    return d;
}

}  // namespace

PYBIND11_MODULE(_qthemi, m) {
    m.doc() = "Prescribed Q/T-curvature verification toolkit on the upper hemisphere";

    py::register_exception<SourceError>(m, "SourceError");
    py::register_exception<EvalError>(m, "EvalError");
    py::register_exception<NotInH>(m, "NotInHError");
    py::register_exception<LpError>(m, "LpError");

    py::class_<Expr>(m, "Expr")
        .def(py::init([](double c) { return Expr(c); }))
        .def("__repr__", [](const Expr& e) { return to_string(e); })
        .def("__add__", [](const Expr& a, const Expr& b) { return a + b; })
        .def("__sub__", [](const Expr& a, const Expr& b) { return a - b; })
        .def("__mul__", [](const Expr& a, const Expr& b) { return a * b; })
        .def("__truediv__", [](const Expr& a, const Expr& b) { return a / b; })
        .def("__neg__", [](const Expr& a) { return -a; });

    m.def("parse", &parse, "parse an expression in the toolkit grammar");
    m.def("to_string", &to_string);
    m.def("diff", &diff, py::arg("e"), py::arg("axis"));
    m.def("eval", [](const Expr& e, const std::vector<double>& p) {
        return eval(e, to_vec5(p).data());
    });
    m.def("homogenize0", &homogenize0);
    m.def("compose", [](const Expr& e, const std::vector<Expr>& map) {
        if (map.size() != 5) throw std::invalid_argument("map needs 5 components");
        Expr arr[5] = {map[0], map[1], map[2], map[3], map[4]};
        return compose(e, arr);
    });
    m.def("structurally_equal", &structurally_equal);

    m.def("laplace", [](const Expr& e) { return laplace(ScalarField(e)).expr(); });
    m.def("paneitz4", [](const Expr& e) { return paneitz4(ScalarField(e)).expr(); });
    m.def("grad", [](const Expr& e, const std::vector<double>& p) {
        Vec5 g = grad(ScalarField(e), SpherePoint(to_vec5(p)));
        return std::vector<double>(g.begin(), g.end());
    });
    m.def("normal_derivative", [](const Expr& e, const std::vector<double>& q) {
        return normal_derivative(ScalarField(e), BoundaryPoint(to_vec5(q)));
    });
    m.def("paneitz3", [](const Expr& e, const std::vector<double>& q) {
        return paneitz3(ScalarField(e), BoundaryPoint(to_vec5(q)));
    });

    py::class_<QuadRule>(m, "QuadRule")
        .def("__len__", [](const QuadRule& r) { return r.size(); })
        .def("weight_sum", &QuadRule::weight_sum)
        .def_readonly("n_theta", &QuadRule::n_theta)
        .def_readonly("n_t", &QuadRule::n_t)
        .def_readonly("n_psi", &QuadRule::n_psi);
    m.def("hemisphere_rule", &hemisphere_rule, py::arg("n_theta"), py::arg("n_t"),
          py::arg("n_psi"));
    m.def("boundary_rule", &boundary_rule, py::arg("n_t"), py::arg("n_psi"));
    m.def("integrate", [](const Expr& e, const QuadRule& r) { return integrate(e, r); });

    m.def("stereo", [](const std::vector<double>& p) {
        BallPoint y = stereo(SpherePoint(to_vec5(p)));
        return std::vector<double>(y.y.begin(), y.y.end());
    });
    m.def("stereo_inv", [](const std::vector<double>& y) {
        SpherePoint p = stereo_inv(BallPoint(to_vec4(y)));
        return std::vector<double>(p.x.begin(), p.x.end());
    });
    m.def(
        "mobius_ball",
        [](const std::vector<double>& a, const std::vector<double>& y,
           const std::vector<std::tuple<int, int, double>>& rotations) {
            BallPoint out = mobius_ball(make_mobius(a, rotations), BallPoint(to_vec4(y)));
            return std::vector<double>(out.y.begin(), out.y.end());
        },
        py::arg("a"), py::arg("y"),
        py::arg("rotations") = std::vector<std::tuple<int, int, double>>{});

    py::class_<ConformalMap>(m, "ConformalMap")
        .def(py::init([](const std::vector<double>& a,
                         const std::vector<std::tuple<int, int, double>>& rotations) {
                 return ConformalMap(make_mobius(a, rotations));
             }),
             py::arg("a"), py::arg("rotations") = std::vector<std::tuple<int, int, double>>{})
        .def("forward",
             [](const ConformalMap& cm, const std::vector<double>& p) {
                 SpherePoint out = cm.forward(SpherePoint(to_vec5(p)));
                 return std::vector<double>(out.x.begin(), out.x.end());
             })
        .def("inverse",
             [](const ConformalMap& cm, const std::vector<double>& p) {
                 SpherePoint out = cm.inverse(SpherePoint(to_vec5(p)));
                 return std::vector<double>(out.x.begin(), out.x.end());
             })
        .def("factor",
             [](const ConformalMap& cm, const std::vector<double>& p) {
                 return cm.factor(SpherePoint(to_vec5(p)));
             })
        .def("factor_expr", [](const ConformalMap& cm) { return cm.factor_field().expr(); })
        .def("forward_exprs",
             [](const ConformalMap& cm) {
                 return std::vector<Expr>(cm.forward_exprs().begin(), cm.forward_exprs().end());
             })
        .def("inverse_exprs", [](const ConformalMap& cm) {
            return std::vector<Expr>(cm.inverse_exprs().begin(), cm.inverse_exprs().end());
        });

    m.def("algebra_eval", [](const std::vector<double>& c, const std::vector<double>& p) {
        Vec5 v = algebra_eval(to_element(c), SpherePoint(to_vec5(p)));
        return std::vector<double>(v.begin(), v.end());
    });
    m.def("divergence", [](const std::vector<double>& c, const std::vector<double>& p) {
        return divergence(to_element(c), SpherePoint(to_vec5(p)));
    });
    m.def("pushforward",
          [](const ConformalMap& cm, const std::vector<double>& c, const std::vector<double>& p) {
              Vec5 v = pushforward(cm, to_element(c), SpherePoint(to_vec5(p)));
              return std::vector<double>(v.begin(), v.end());
          });
    m.def("flow", [](const std::vector<double>& c, const std::vector<double>& p, double t) {
        FlowResult fr = flow(to_element(c), SpherePoint(to_vec5(p)), t);
        py::dict d;
        d["endpoint"] = std::vector<double>(fr.endpoint.x.begin(), fr.endpoint.x.end());
        d["factor"] = fr.factor;
        return d;
    });

    m.def("manufacture", [](const Expr& u, const QuadRule& boundary) {
        PrescribedData data = manufacture(CandidateSolution(ScalarField(u), boundary));
        return py::make_tuple(data.Q.expr(), data.T.expr());
    });
    m.def("curvature_integrals", [](const Expr& u, const Expr& q, const Expr& t,
                                    const QuadRule& interior, const QuadRule& boundary) {
        auto [nq, bt] = curvature_integrals(ScalarField(u),
                                            PrescribedData{ScalarField(q), ScalarField(t)},
                                            interior, boundary);
        return py::make_tuple(nq, bt);
    });
    m.def("gbc_defect", [](const Expr& u, const Expr& q, const Expr& t, const QuadRule& interior,
                           const QuadRule& boundary) {
        return gbc_defect(ScalarField(u), PrescribedData{ScalarField(q), ScalarField(t)},
                          interior, boundary);
    });
    m.def("s_functional",
          [](const Expr& u, const QuadRule& interior) {
              return s_functional(ScalarField(u), interior);
          });
    m.def("q_bilinear", [](const Expr& u, const Expr& v, const QuadRule& interior) {
        return q_bilinear(ScalarField(u), ScalarField(v), interior);
    });
    m.def("energy", [](const Expr& u, const Expr& q, const Expr& t, const QuadRule& interior,
                       const QuadRule& boundary) {
        return energy(ScalarField(u), PrescribedData{ScalarField(q), ScalarField(t)}, interior,
                      boundary);
    });
    m.def("weak_residual", [](const Expr& u, const Expr& q, const Expr& t, const Expr& v,
                              const QuadRule& interior, const QuadRule& boundary) {
        return weak_residual(ScalarField(u), PrescribedData{ScalarField(q), ScalarField(t)},
                             ScalarField(v), interior, boundary);
    });
    m.def("cocycle_defect", [](const Expr& u, const Expr& q, const Expr& t, const Expr& v,
                               const QuadRule& interior, const QuadRule& boundary) {
        return cocycle_defect(ScalarField(u), PrescribedData{ScalarField(q), ScalarField(t)},
                              ScalarField(v), interior, boundary);
    });

    m.def("kw_residual", [](const Expr& u, const Expr& q, const Expr& t,
                            const std::vector<double>& c, const QuadRule& interior,
                            const QuadRule& boundary) {
        KWResidual r = kw_residual(ScalarField(u), PrescribedData{ScalarField(q), ScalarField(t)},
                                   basis_field(to_element(c)), interior, boundary);
        py::dict d;
        d["raw"] = r.raw;
        d["normalization"] = r.normalization;
        d["normalized"] = r.normalized;
        return d;
    });
    m.def(
        "kw_report",
        [](const Expr& u, const Expr& q, const Expr& t, const QuadRule& interior,
           const QuadRule& boundary, double tolerance) {
            KWReport rep = kw_report(ScalarField(u), PrescribedData{ScalarField(q), ScalarField(t)},
                                     interior, boundary, tolerance);
            py::dict d;
            py::list entries;
            for (const auto& e : rep.entries) {
                py::dict je;
                je["field_index"] = e.field_index;
                je["raw"] = e.raw;
                je["normalization"] = e.normalization;
                je["normalized"] = e.normalized;
                entries.append(je);
            }
            d["entries"] = entries;
            d["tolerance"] = rep.tolerance;
            d["pass"] = rep.pass;
            d["max_normalized"] = rep.max_normalized;
            return d;
        },
        py::arg("u"), py::arg("q"), py::arg("t"), py::arg("interior"), py::arg("boundary"),
        py::arg("tolerance") = 1e-7);
    m.def("orbit_derivative_check",
          [](const Expr& u, const Expr& q, const Expr& t, const std::vector<double>& c, double h,
             const QuadRule& interior, const QuadRule& boundary) {
              OrbitCheck oc = orbit_derivative_check(
                  ScalarField(u), PrescribedData{ScalarField(q), ScalarField(t)}, to_element(c),
                  h, interior, boundary);
              py::dict d;
              d["d1"] = oc.d1;
              d["d2"] = oc.d2;
              d["d3"] = oc.d3;
              d["scale1"] = oc.scale1;
              d["scale2"] = oc.scale2;
              d["scale3"] = oc.scale3;
              return d;
          });
    m.def(
        "certify",
        [](const Expr& q, const Expr& t, std::size_t n_interior, std::size_t n_boundary,
           std::optional<std::vector<double>> a,
           const std::vector<std::tuple<int, int, double>>& rotations) {
            CertifyOptions opt;
            opt.n_interior = n_interior;
            opt.n_boundary = n_boundary;
            if (a) opt.conjugation = make_mobius(*a, rotations);
            CertifyResult res = certify(PrescribedData{ScalarField(q), ScalarField(t)}, opt);
            py::dict d;
            d["found"] = res.found();
            d["note"] = res.note;
            if (res.found()) d["certificate"] = certificate_dict(*res.certificate);
            return d;
        },
        py::arg("q"), py::arg("t"), py::arg("n_interior") = 1000, py::arg("n_boundary") = 400,
        py::arg("a") = std::nullopt,
        py::arg("rotations") = std::vector<std::tuple<int, int, double>>{});
    m.def(
        "verify_certificate",
        [](const std::vector<double>& c, const Expr& q, const Expr& t, int n_fine,
           std::optional<std::vector<double>> a,
           const std::vector<std::tuple<int, int, double>>& rotations) {
            QuadRule fi = hemisphere_rule(n_fine, n_fine, 2 * n_fine);
            QuadRule fb = boundary_rule(n_fine, 2 * n_fine);
            std::unique_ptr<ConformalMap> map;
            if (a) map = std::make_unique<ConformalMap>(make_mobius(*a, rotations));
            CertMargins mm =
                verify_certificate(to_element(c), PrescribedData{ScalarField(q), ScalarField(t)},
                                   fi.points, fb.points, map.get());
            return margins_dict(mm);
        },
        py::arg("c"), py::arg("q"), py::arg("t"), py::arg("n_fine") = 12,
        py::arg("a") = std::nullopt,
        py::arg("rotations") = std::vector<std::tuple<int, int, double>>{});

    m.def("set_thread_count", &set_thread_count);
}
