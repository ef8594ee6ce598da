#include "qt/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>

#include "qt/kwcert.hpp"
#include "qt/parallel.hpp"

#include "CLI11.hpp"

namespace qt {

namespace {

constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

ScalarField parse_field(const std::string& src, const char* what) {
    try {
        return ScalarField(parse(src));
    } catch (const SourceError& e) {
        throw std::invalid_argument(std::string(what) + ": " + e.what());
    }
}

bool uses_axis5(const ExprNode& n) {
    if (n.kind == ExprKind::Var) return n.axis == 5;
    if (n.a && uses_axis5(*n.a)) return true;
    return n.b && uses_axis5(*n.b);
}

// boundary expressions live on S^3 and may reference x1..x4 only
ScalarField parse_boundary_field(const std::string& src, const char* what) {
    ScalarField f = parse_field(src, what);
    if (uses_axis5(f.expr().node()))
        throw std::invalid_argument(std::string(what) +
                                    ": boundary expressions may reference x1..x4 only");
    return f;
}

}  // namespace

Json Report::to_json() const {
    Json j;
    j["command"] = command;
    j["config"] = config;
    Json arr = Json::array();
    for (const Check& c : checks) {
        Json jc;
        jc["name"] = c.name;
        jc["value"] = c.value;
        jc["tol"] = c.tol;
        jc["pass"] = c.pass;
        arr.push_back(jc);
    }
    j["checks"] = arr;
    j["pass"] = pass;
    j["seconds"] = seconds;
    return j;
}

Mat4 RunConfig::rotation_matrix() const {
    Mat4 R = identity4();
    for (const auto& t : rotations) {
        int i = static_cast<int>(t[0]);
        int j = static_cast<int>(t[1]);
        R = matmul(plane_rotation(i, j, t[2]), R);
    }
    return R;
}

MobiusMap RunConfig::mobius() const { return MobiusMap(a, rotation_matrix()); }

Json RunConfig::echo() const {
    Json j;
    if (!u_expr.empty()) j["u"] = u_expr;
    if (!q_expr.empty()) j["q"] = q_expr;
    if (!t_expr.empty()) j["t"] = t_expr;
    if (has_a) j["a"] = std::vector<double>(a.begin(), a.end());
    if (!rotations.empty()) {
        Json rots = Json::array();
        for (const auto& t : rotations) rots.push_back(std::vector<double>(t.begin(), t.end()));
        j["rot"] = rots;
    }
    j["nodes"] = nodes;
    j["h"] = h;
    j["threads"] = threads;
    return j;
}

ScaledValue weak_residual_detail(const ScalarField& u, const PrescribedData& data,
                                 const ScalarField& v, const QuadRule& interior,
                                 const QuadRule& boundary) {
    ScalarField lu = laplace(u);
    ScalarField lv = laplace(v);
    std::vector<Expr> outs{lu.expr(), lv.expr(), v.expr(),
                           data.Q.expr() * exp(Expr(4.0) * u.expr())};
    for (int i = 1; i <= 5; ++i) outs.push_back(diff(u.expr(), i));
    for (int i = 1; i <= 5; ++i) outs.push_back(diff(v.expr(), i));
    Tape tape(outs);
    double sums[4];
    integrate_multi(tape, interior, 4,
                    [](const Vec5& p, const double* out, double* terms) {
                        double rf = 0.0, rg = 0.0, fg = 0.0;
                        for (int i = 0; i < 5; ++i) {
                            rf += out[4 + i] * p[i];
                            rg += out[9 + i] * p[i];
                            fg += out[4 + i] * out[9 + i];
                        }
                        terms[0] = out[0] * out[1];
                        terms[1] = fg - rf * rg;
                        terms[2] = out[2];
                        terms[3] = out[3] * out[2];
                    },
                    sums);
    double bterm =
        integrate(Expr(2.0) * data.T.expr() * exp(Expr(3.0) * u.expr()) * v.expr(), boundary);
    double residual = sums[0] + 2.0 * sums[1] + 6.0 * sums[2] - 2.0 * sums[3] - bterm;
    double scale = std::max(1.0, std::abs(sums[0]) + 2.0 * std::abs(sums[1]) +
                                     6.0 * std::abs(sums[2]) + 2.0 * std::abs(sums[3]) +
                                     std::abs(bterm));
    return {residual, scale};
}

ScaledValue cocycle_defect_detail(const ScalarField& u, const PrescribedData& data,
                                  const ScalarField& v, const QuadRule& interior,
                                  const QuadRule& boundary) {
    double lhs = s_functional(u + v, interior);
    double su = s_functional(u, interior);
    double qvv = q_bilinear(v, v, interior);
    double qv = integrate(data.Q.expr() * v.expr() * exp(Expr(4.0) * u.expr()), interior);
    double tv = integrate(data.T.expr() * v.expr() * exp(Expr(3.0) * u.expr()), boundary);
    double defect = lhs - su - (qvv + 4.0 * qv + 4.0 * tv);
    double scale = std::max(1.0, std::abs(lhs));
    return {defect, scale};
}

std::vector<std::pair<std::string, Expr>> standard_battery() {
    return {
        {"zero", parse("0")},
        {"quarter_x1", parse("0.25*x1")},
        {"x5_cubed", parse("x5^3")},
        {"mixed_x1_x5", parse("0.3*x1 + 0.2*x5^3")},
        {"mixed_x1x2_x5", parse("0.2*x1*x2 + 0.1*x5^3")},
    };
}

std::vector<std::pair<std::string, Expr>> weak_test_functions() {
    return {
        {"one", parse("1")},
        {"x1", parse("x1")},
        {"x1x2", parse("x1*x2")},
        {"x1_sq", parse("x1^2")},
        {"x5_sq", parse("x5^2")},
        {"x5_cubed", parse("x5^3")},
    };
}

std::vector<std::pair<std::string, Expr>> random_test_functions(int count, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> coef(-0.5, 0.5);
    const Expr basis[5] = {parse("x1"), parse("x2*x3"), parse("x1^2"), parse("x5^2"),
                           parse("x5^3")};
    std::vector<std::pair<std::string, Expr>> out;
    for (int k = 0; k < count; ++k) {
        Expr v(0.0);
        for (const Expr& b : basis) v = v + Expr(coef(rng)) * b;
        out.emplace_back("random_v" + std::to_string(k + 1), v);
    }
    return out;
}

Report run_verify(const RunConfig& cfg) {
    Report rep;
    rep.command = "verify";
    rep.config = cfg.echo();
    QuadRule interior = hemisphere_rule(cfg.nodes, cfg.nodes, 2 * cfg.nodes);
    QuadRule boundary = boundary_rule(cfg.nodes, 2 * cfg.nodes);

    CandidateSolution cand(parse_field(cfg.u_expr, "--u"), boundary);
    rep.add("h_membership_max_normal_derivative", cand.max_boundary_normal_derivative(), 1e-9);
    PrescribedData data = manufacture(cand);
    const ScalarField& u = cand.u();

    rep.add("gbc_defect_rel", gbc_defect(u, data, interior, boundary) / kFourPiSq, 1e-7);

    for (const auto& [name, vexpr] : weak_test_functions()) {
        ScaledValue wr = weak_residual_detail(u, data, ScalarField(vexpr), interior, boundary);
        rep.add("weak_residual_" + name, wr.value / wr.scale, 1e-6);
    }
    for (const auto& [name, vexpr] : random_test_functions(3, 20240807u)) {
        ScaledValue cd = cocycle_defect_detail(u, data, ScalarField(vexpr), interior, boundary);
        rep.add("cocycle_defect_" + name, cd.value / cd.scale, 1e-6);
    }
    KWReport kw = kw_report(u, data, interior, boundary, 1e-7);
    for (const auto& e : kw.entries)
        rep.add("kw_normalized_B" + std::to_string(e.field_index + 1), e.normalized, 1e-7);
    return rep;
}

Report run_certify(const RunConfig& cfg) {
    Report rep;
    rep.command = "certify";
    rep.config = cfg.echo();

    PrescribedData data{parse_field(cfg.q_expr.empty() ? "3" : cfg.q_expr, "--q"),
                        parse_boundary_field(cfg.t_expr.empty() ? "0" : cfg.t_expr, "--t")};
    CertifyOptions opt;
    if (cfg.has_a || !cfg.rotations.empty()) opt.conjugation = cfg.mobius();
    CertifyResult res = certify(data, opt);

    rep.add_check({"certificate_found", res.found() ? 1.0 : 0.0, 1.0, true});
    if (res.found()) {
        const Certificate& cert = *res.certificate;
        rep.add_check({"lp_objective", cert.objective, opt.eps_objective,
                       cert.objective > opt.eps_objective});
        double eps_verify = opt.eps_verify_rel * cert.scale;
        double eps_strict = opt.eps_strict_rel * cert.scale;
        rep.add_check({"fine_min_interior", cert.fine_min_interior, eps_verify,
                       cert.fine_min_interior >= -eps_verify});
        rep.add_check({"fine_min_boundary", cert.fine_min_boundary, eps_verify,
                       cert.fine_min_boundary >= -eps_verify});
        rep.add_check({"fine_max_strict", cert.fine_max, eps_strict,
                       cert.fine_max > eps_strict});
        for (int j = 0; j < 10; ++j)
            rep.add_check({"c_" + std::to_string(j + 1), cert.c.c[j], 1.0, true});
    } else {
        rep.add_check({"no_certificate_inconclusive", 1.0, 1.0, true});
        std::cerr << res.note << "\n";
    }
    return rep;
}

Report run_gbc(const RunConfig& cfg) {
    Report rep;
    rep.command = "gbc";
    rep.config = cfg.echo();
    QuadRule interior = hemisphere_rule(cfg.nodes, cfg.nodes, 2 * cfg.nodes);
    QuadRule boundary = boundary_rule(cfg.nodes, 2 * cfg.nodes);
    CandidateSolution cand(parse_field(cfg.u_expr, "--u"), boundary);
    PrescribedData data = manufacture(cand);
    auto [nq, bt] = curvature_integrals(cand.u(), data, interior, boundary);
    rep.add_check({"n_q", nq, 1e300, true});
    rep.add_check({"b_t", bt, 1e300, true});
    rep.add("gbc_defect_rel", (nq + bt - kFourPiSq) / kFourPiSq, 1e-7);
    return rep;
}

Report run_mobius_check(const RunConfig& cfg) {
    Report rep;
    rep.command = "mobius-check";
    rep.config = cfg.echo();
    MobiusMap m = cfg.mobius();
    ConformalMap psi(m);

    std::mt19937 rng(7u);
    std::normal_distribution<double> gauss;
    auto random_point = [&]() {
        Vec5 v;
        for (double& x : v) x = gauss(rng);
        v[4] = std::abs(v[4]) + 0.05;
        return SpherePoint::project(v);
    };

    double rt = 0.0, bd = 0.0;
    for (int k = 0; k < 100; ++k) {
        SpherePoint p = random_point();
        SpherePoint q = psi.inverse(psi.forward(p));
        for (int i = 0; i < 5; ++i) rt = std::max(rt, std::abs(q.x[i] - p.x[i]));
    }
    for (int k = 0; k < 50; ++k) {
        double ang = 2.0 * std::numbers::pi * k / 50.0;
        SpherePoint q(Vec5{std::cos(ang), std::sin(ang) * 0.6, std::sin(ang) * 0.8, 0.0, 0.0});
        bd = std::max(bd, std::abs(psi.forward(SpherePoint::project(q.x)).x[4]));
    }
    rep.add("round_trip_max", rt, 1e-11);
    rep.add("boundary_preservation_max", bd, 1e-13);

    // Gram conformality of dPsi against e^{2P} at random points.
    double gram_rel = 0.0;
    for (int k = 0; k < 25; ++k) {
        SpherePoint p = random_point();
        auto J = psi.jacobian(p);
        double e2p = std::exp(2.0 * psi.factor(p));
        // orthonormal tangent frame by Gram-Schmidt
        Vec5 frame[4];
        int found = 0;
        for (int ax = 0; ax < 5 && found < 4; ++ax) {
            Vec5 v{};
            v[ax] = 1.0;
            double r = dot(v, p.x);
            for (int i = 0; i < 5; ++i) v[i] -= r * p.x[i];
            for (int f = 0; f < found; ++f) {
                double pr = dot(v, frame[f]);
                for (int i = 0; i < 5; ++i) v[i] -= pr * frame[f][i];
            }
            double nv = norm(v);
            if (nv < 1e-6) continue;
            for (int i = 0; i < 5; ++i) v[i] /= nv;
            frame[found++] = v;
        }
        for (int aidx = 0; aidx < 4; ++aidx)
            for (int bidx = 0; bidx < 4; ++bidx) {
                Vec5 da{}, db{};
                for (int i = 0; i < 5; ++i) {
                    da[i] = dot(J[i], frame[aidx]);
                    db[i] = dot(J[i], frame[bidx]);
                }
                double g = dot(da, db);
                double expect = aidx == bidx ? e2p : 0.0;
                gram_rel = std::max(gram_rel, std::abs(g - expect) / e2p);
            }
    }
    rep.add("gram_conformality_rel", gram_rel, 1e-8);

    // dP/dnu = 0 on the equator.
    ScalarField P = psi.factor_field();
    Tape nd(diff(P.extension(), 5));
    std::vector<double> scratch;
    double ndmax = 0.0;
    for (int k = 0; k < 50; ++k) {
        double ang = 2.0 * std::numbers::pi * k / 50.0;
        Vec5 q{std::cos(ang), std::sin(ang), 0.0, 0.0, 0.0};
        ndmax = std::max(ndmax, std::abs(nd.eval1(q.data(), scratch)));
    }
    rep.add("factor_neumann_max", ndmax, 1e-8);

    // Liouville exactness of the factor.
    ScalarField lapP = laplace(P);
    ScalarField lap2P = laplace(lapP);
    Tape liou(lap2P.expr() - Expr(2.0) * lapP.expr() + Expr(6.0) -
              Expr(6.0) * exp(Expr(4.0) * P.expr()));
    double lio = 0.0;
    for (int k = 0; k < 100; ++k) {
        SpherePoint p = random_point();
        lio = std::max(lio, std::abs(liou.eval1(p.data(), scratch)));
    }
    rep.add("liouville_max", lio, 1e-6);

    // Closed-form anchor for a = (0, 1/2, 0, 0).
    if (cfg.has_a && cfg.a[0] == 0.0 && cfg.a[1] == 0.5 && cfg.a[2] == 0.0 && cfg.a[3] == 0.0 &&
        cfg.rotations.empty()) {
        BallPoint img = mobius_ball(m, BallPoint({1.0, 0.0, 0.0, 0.0}));
        double err = std::max(std::max(std::abs(img.y[0] - 0.6), std::abs(img.y[1] - 0.8)),
                              std::max(std::abs(img.y[2]), std::abs(img.y[3])));
        rep.add("phi_a_e1_anchor", err, 1e-14);
    }
    return rep;
}

Report run_paneitz_check(const RunConfig& cfg) {
    Report rep;
    rep.command = "paneitz-check";
    rep.config = cfg.echo();

    struct Harmonic {
        int degree;
        Expr e;
    };
    std::vector<Harmonic> harmonics;
    for (int i = 1; i <= 5; ++i) harmonics.push_back({1, Expr::var(i)});
    harmonics.push_back({2, parse("x1*x2")});
    harmonics.push_back({2, parse("x1^2 - x3^2")});
    harmonics.push_back({2, parse("x4*x5")});
    harmonics.push_back({3, parse("x1*x2*x3")});
    harmonics.push_back({3, parse("x1*(x2^2 - x3^2)")});
    harmonics.push_back({3, parse("x5^3") - Expr(3.0 / 7.0) * parse("x5*r^2")});

    std::mt19937 rng(11u);
    std::normal_distribution<double> gauss;
    std::vector<double> scratch;
    double lap_rel = 0.0, pan_rel = 0.0;
    for (const auto& h : harmonics) {
        ScalarField f((h.e));
        double lam = -static_cast<double>(h.degree * (h.degree + 3));
        double pan = static_cast<double>(h.degree * (h.degree + 1) * (h.degree + 2) *
                                         (h.degree + 3));
        Tape tf(f.expr());
        Tape tl(laplace(f).expr());
        Tape tp(paneitz4(f).expr());
        for (int k = 0; k < 50; ++k) {
            Vec5 v;
            for (double& x : v) x = gauss(rng);
            v[4] = std::abs(v[4]);
            SpherePoint p = SpherePoint::project(v);
            double fv = tf.eval1(p.data(), scratch);
            double lv = tl.eval1(p.data(), scratch);
            double pv = tp.eval1(p.data(), scratch);
            double denom = std::max(1.0, std::abs(lam * fv));
            lap_rel = std::max(lap_rel, std::abs(lv - lam * fv) / denom);
            double denom_p = std::max(1.0, std::abs(pan * fv));
            pan_rel = std::max(pan_rel, std::abs(pv - pan * fv) / denom_p);
        }
    }
    rep.add("laplace_eigenvalue_max_rel", lap_rel, 1e-9);
    rep.add("paneitz_eigenvalue_max_rel", pan_rel, 1e-9);

    BoundaryPoint q(Vec5{1.0, 0.0, 0.0, 0.0, 0.0});
    rep.add("normal_derivative_x5_plus_1", normal_derivative(ScalarField(parse("x5")), q) + 1.0,
            1e-12);
    rep.add("paneitz3_x5cubed_minus_3", paneitz3(ScalarField(parse("x5^3")), q) - 3.0, 1e-9);
    return rep;
}

Report run_orbit_check(const RunConfig& cfg) {
    Report rep;
    rep.command = "orbit-check";
    rep.config = cfg.echo();
    QuadRule interior = hemisphere_rule(cfg.nodes, cfg.nodes, 2 * cfg.nodes);
    QuadRule boundary = boundary_rule(cfg.nodes, 2 * cfg.nodes);

    CandidateSolution cand(parse_field(cfg.u_expr.empty() ? "0" : cfg.u_expr, "--u"), boundary);
    PrescribedData data = manufacture(cand);

    // Pdot vs div/4 at sample points.
    std::mt19937 rng(13u);
    std::normal_distribution<double> gauss;
    double pdot_err = 0.0;
    AlgebraElement boost = AlgebraElement::basis(6);  // X_1
    AlgebraElement rot = AlgebraElement::basis(0);    // J_12
    for (int k = 0; k < 20; ++k) {
        Vec5 v;
        for (double& x : v) x = gauss(rng);
        v[4] = std::abs(v[4]) + 0.05;
        SpherePoint p = SpherePoint::project(v);
        for (const AlgebraElement& c : {boost, rot}) {
            double hh = 1e-3;
            double pd = (flow(c, p, hh).factor - flow(c, p, -hh).factor) / (2.0 * hh);
            pdot_err = std::max(pdot_err, std::abs(pd - 0.25 * divergence(c, p)));
        }
    }
    rep.add("pdot_vs_quarter_div_max", pdot_err, 1e-5);

    for (const auto& [name, c] :
         std::vector<std::pair<std::string, AlgebraElement>>{{"rotation_J12", rot},
                                                             {"boost_X1", boost}}) {
        OrbitCheck oc = orbit_derivative_check(cand.u(), data, c, cfg.h, interior, boundary);
        rep.add("orbit_" + name + "_d1_rel", oc.d1 / oc.scale1, 1e-4);
        rep.add("orbit_" + name + "_d2_rel", oc.d2 / oc.scale2, 1e-4);
        rep.add("orbit_" + name + "_d3_rel", oc.d3 / oc.scale3, 1e-4);
    }
    return rep;
}

namespace {

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw std::invalid_argument(what + ": malformed number '" + tok + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

// key=value lines, '#' comments; applied only where no flag was given.
void merge_config_file(const std::string& path, CLI::App* sub, RunConfig& cfg,
                       std::vector<double>& a_flat, std::vector<double>& rot_flat) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("--config: cannot open '" + path + "'");
    std::string line;
    int lineno = 0;
    auto unset = [&](const char* flag) { return sub->count(flag) == 0; };
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        std::size_t last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--config line " + std::to_string(lineno) +
                                        ": expected key=value");
        std::string key = line.substr(0, line.find_last_not_of(" \t", eq - 1) + 1);
        std::size_t vstart = line.find_first_not_of(" \t", eq + 1);
        std::string value = vstart == std::string::npos ? "" : line.substr(vstart);
        try {
            if (key == "u") {
                if (unset("--u")) cfg.u_expr = value;
            } else if (key == "q") {
                if (unset("--q")) cfg.q_expr = value;
            } else if (key == "t") {
                if (unset("--t")) cfg.t_expr = value;
            } else if (key == "a") {
                if (unset("--a")) a_flat = parse_number_list(value, "a");
            } else if (key == "rot") {
                if (unset("--rot")) rot_flat = parse_number_list(value, "rot");
            } else if (key == "nodes") {
                if (unset("--nodes")) cfg.nodes = std::stoi(value);
            } else if (key == "h") {
                if (unset("--h")) cfg.h = std::stod(value);
            } else if (key == "out") {
                if (unset("--out")) cfg.out = value;
            } else if (key == "threads") {
                if (unset("--threads")) cfg.threads = std::stoi(value);
            } else {
                throw std::invalid_argument("unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("--config line " + std::to_string(lineno) + ": " +
                                        e.what());
        }
    }
}

RunConfig cfg_from_cli(const std::string& command, const std::vector<double>& a_flat,
                       const std::vector<double>& rot_flat, const RunConfig& base) {
    RunConfig cfg = base;
    cfg.command = command;
    if (cfg.nodes < 8 || cfg.nodes > 256)
        throw std::invalid_argument("nodes must lie in [8, 256]");
    if (!a_flat.empty()) {
        if (a_flat.size() != 4) throw std::invalid_argument("--a needs exactly 4 components");
        for (int i = 0; i < 4; ++i) cfg.a[i] = a_flat[i];
        cfg.has_a = true;
    }
    if (!rot_flat.empty()) {
        if (rot_flat.size() % 3 != 0)
            throw std::invalid_argument("--rot needs i,j,angle triples");
        for (std::size_t k = 0; k < rot_flat.size(); k += 3)
            cfg.rotations.push_back({rot_flat[k], rot_flat[k + 1], rot_flat[k + 2]});
    }
    return cfg;
}

}  // namespace

int run_cli(const std::vector<std::string>& argv) {
    CLI::App app{"Verification and obstruction certificates for the prescribed "
                 "Q/T-curvature problem on the upper hemisphere"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print usage");

    RunConfig base;
    std::vector<double> a_flat, rot_flat;
    std::string config_path;

    auto add_common = [&](CLI::App* sub) {
        sub->set_help_flag("--help", "print usage");
        sub->add_option("--u", base.u_expr, "candidate solution expression");
        sub->add_option("--q", base.q_expr, "prescribed Q expression");
        sub->add_option("--t", base.t_expr, "prescribed T expression (x1..x4 only)");
        sub->add_option("--a", a_flat, "Mobius parameter, 4 comma-separated reals")
            ->delimiter(',');
        sub->add_option("--rot", rot_flat, "rotation triples i,j,angle applied left-to-right")
            ->delimiter(',');
        sub->add_option("--nodes", base.nodes,
                        "quadrature size N (n_theta = n_t = N, n_psi = 2N); default 48, "
                        "orbit-check 12")
            ->check(CLI::Range(8, 256));
        sub->add_option("--h", base.h, "orbit differentiation step");
        sub->add_option("--out", base.out, "write the JSON report to this path");
        sub->add_option("--threads", base.threads, "worker threads (0 = all cores)");
        sub->add_option("--config", config_path,
                        "key=value configuration file ('#' comments); flags override");
    };

    CLI::App* verify = app.add_subcommand("verify", "verify all identities for a manufactured solution");
    add_common(verify);
    CLI::App* certify_cmd = app.add_subcommand("certify", "search for a nonexistence certificate");
    add_common(certify_cmd);
    CLI::App* gbc = app.add_subcommand("gbc", "Gauss-Bonnet-Chern constraint check");
    add_common(gbc);
    CLI::App* mob = app.add_subcommand("mobius-check", "conformal map diagnostics");
    add_common(mob);
    CLI::App* pan = app.add_subcommand("paneitz-check", "operator spectrum diagnostics");
    add_common(pan);
    CLI::App* orb = app.add_subcommand("orbit-check", "conformal flow derivative checks");
    add_common(orb);

    std::vector<std::string> args(argv.rbegin(), argv.rend());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    auto started = std::chrono::steady_clock::now();
    Report rep;
    try {
        CLI::App* sub = app.get_subcommands().front();
        if (!config_path.empty()) merge_config_file(config_path, sub, base, a_flat, rot_flat);
        if (sub->get_name() == "orbit-check" && sub->count("--nodes") == 0 &&
            base.nodes == 48)
            base.nodes = 12;
        RunConfig cfg = cfg_from_cli(sub->get_name(), a_flat, rot_flat, base);
        set_thread_count(cfg.threads);
        if (cfg.command == "verify") {
            rep = run_verify(cfg);
        } else if (cfg.command == "certify") {
            rep = run_certify(cfg);
        } else if (cfg.command == "gbc") {
            rep = run_gbc(cfg);
        } else if (cfg.command == "mobius-check") {
            rep = run_mobius_check(cfg);
        } else if (cfg.command == "paneitz-check") {
            rep = run_paneitz_check(cfg);
        } else {
            rep = run_orbit_check(cfg);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const SourceError& e) {
        std::cerr << "expression error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    rep.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    std::string text = rep.to_json().dump(2);
    if (!base.out.empty()) {
        std::ofstream f(base.out);
        f << text << "\n";
    } else {
        std::cout << text << "\n";
    }
    return rep.pass ? 0 : 1;
}

}  // namespace qt
