#include "qt/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qt/parallel.hpp"

namespace qt {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (t * p0 - p1) / (t * t - 1.0);
            double dt = p0 / pp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

}  // namespace

double QuadRule::weight_sum() const { return pairwise_sum(weights.data(), weights.size()); }

QuadRule boundary_rule(int n_t, int n_psi) {
    if (n_t < 2 || n_psi < 4)
        throw std::invalid_argument("boundary rule needs n_t >= 2 and n_psi >= 4");
    std::vector<double> gs, gw;
    gauss_legendre(n_t, gs, gw);

    QuadRule rule;
    rule.domain = Domain::Boundary;
    rule.n_t = n_t;
    rule.n_psi = n_psi;
    rule.points.reserve(static_cast<std::size_t>(n_t) * n_psi * n_psi);
    rule.weights.reserve(rule.points.capacity());

    const double dpsi = 2.0 * kPi / n_psi;
    for (int i = 0; i < n_t; ++i) {
        double s = gs[i];
        double ca = std::sqrt((1.0 + s) / 2.0);
        double sa = std::sqrt((1.0 - s) / 2.0);
        double ws = gw[i] * 0.25 * dpsi * dpsi;
        for (int j = 0; j < n_psi; ++j) {
            double p1 = j * dpsi;
            double c1 = std::cos(p1), s1 = std::sin(p1);
            for (int k = 0; k < n_psi; ++k) {
                double p2 = k * dpsi;
                rule.points.push_back({ca * c1, ca * s1, sa * std::cos(p2), sa * std::sin(p2), 0.0});
                rule.weights.push_back(ws);
            }
        }
    }
    return rule;
}

QuadRule hemisphere_rule(int n_theta, int n_t, int n_psi) {
    if (n_theta < 2) throw std::invalid_argument("hemisphere rule needs n_theta >= 2");
    QuadRule s3 = boundary_rule(n_t, n_psi);

    std::vector<double> gc, gw;
    gauss_legendre(n_theta, gc, gw);

    QuadRule rule;
    rule.domain = Domain::Hemisphere;
    rule.n_theta = n_theta;
    rule.n_t = n_t;
    rule.n_psi = n_psi;
    rule.points.reserve(s3.size() * n_theta);
    rule.weights.reserve(s3.size() * n_theta);

    for (int i = 0; i < n_theta; ++i) {
        double c = 0.5 * (gc[i] + 1.0);           // cos(theta) in (0,1)
        double wc = 0.5 * gw[i] * (1.0 - c * c);  // dV polar factor
        double st = std::sqrt(1.0 - c * c);
        for (std::size_t m = 0; m < s3.size(); ++m) {
            const Vec5& o = s3.points[m];
            rule.points.push_back({st * o[0], st * o[1], st * o[2], st * o[3], c});
            rule.weights.push_back(wc * s3.weights[m]);
        }
    }
    return rule;
}

double integrate(const std::function<double(const Vec5&)>& f, const QuadRule& rule) {
    const std::size_t n = rule.size();
    std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partials(nblocks, 0.0);
    parallel_blocks(n, [&](std::size_t b, std::size_t lo, std::size_t hi) {
        std::vector<double> terms(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) {
            try {
                terms[i - lo] = rule.weights[i] * f(rule.points[i]);
            } catch (const EvalError& err) {
                throw EvalError("node " + std::to_string(i) + ": " + err.what());
            }
        }
        partials[b] = pairwise_sum(terms.data(), terms.size());
    });
    return pairwise_combine(std::move(partials));
}

double integrate(const Expr& e, const QuadRule& rule) {
    Tape tape(e);
    const std::size_t n = rule.size();
    std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partials(nblocks, 0.0);
    parallel_blocks(n, [&](std::size_t b, std::size_t lo, std::size_t hi) {
        std::vector<double> scratch(tape.scratch_size());
        std::vector<double> terms(hi - lo);
        double out;
        for (std::size_t i = lo; i < hi; ++i) {
            try {
                tape.eval(rule.points[i].data(), scratch.data(), &out);
            } catch (const EvalError& err) {
                throw EvalError("node " + std::to_string(i) + ": " + err.what());
            }
            terms[i - lo] = rule.weights[i] * out;
        }
        partials[b] = pairwise_sum(terms.data(), terms.size());
    });
    return pairwise_combine(std::move(partials));
}

void integrate_multi(const Tape& tape, const QuadRule& rule, std::size_t num_sums,
                     const std::function<void(const Vec5&, const double*, double*)>& combine,
                     double* sums) {
    const std::size_t n = rule.size();
    std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<std::vector<double>> partials(num_sums, std::vector<double>(nblocks, 0.0));
    parallel_blocks(n, [&](std::size_t b, std::size_t lo, std::size_t hi) {
        std::vector<double> scratch(tape.scratch_size());
        std::vector<double> out(tape.num_outputs());
        std::vector<double> node_terms(num_sums);
        std::vector<std::vector<double>> terms(num_sums, std::vector<double>(hi - lo));
        for (std::size_t i = lo; i < hi; ++i) {
            try {
                tape.eval(rule.points[i].data(), scratch.data(), out.data());
            } catch (const EvalError& err) {
                throw EvalError("node " + std::to_string(i) + ": " + err.what());
            }
            combine(rule.points[i], out.data(), node_terms.data());
            for (std::size_t k = 0; k < num_sums; ++k)
                terms[k][i - lo] = rule.weights[i] * node_terms[k];
        }
        for (std::size_t k = 0; k < num_sums; ++k)
            partials[k][b] = pairwise_sum(terms[k].data(), terms[k].size());
    });
    for (std::size_t k = 0; k < num_sums; ++k) sums[k] = pairwise_combine(std::move(partials[k]));
}

namespace {

// int_0^{pi/2} cos^p sin^q = B((p+1)/2, (q+1)/2) / 2 via lgamma.
double half_beta(double p, double q) {
    return 0.5 * std::exp(std::lgamma((p + 1.0) / 2.0) + std::lgamma((q + 1.0) / 2.0) -
                          std::lgamma((p + q + 2.0) / 2.0));
}

}  // namespace

double boundary_monomial_moment(int b1, int b2, int b3, int b4) {
    if ((b1 | b2 | b3 | b4) < 0) throw std::invalid_argument("negative exponent");
    if (b1 % 2 || b2 % 2 || b3 % 2 || b4 % 2) return 0.0;
    double lg = 0.0;
    for (int b : {b1, b2, b3, b4}) lg += std::lgamma(b / 2.0 + 0.5);
    return 2.0 * std::exp(lg - std::lgamma((b1 + b2 + b3 + b4) / 2.0 + 2.0));
}

double hemisphere_monomial_moment(int a1, int a2, int a3, int a4, int a5) {
    if ((a1 | a2 | a3 | a4 | a5) < 0) throw std::invalid_argument("negative exponent");
    if (a1 % 2 || a2 % 2 || a3 % 2 || a4 % 2) return 0.0;
    int sum4 = a1 + a2 + a3 + a4;
    return boundary_monomial_moment(a1, a2, a3, a4) * half_beta(a5, sum4 + 3);
}

}  // namespace qt
