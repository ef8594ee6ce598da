#pragma once

#include <functional>
#include <vector>

#include "qt/expr.hpp"
#include "qt/geom.hpp"
#include "qt/tape.hpp"

namespace qt {

enum class Domain { Hemisphere, Boundary };

// Product quadrature nodes on the upper hemisphere or its equator.
// Weights are positive and sum to the domain volume (4pi^2/3 or 2pi^2).
struct QuadRule {
    Domain domain;
    int n_theta = 0;  // hemisphere polar factor (0 for boundary rules)
    int n_t = 0;      // Gauss-Legendre factor of the S^3 rule
    int n_psi = 0;    // points per torus angle
    std::vector<Vec5> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
    double weight_sum() const;
};

// Hemisphere rule: x = (sin(theta) omega, cos(theta)) with Gauss-Legendre
// in c = cos(theta) on [0,1] (Jacobian 1-c^2) crossed with the S^3 rule.
// Integrates ambient polynomials of degree <= 2*n_theta-3 exactly when
// n_psi is large enough for the angular factors.
QuadRule hemisphere_rule(int n_theta, int n_t, int n_psi);

// S^3 rule in Hopf coordinates omega = (cos a cos p1, cos a sin p1,
// sin a cos p2, sin a sin p2): Gauss-Legendre in s = cos 2a (Jacobian 1/4),
// periodic uniform grids in p1, p2; embedded at x5 = 0.
QuadRule boundary_rule(int n_t, int n_psi);

// Deterministic integration: per-node evaluation may run on several
// workers, the reduction follows a fixed pairwise tree, so the result is
// bit-stable across thread counts. Evaluation errors abort with the node
// index identified.
double integrate(const std::function<double(const Vec5&)>& f, const QuadRule& rule);
double integrate(const Expr& e, const QuadRule& rule);

// Streaming form used by the heavier functionals: tape outputs at each
// node are combined into one or more accumulator terms by `combine`,
// which writes num_sums values per node.
void integrate_multi(const Tape& tape, const QuadRule& rule, std::size_t num_sums,
                     const std::function<void(const Vec5& p, const double* tape_out,
                                              double* node_terms)>& combine,
                     double* sums);

// Closed-form hemisphere moment of x1^a1 ... x5^a5 (Beta-function route);
// zero when any of a1..a4 is odd. Exact reference for quadrature tests.
double hemisphere_monomial_moment(int a1, int a2, int a3, int a4, int a5);
// Same on S^3 for y1^b1 ... y4^b4.
double boundary_monomial_moment(int b1, int b2, int b3, int b4);

}  // namespace qt
