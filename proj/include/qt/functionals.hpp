#pragma once

#include <utility>

#include "qt/quadrature.hpp"
#include "qt/sphere.hpp"

namespace qt {

// Prescribed interior Q and boundary T data. T is a field on S^3,
// evaluated with x5 = 0.
struct PrescribedData {
    ScalarField Q;
    ScalarField T;
};

// A field in the admissible space: Neumann condition on the equator,
// checked over the boundary nodes of a rule.
class CandidateSolution {
  public:
    CandidateSolution(ScalarField u, const QuadRule& boundary);
    const ScalarField& u() const { return u_; }
    double max_boundary_normal_derivative() const { return max_nd_; }

  private:
    ScalarField u_;
    double max_nd_;
};

// (Q, T) such that u solves the curvature problem by construction:
// Q = (P4 u + 6) e^{-4u} / 2 and T = -d(lap u)/dnu e^{-3u} / 2.
PrescribedData manufacture(const CandidateSolution& u);

// (N_Q, B_T) = (int Q e^{4u} dV, int T e^{3u} dS).
std::pair<double, double> curvature_integrals(const ScalarField& u, const PrescribedData& data,
                                              const QuadRule& interior, const QuadRule& boundary);

// N_Q + B_T - 4 pi^2.
double gbc_defect(const ScalarField& u, const PrescribedData& data, const QuadRule& interior,
                  const QuadRule& boundary);

// S(u) = int (lap u)^2 + 2 int |grad u|^2 + 12 int u.
double s_functional(const ScalarField& u, const QuadRule& interior);

// Q_g(u,v) in its integrated-by-parts form
// int lap u lap v + 2 int <grad u, grad v> (both interior).
double q_bilinear(const ScalarField& u, const ScalarField& v, const QuadRule& interior);

// I(u) = S(u) - N_Q(u) - 4/3 B_T(u), from the same rule objects.
double energy(const ScalarField& u, const PrescribedData& data, const QuadRule& interior,
              const QuadRule& boundary);

// int lap u lap v + 2 int <grad u, grad v> + 6 int v
//   - int_{S3} 2 T e^{3u} v - int 2 Q e^{4u} v.
double weak_residual(const ScalarField& u, const PrescribedData& data, const ScalarField& v,
                     const QuadRule& interior, const QuadRule& boundary);

// S_g(u+v) - S_g(u) - S_tilde(v) with
// S_tilde(v) = Q_g(v,v) + 4 int Q v e^{4u} dV + 4 int T v e^{3u} dS.
double cocycle_defect(const ScalarField& u, const PrescribedData& data, const ScalarField& v,
                      const QuadRule& interior, const QuadRule& boundary);

}  // namespace qt
