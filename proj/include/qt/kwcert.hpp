#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qt/conformal.hpp"
#include "qt/functionals.hpp"
#include "qt/quadrature.hpp"
#include "qt/simplex.hpp"

namespace qt {

// Evaluator of a boundary-preserving conformal field at ambient points.
using VectorField = std::function<Vec5(const Vec5&)>;

VectorField basis_field(const AlgebraElement& c);
VectorField pushforward_field(const ConformalMap& map, const AlgebraElement& c);

struct KWResidual {
    double raw;
    double normalization;
    double normalized;
};

// raw = int X(Q) e^{4u} dV + 4/3 int X(T) e^{3u} dS; the normalization
// integrates absolute values so `normalized` is scale-free.
KWResidual kw_residual(const ScalarField& u, const PrescribedData& data, const VectorField& X,
                       const QuadRule& interior, const QuadRule& boundary);

struct KWReport {
    struct Entry {
        int field_index;  // basis index 0..9
        double raw;
        double normalization;
        double normalized;
    };
    std::vector<Entry> entries;
    double tolerance;
    bool pass;  // all |normalized| < tolerance
    double max_normalized;
};

// Residuals across the full 10-field basis (a spanning check by
// linearity).
KWReport kw_report(const ScalarField& u, const PrescribedData& data, const QuadRule& interior,
                   const QuadRule& boundary, double tolerance = 1e-7);

struct OrbitCheck {
    double d1, d2, d3;          // defects of the three derivative identities
    double scale1, scale2, scale3;
    double n_q, b_t, s_u;       // functional values at t = 0
};

// Centered-difference derivatives of N_Q, B_T, S along u_t = u(phi_t) + P_t
// against their closed-form limits.
OrbitCheck orbit_derivative_check(const ScalarField& u, const PrescribedData& data,
                                  const AlgebraElement& c, double h, const QuadRule& interior,
                                  const QuadRule& boundary);

struct Certificate {
    AlgebraElement c;
    bool conjugated = false;
    double objective = 0.0;
    double coarse_min_interior = 0.0;
    double coarse_min_boundary = 0.0;
    double fine_min_interior = 0.0;
    double fine_min_boundary = 0.0;
    double fine_max = 0.0;
    double scale = 0.0;
    std::size_t n_interior = 0, n_boundary = 0;            // coarse sample counts
    std::size_t n_interior_fine = 0, n_boundary_fine = 0;  // verification grid
};

struct CertifyResult {
    std::optional<Certificate> certificate;
    std::string note;  // states inconclusiveness when empty-handed
    bool found() const { return certificate.has_value(); }
};

struct CertifyOptions {
    std::size_t n_interior = 1000;   // >= 500
    std::size_t n_boundary = 400;    // >= 200
    double eps_objective = 1e-6;
    double eps_verify_rel = 1e-9;    // of the fine-grid scale
    double eps_strict_rel = 1e-6;
    std::optional<MobiusMap> conjugation;  // search the pushforward basis
};

struct CertMargins {
    double min_interior;
    double min_boundary;
    double max_value;
    double scale;  // max |X(Q)| + max |X(T)| over the grids
};

// Sign margins of the field action on (Q, T) over explicit grids.
CertMargins verify_certificate(const AlgebraElement& c, const PrescribedData& data,
                               const std::vector<Vec5>& interior_points,
                               const std::vector<Vec5>& boundary_points,
                               const ConformalMap* map = nullptr);

// LP search over the algebra for a nonexistence certificate
// (X(Q) >= 0, X(T) >= 0, somewhere strictly positive), then dense
// verification. Absence of a certificate is inconclusive.
CertifyResult certify(const PrescribedData& data, const CertifyOptions& options = {});

// Evenly strided subset of a rule's nodes, used as sample sets.
std::vector<Vec5> subsample(const QuadRule& rule, std::size_t count);

}  // namespace qt
