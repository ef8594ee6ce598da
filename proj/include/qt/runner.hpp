#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qt/conformal.hpp"
#include "qt/functionals.hpp"

#include "json.hpp"

namespace qt {

using Json = nlohmann::ordered_json;

struct Check {
    std::string name;
    double value;
    double tol;
    bool pass;
};

struct Report {
    std::string command;
    Json config;
    std::vector<Check> checks;
    bool pass = true;
    double seconds = 0.0;

    void add(const std::string& name, double value, double tol) {
        bool ok = std::abs(value) <= tol;
        checks.push_back({name, value, tol, ok});
        pass = pass && ok;
    }
    void add_check(const Check& c) {
        checks.push_back(c);
        pass = pass && c.pass;
    }
    Json to_json() const;
};

struct RunConfig {
    std::string command;
    std::string u_expr, q_expr, t_expr;
    Vec4 a{};
    bool has_a = false;
    std::vector<std::array<double, 3>> rotations;  // (i, j, angle) triples
    int nodes = 48;
    double h = 1e-3;
    std::string out;
    int threads = 0;

    Mat4 rotation_matrix() const;
    MobiusMap mobius() const;
    Json echo() const;
};

// Scale-aware residuals (scale = max(1, sum of |constituent integrals|)).
struct ScaledValue {
    double value;
    double scale;
};
ScaledValue weak_residual_detail(const ScalarField& u, const PrescribedData& data,
                                 const ScalarField& v, const QuadRule& interior,
                                 const QuadRule& boundary);
ScaledValue cocycle_defect_detail(const ScalarField& u, const PrescribedData& data,
                                  const ScalarField& v, const QuadRule& interior,
                                  const QuadRule& boundary);

// Named admissible fields used by the verification suites.
std::vector<std::pair<std::string, Expr>> standard_battery();
std::vector<std::pair<std::string, Expr>> weak_test_functions();
std::vector<std::pair<std::string, Expr>> random_test_functions(int count, unsigned seed);

Report run_verify(const RunConfig& cfg);
Report run_certify(const RunConfig& cfg);
Report run_gbc(const RunConfig& cfg);
Report run_mobius_check(const RunConfig& cfg);
Report run_paneitz_check(const RunConfig& cfg);
Report run_orbit_check(const RunConfig& cfg);

// Full CLI: parses argv, dispatches, writes the JSON report to stdout or
// --out. Exit codes: 0 all checks pass / decision reached, 1 check
// failed, 2 usage or configuration error.
int run_cli(const std::vector<std::string>& argv);

}  // namespace qt
