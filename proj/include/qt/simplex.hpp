#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qt {

// Numerical failure inside the LP solve (reported distinctly from an
// infeasible or empty result).
struct LpError : std::runtime_error {
    explicit LpError(const std::string& message) : std::runtime_error(message) {}
};

struct LpResult {
    enum class Status { Optimal, Unbounded, Infeasible };
    Status status;
    double objective = 0.0;
    std::vector<double> x;
    int iterations = 0;
};

// Dense two-phase simplex with Bland's rule (anti-cycling):
//   maximize c.x  subject to  A x <= b,  x >= 0.
// Sized for few variables and up to ~1e4 constraints.
LpResult solve_lp(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                  const std::vector<double>& c, int max_iterations = 200000);

}  // namespace qt
