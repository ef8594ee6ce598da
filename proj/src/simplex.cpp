#include "qt/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qt {

namespace {

constexpr double kEps = 1e-9;
constexpr double kPivotTol = 1e-11;

// Dictionary tableau. Row i encodes  x_B[i] = rhs[i] - sum_j T[i][j] x_N[j];
// an objective row encodes  z = zc + sum_j oc[j] x_N[j].
struct Dictionary {
    int m, n;                        // constraints, structural variables
    std::vector<std::vector<double>> T;
    std::vector<double> rhs;
    std::vector<int> B, N;           // variable ids per row / column
    std::vector<double> obj, pobj;   // real and phase-1 objective coefficients
    double objc = 0.0, pobjc = 0.0;
    int iterations = 0, max_iterations;

    void pivot(int r, int s) {
        double piv = T[r][s];
        if (std::abs(piv) < kPivotTol)
            throw LpError("degenerate basis: pivot " + std::to_string(piv));
        int cols = static_cast<int>(N.size());
        double inv = 1.0 / piv;
        rhs[r] *= inv;
        for (int j = 0; j < cols; ++j) T[r][j] *= inv;
        T[r][s] = inv;
        for (int i = 0; i < m; ++i) {
            if (i == r) continue;
            double f = T[i][s];
            if (f == 0.0) continue;
            rhs[i] -= f * rhs[r];
            for (int j = 0; j < cols; ++j) T[i][j] -= f * T[r][j];
            T[i][s] = -f * inv;
        }
        auto update_obj = [&](std::vector<double>& oc, double& zc) {
            double f = oc[s];
            if (f == 0.0) return;
            zc += f * rhs[r];
            for (int j = 0; j < cols; ++j) oc[j] -= f * T[r][j];
            oc[s] = -f * inv;
        };
        update_obj(obj, objc);
        update_obj(pobj, pobjc);
        std::swap(B[r], N[s]);
    }

    enum class Step { Optimal, Pivoted, Unbounded };

    // Bland's rule: entering = smallest variable id with positive reduced
    // cost; leaving = min ratio, ties broken by smallest basic id.
    Step bland_step(const std::vector<double>& oc) {
        int s = -1;
        for (int j = 0; j < static_cast<int>(N.size()); ++j)
            if (oc[j] > kEps && (s == -1 || N[j] < N[s])) s = j;
        if (s == -1) return Step::Optimal;
        int r = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            if (T[i][s] <= kEps) continue;
            double ratio = rhs[i] / T[i][s];
            if (ratio < best || (ratio == best && (r == -1 || B[i] < B[r]))) {
                best = ratio;
                r = i;
            }
        }
        if (r == -1) return Step::Unbounded;
        pivot(r, s);
        if (++iterations > max_iterations) throw LpError("simplex iteration limit exceeded");
        return Step::Pivoted;
    }

    Step run(const std::vector<double>& oc) {
        Step st;
        while ((st = bland_step(oc)) == Step::Pivoted) {
        }
        return st;
    }
};

}  // namespace

LpResult solve_lp(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                  const std::vector<double>& c, int max_iterations) {
    const int m = static_cast<int>(A.size());
    const int n = static_cast<int>(c.size());
    for (const auto& row : A)
        if (static_cast<int>(row.size()) != n) throw std::invalid_argument("ragged LP matrix");
    if (static_cast<int>(b.size()) != m) throw std::invalid_argument("LP size mismatch");

    const int id_art = n + m;  // single artificial variable
    Dictionary d;
    d.m = m;
    d.n = n;
    d.max_iterations = max_iterations;
    d.T.assign(m, std::vector<double>(n + 1, 0.0));
    d.rhs = b;
    d.B.resize(m);
    d.N.resize(n + 1);
    for (int i = 0; i < m; ++i) {
        d.B[i] = n + i;  // slack
        for (int j = 0; j < n; ++j) d.T[i][j] = A[i][j];
        d.T[i][n] = -1.0;  // artificial column
    }
    for (int j = 0; j < n; ++j) d.N[j] = j;
    d.N[n] = id_art;
    d.obj.assign(n + 1, 0.0);
    for (int j = 0; j < n; ++j) d.obj[j] = c[j];
    d.pobj.assign(n + 1, 0.0);
    d.pobj[n] = -1.0;  // w = -x_art

    // Phase 1 if some rhs is negative: one special pivot makes the
    // dictionary feasible, then maximize w.
    int worst = -1;
    for (int i = 0; i < m; ++i)
        if (d.rhs[i] < -kEps && (worst == -1 || d.rhs[i] < d.rhs[worst])) worst = i;
    if (worst >= 0) {
        d.pivot(worst, n);
        if (d.run(d.pobj) == Dictionary::Step::Unbounded)
            throw LpError("phase-1 objective unbounded");
        if (d.pobjc < -1e-7) {
            LpResult res;
            res.status = LpResult::Status::Infeasible;
            res.iterations = d.iterations;
            return res;
        }
        // Drive the artificial variable out of the basis if it lingers
        // at value zero.
        for (int i = 0; i < m; ++i) {
            if (d.B[i] != id_art) continue;
            int s = -1;
            for (int j = 0; j < static_cast<int>(d.N.size()); ++j)
                if (std::abs(d.T[i][j]) > kPivotTol && d.N[j] != id_art) {
                    s = j;
                    break;
                }
            if (s >= 0) {
                d.pivot(i, s);
            } else {
                // redundant row
                d.T[i].assign(d.N.size(), 0.0);
                d.rhs[i] = 0.0;
            }
            break;
        }
    }
    // Freeze the artificial variable at zero for phase 2.
    for (int j = 0; j < static_cast<int>(d.N.size()); ++j)
        if (d.N[j] == id_art) {
            d.obj[j] = 0.0;
            for (int i = 0; i < m; ++i) d.T[i][j] = 0.0;
        }

    if (d.run(d.obj) == Dictionary::Step::Unbounded) {
        LpResult res;
        res.status = LpResult::Status::Unbounded;
        res.iterations = d.iterations;
        return res;
    }

    LpResult res;
    res.status = LpResult::Status::Optimal;
    res.objective = d.objc;
    res.iterations = d.iterations;
    res.x.assign(n, 0.0);
    for (int i = 0; i < m; ++i)
        if (d.B[i] < n) res.x[d.B[i]] = d.rhs[i];
    return res;
}

}  // namespace qt
