#include "ucpd/simplex.hpp"

#include <cmath>
#include <limits>

namespace ucpd {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-8;

struct Tableau {
    // columns: structural vars [0, n), artificials [n, n+m), rhs at n+m
    std::vector<std::vector<double>> t;  // m constraint rows + 1 cost row
    std::vector<int> basis;              // basic variable per row
    int m, n;

    double& at(int r, int c) { return t[r][c]; }
    int rhs_col() const { return n + m; }

    void pivot(int row, int col) {
        const double inv = 1.0 / t[row][col];
        for (double& v : t[row]) v *= inv;
        t[row][col] = 1.0;  // kill roundoff on the pivot itself
        for (int r = 0; r < static_cast<int>(t.size()); ++r) {
            if (r == row) continue;
            const double factor = t[r][col];
            if (factor == 0.0) continue;
            for (int c = 0; c <= rhs_col(); ++c) t[r][c] -= factor * t[row][c];
            t[r][col] = 0.0;
        }
        basis[row] = col;
    }

    // Bland: entering = lowest-index column with negative reduced cost,
    // leaving = ratio test with ties broken by lowest basic variable index.
    // allow(col) filters candidate entering columns.
    template <typename Allow>
    int iterate(Allow allow) {
        const int cost = m;
        int pivots = 0;
        while (true) {
            int enter = -1;
            for (int c = 0; c < n + m; ++c) {
                if (!allow(c)) continue;
                if (t[cost][c] < -kPivotTol) {
                    enter = c;
                    break;
                }
            }
            if (enter < 0) return pivots;
            int leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int r = 0; r < m; ++r) {
                if (t[r][enter] <= kPivotTol) continue;
                const double ratio = t[r][rhs_col()] / t[r][enter];
                if (ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 && (leave < 0 || basis[r] < basis[leave]))) {
                    best_ratio = ratio;
                    leave = r;
                }
            }
            if (leave < 0) throw StructuralError("simplex: unbounded objective");
            pivot(leave, enter);
            ++pivots;
        }
    }
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
    const int m = static_cast<int>(problem.rows.size());
    const int n = problem.num_vars;
    Tableau tab;
    tab.m = m;
    tab.n = n;
    tab.t.assign(m + 1, std::vector<double>(n + m + 1, 0.0));
    tab.basis.resize(m);

    for (int r = 0; r < m; ++r) {
        const double sign = problem.rhs[r] < 0.0 ? -1.0 : 1.0;
        for (int c = 0; c < n; ++c) tab.at(r, c) = sign * problem.rows[r][c];
        tab.at(r, n + r) = 1.0;
        tab.at(r, tab.rhs_col()) = sign * problem.rhs[r];
        tab.basis[r] = n + r;
    }

    // phase 1: minimize the sum of artificials; price out the basic ones
    for (int c = 0; c <= tab.rhs_col(); ++c) {
        double v = 0.0;
        for (int r = 0; r < m; ++r) v += tab.at(r, c);
        tab.at(m, c) = (c >= n && c < n + m ? 1.0 : 0.0) - v;
    }
    LpSolution sol;
    sol.pivots += tab.iterate([](int) { return true; });
    const double phase1 = -tab.at(m, tab.rhs_col());
    if (phase1 > kFeasTol) throw InfeasibleError("simplex: problem infeasible (phase-1 optimum " +
                                                 std::to_string(phase1) + ")");

    // drive surviving zero-level artificials out of the basis where possible
    for (int r = 0; r < m; ++r) {
        if (tab.basis[r] < n) continue;
        int col = -1;
        for (int c = 0; c < n; ++c) {
            if (std::fabs(tab.at(r, c)) > 1e-7) {
                col = c;
                break;
            }
        }
        if (col >= 0) {
            tab.pivot(r, col);
            ++sol.pivots;
        }
        // a fully zero row is redundant; its artificial stays basic at level 0
    }

    // phase 2 cost row: c for structural columns, 0 for artificials, priced out
    for (int c = 0; c <= tab.rhs_col(); ++c) tab.at(m, c) = 0.0;
    for (int c = 0; c < n; ++c) tab.at(m, c) = problem.objective[c];
    for (int r = 0; r < m; ++r) {
        const int b = tab.basis[r];
        if (b >= n) continue;
        const double cost = problem.objective[b];
        if (cost == 0.0) continue;
        for (int c = 0; c <= tab.rhs_col(); ++c) tab.at(m, c) -= cost * tab.at(r, c);
    }
    // artificials may not re-enter
    sol.pivots += tab.iterate([&](int c) { return c < n; });

    sol.x.assign(n, 0.0);
    for (int r = 0; r < m; ++r)
        if (tab.basis[r] < n) sol.x[tab.basis[r]] = tab.at(r, tab.rhs_col());
    sol.value = 0.0;
    for (int c = 0; c < n; ++c) sol.value += problem.objective[c] * sol.x[c];

    // duals from the artificial columns: reduced cost of artificial r is -y_r
    // (up to the sign flip applied to rows with negative rhs)
    sol.dual.assign(m, 0.0);
    double dual_value = 0.0;
    for (int r = 0; r < m; ++r) {
        const double sign = problem.rhs[r] < 0.0 ? -1.0 : 1.0;
        sol.dual[r] = -tab.at(m, n + r) * sign;
        dual_value += sol.dual[r] * problem.rhs[r];
    }
    sol.duality_gap = std::fabs(sol.value - dual_value);

    sol.primal_residual = 0.0;
    for (int r = 0; r < m; ++r) {
        double lhs = 0.0;
        for (int c = 0; c < n; ++c) lhs += problem.rows[r][c] * sol.x[c];
        sol.primal_residual = std::max(sol.primal_residual, std::fabs(lhs - problem.rhs[r]));
    }
    return sol;
}

}  // namespace ucpd
