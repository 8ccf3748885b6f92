#pragma once

#include <vector>

#include "ucpd/errors.hpp"

namespace ucpd {

/// min c'x  s.t.  Ax = b, x >= 0, stored dense.
struct LpProblem {
    int num_vars = 0;
    std::vector<std::vector<double>> rows;  // A, one vector per equality
    std::vector<double> rhs;                // b
    std::vector<double> objective;          // c
};

struct LpSolution {
    std::vector<double> x;
    double value = 0.0;
    std::vector<double> dual;     // y, one per row
    double duality_gap = 0.0;     // |c'x - y'b|
    double primal_residual = 0.0; // ||Ax - b||_inf
    int pivots = 0;
};

/// Two-phase dense simplex with Bland's rule (deterministic, cycle-free).
/// Throws InfeasibleError when phase 1 ends above tolerance.
LpSolution solve_lp(const LpProblem& problem);

}  // namespace ucpd
