#include "ucpd/oracle.hpp"

#include <cmath>

#include "ucpd/simplex.hpp"

namespace ucpd {

namespace {

// flat edge index across layers, matching LayeredTensor block order
struct EdgeIndexer {
    std::vector<int> offsets;
    int total = 0;

    explicit EdgeIndexer(const MdpLayout& layout) {
        offsets.resize(layout.layer_count());
        for (int k = 0; k < layout.layer_count(); ++k) {
            offsets[k] = total;
            total += layout.block_size(k);
        }
    }
};

std::vector<double> flatten(const LayeredTensor& t) {
    std::vector<double> out;
    for (int k = 0; k < t.layer_count(); ++k) {
        auto b = t.block(k);
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

OccupancyMeasure unflatten(const std::vector<double>& x, const MdpLayout& layout) {
    OccupancyMeasure theta(layout);
    std::size_t idx = 0;
    for (int k = 0; k < layout.layer_count(); ++k)
        for (double& v : theta.block(k)) v = x[idx++];
    return theta;
}

// equality rows for conditions (a), (b) and (c); columns are the edges
LpProblem polytope_rows(const MdpLayout& layout, const TransitionModel& model) {
    const EdgeIndexer edges(layout);
    const int A = layout.action_count();
    LpProblem lp;
    lp.num_vars = edges.total;

    for (int k = 0; k < layout.layer_count(); ++k) {
        std::vector<double> row(edges.total, 0.0);
        for (int e = 0; e < layout.block_size(k); ++e) row[edges.offsets[k] + e] = 1.0;
        lp.rows.push_back(std::move(row));
        lp.rhs.push_back(1.0);
    }

    for (int k = 1; k < layout.layer_count(); ++k) {
        const int prev = k - 1;
        for (int j = 0; j < layout.layer_size(k); ++j) {
            std::vector<double> row(edges.total, 0.0);
            for (int i = 0; i < layout.layer_size(prev); ++i)
                for (int a = 0; a < A; ++a) {
                    const int off = (i * A + a) * layout.layer_size(k) + j;
                    row[edges.offsets[prev] + off] += 1.0;
                }
            for (int a = 0; a < A; ++a)
                for (int nxt = 0; nxt < layout.layer_size(k + 1); ++nxt) {
                    const int off = (j * A + a) * layout.layer_size(k + 1) + nxt;
                    row[edges.offsets[k] + off] -= 1.0;
                }
            lp.rows.push_back(std::move(row));
            lp.rhs.push_back(0.0);
        }
    }

    for (int k = 0; k < layout.layer_count(); ++k) {
        const int nn = layout.layer_size(k + 1);
        for (int i = 0; i < layout.layer_size(k); ++i) {
            for (int a = 0; a < A; ++a) {
                for (int j = 0; j < nn; ++j) {
                    std::vector<double> row(edges.total, 0.0);
                    const double p = model.prob(k, i, a, j);
                    for (int jj = 0; jj < nn; ++jj) {
                        const int off = (i * A + a) * nn + jj;
                        row[edges.offsets[k] + off] = (jj == j ? 1.0 : 0.0) - p;
                    }
                    lp.rows.push_back(std::move(row));
                    lp.rhs.push_back(0.0);
                }
            }
        }
    }
    return lp;
}

LpProblem build_lp(const HindsightProblem& problem, const std::vector<double>& thresholds) {
    LpProblem lp = polytope_rows(problem.layout, problem.model);
    const int edges = lp.num_vars;
    const int I = static_cast<int>(problem.expected_constraints.size());
    // one slack per budget constraint
    for (auto& row : lp.rows) row.resize(edges + I, 0.0);
    for (int i = 0; i < I; ++i) {
        std::vector<double> row(edges + I, 0.0);
        const auto g = flatten(problem.expected_constraints[i]);
        for (int e = 0; e < edges; ++e) row[e] = g[e];
        row[edges + i] = 1.0;
        lp.rows.push_back(std::move(row));
        lp.rhs.push_back(thresholds[i]);
    }
    lp.num_vars = edges + I;
    lp.objective.assign(lp.num_vars, 0.0);
    const auto f = flatten(problem.summed_losses);
    for (int e = 0; e < edges; ++e) lp.objective[e] = f[e];
    return lp;
}

}  // namespace

OracleSolution solve_best_fixed(const HindsightProblem& problem) {
    if (problem.expected_constraints.size() != problem.thresholds.size())
        throw StructuralError("solve_best_fixed: constraint/threshold count mismatch");
    const LpProblem lp = build_lp(problem, problem.thresholds);
    const LpSolution sol = solve_lp(lp);
    OracleSolution out{unflatten(sol.x, problem.layout), sol.value, sol.duality_gap,
                       sol.primal_residual};
    return out;
}

bool feasible_with_slack(const HindsightProblem& problem, double slack) {
    std::vector<double> tightened = problem.thresholds;
    for (double& c : tightened) c -= slack;
    LpProblem lp = build_lp(problem, tightened);
    lp.objective.assign(lp.num_vars, 0.0);
    try {
        solve_lp(lp);
        return true;
    } catch (const InfeasibleError&) {
        return false;
    }
}

std::pair<double, double> constraint_value_range(const MdpLayout& layout,
                                                 const TransitionModel& model,
                                                 const StageFunction& g) {
    LpProblem lp = polytope_rows(layout, model);
    lp.objective = flatten(g);
    const double lo = solve_lp(lp).value;
    for (double& v : lp.objective) v = -v;
    const double hi = -solve_lp(lp).value;
    return {lo, hi};
}

std::optional<OracleSolution> brute_force_best_fixed(const HindsightProblem& problem,
                                                     double grid_resolution) {
    const MdpLayout& layout = problem.layout;
    const int A = layout.action_count();
    int nonterminal = 0;
    for (int k = 0; k < layout.layer_count(); ++k) nonterminal += layout.layer_size(k);
    double policy_count = std::pow(static_cast<double>(A), nonterminal);
    if (policy_count > 12.0)
        throw ParameterError("brute_force_best_fixed: more than 12 deterministic policies");
    const int P = static_cast<int>(policy_count);

    std::vector<OccupancyMeasure> vertices;
    vertices.reserve(P);
    for (int code = 0; code < P; ++code) {
        Policy pi(layout);
        int rem = code;
        for (int k = 0; k < layout.layer_count(); ++k) {
            for (int i = 0; i < layout.layer_size(k); ++i) {
                pi.prob(k, i, rem % A) = 1.0;
                rem /= A;
            }
        }
        vertices.push_back(true_occupancy(pi, problem.model, layout));
    }

    const auto feasible = [&](const OccupancyMeasure& theta) {
        for (std::size_t i = 0; i < problem.expected_constraints.size(); ++i)
            if (inner_product(problem.expected_constraints[i], theta) >
                problem.thresholds[i] + 1e-12)
                return false;
        return true;
    };

    std::optional<OracleSolution> best;
    const auto consider = [&](const OccupancyMeasure& theta) {
        if (!feasible(theta)) return;
        const double value = inner_product(problem.summed_losses, theta);
        if (!best || value < best->value) best = OracleSolution{theta, value, 0.0, 0.0};
    };

    for (const auto& v : vertices) consider(v);
    // a single inequality binds on at most an edge of the polytope, so
    // pairwise mixtures of vertices cover the optimum up to grid error
    const int steps = static_cast<int>(std::round(1.0 / grid_resolution));
    for (std::size_t p = 0; p < vertices.size(); ++p) {
        for (std::size_t q = p + 1; q < vertices.size(); ++q) {
            for (int s = 1; s < steps; ++s) {
                const double w = static_cast<double>(s) / steps;
                OccupancyMeasure mix = vertices[p];
                mix.axpy(1.0 - w, w, vertices[q]);
                consider(mix);
            }
        }
    }
    return best;
}

void MetricsAccumulator::observe(const StageFunction& f_t, const std::vector<StageFunction>& g_t,
                                 const OccupancyMeasure& theta_bar,
                                 const std::vector<double>& thresholds) {
    const double loss = inner_product(f_t, theta_bar);
    cum_alg_loss += loss;
    episode_losses.push_back(loss);
    loss_sum.axpy(1.0, 1.0, f_t);
    for (std::size_t i = 0; i < constraint_sums.size(); ++i)
        constraint_sums[i] += inner_product(g_t[i], theta_bar) - thresholds[i];
}

double regret(const MetricsAccumulator& acc, const OccupancyMeasure& theta_star) {
    return acc.cum_alg_loss - inner_product(acc.loss_sum, theta_star);
}

double violation(const MetricsAccumulator& acc) {
    double sq = 0.0;
    for (double s : acc.constraint_sums) {
        const double clipped = std::max(s, 0.0);
        sq += clipped * clipped;
    }
    return std::sqrt(sq);
}

}  // namespace ucpd
