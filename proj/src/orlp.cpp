#include "ucpd/orlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ucpd {

namespace {

constexpr double kArmijoSlope = 1e-4;
constexpr double kMinStep = 1e-18;
constexpr double kMaxStep = 1e8;

// global state ids are contiguous layer by layer; recover the offsets from a
// tensor's shape so the solver does not need the full layout object.
// offsets[k] is the id of the first state of layer k, for k = 0..L; the
// terminal layer's size comes from the last block's next-layer dimension.
std::vector<int> state_offsets(const LayeredTensor& shape) {
    const int L = shape.layer_count();
    std::vector<int> offsets(L + 1);
    int id = 0;
    for (int k = 0; k < L; ++k) {
        offsets[k] = id;
        id += shape.layer_size(k);
    }
    offsets[L] = id;
    return offsets;
}

int total_state_count(const LayeredTensor& shape, const std::vector<int>& offsets) {
    return offsets.back() + shape.next_layer_size(shape.layer_count() - 1);
}

struct Workspace {
    const LayeredTensor* log_base;   // log of the projected point, per edge
    const ConfidenceSet* cs;
    std::vector<int> offsets;        // state id offsets per layer
    int total_states;
    std::vector<char> pinned;        // rows whose radius is below the pin threshold

    // scratch, overwritten by each evaluation
    LayeredTensor weights;           // softmax weights w(s,a,s')
    std::vector<double> row_weight;  // W(s,a)
    std::vector<double> log_z;       // per layer
};

struct Iterate {
    LayeredTensor d;               // mu_minus - mu_plus
    std::vector<double> rho;       // mu_plus + mu_minus, one per (s,a) row
    std::vector<double> beta;      // per state; initial and terminal pinned at 0
};

// gradient over the confidence-ball block only; beta and near-equality rows
// are handled by exact coordinate minimization instead of line search
struct Gradient {
    LayeredTensor d;
    std::vector<double> rho;
};

double evaluate(Workspace& ws, const Iterate& x) {
    const LayeredTensor& base = *ws.log_base;
    const ConfidenceSet& cs = *ws.cs;
    const int L = base.layer_count();
    const int A = base.action_count();
    double value = 0.0;
    for (int k = 0; k < L; ++k) {
        const int nk = base.layer_size(k);
        const int nn = base.next_layer_size(k);
        auto wblk = ws.weights.block(k);
        double shift = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < nk; ++i) {
            const int s = ws.offsets[k] + i;
            for (int a = 0; a < A; ++a) {
                const int p = cs.pair_offset[k] + i * A + a;
                double row_dot = 0.0;
                for (int j = 0; j < nn; ++j)
                    row_dot += cs.p_hat.at(k, i, a, j) * x.d.at(k, i, a, j);
                const double common = x.rho[p] * cs.epsilon[p] - row_dot - x.beta[s];
                const int off = base.row_offset(k, i, a);
                for (int j = 0; j < nn; ++j) {
                    const double e = base.block(k)[off + j] + x.d.at(k, i, a, j) + common +
                                     x.beta[ws.offsets[k + 1] + j];
                    wblk[off + j] = e;  // store the exponent for now
                    shift = std::max(shift, e);
                }
            }
        }
        double z = 0.0;
        for (double& e : wblk) {
            e = std::exp(e - shift);
            z += e;
        }
        for (double& e : wblk) e /= z;
        const double log_z = shift + std::log(z);
        ws.log_z[k] = log_z;
        value += log_z;
    }
    // row weights
    std::size_t pairs = cs.epsilon.size();
    ws.row_weight.assign(pairs, 0.0);
    for (int k = 0; k < L; ++k) {
        const int nn = base.next_layer_size(k);
        for (int i = 0; i < base.layer_size(k); ++i) {
            for (int a = 0; a < A; ++a) {
                const int p = cs.pair_offset[k] + i * A + a;
                const int off = base.row_offset(k, i, a);
                double wsum = 0.0;
                for (int j = 0; j < nn; ++j) wsum += ws.weights.block(k)[off + j];
                ws.row_weight[p] = wsum;
            }
        }
    }
    return value;
}

// gradient at the point whose weights are currently in the workspace
void compute_gradient(const Workspace& ws, Gradient& g) {
    const ConfidenceSet& cs = *ws.cs;
    const LayeredTensor& w = ws.weights;
    const int L = w.layer_count();
    const int A = w.action_count();
    for (int k = 0; k < L; ++k) {
        const int nn = w.next_layer_size(k);
        for (int i = 0; i < w.layer_size(k); ++i) {
            for (int a = 0; a < A; ++a) {
                const int p = cs.pair_offset[k] + i * A + a;
                const double W = ws.row_weight[p];
                const int off = w.row_offset(k, i, a);
                if (ws.pinned[p]) {
                    g.rho[p] = 0.0;
                    for (int j = 0; j < nn; ++j) g.d.block(k)[off + j] = 0.0;
                    continue;
                }
                g.rho[p] = cs.epsilon[p] * W;
                for (int j = 0; j < nn; ++j) {
                    const double we = w.block(k)[off + j];
                    g.d.block(k)[off + j] = we - cs.p_hat.at(k, i, a, j) * W;
                }
            }
        }
    }
}

// condition-(b) residual of the current weights
double flow_residual(const Workspace& ws) {
    const LayeredTensor& w = ws.weights;
    const int L = w.layer_count();
    const int A = w.action_count();
    double worst = 0.0;
    for (int k = 1; k < L; ++k) {
        for (int j = 0; j < w.layer_size(k); ++j) {
            double in = 0.0, out = 0.0;
            for (int i = 0; i < w.layer_size(k - 1); ++i)
                for (int a = 0; a < A; ++a) in += w.at(k - 1, i, a, j);
            for (int a = 0; a < A; ++a)
                for (int n = 0; n < w.next_layer_size(k); ++n) out += w.at(k, j, a, n);
            worst = std::max(worst, std::fabs(in - out));
        }
    }
    return worst;
}

// Exact minimization over the beta block: cyclically balance every interior
// state's inflow and outflow with the closed-form multiplicative split,
// folding the scalings into x.beta, then renormalize each layer. The weights
// stay inside the softmax family, so a later evaluate() reproduces them.
void polish_beta(Workspace& ws, Iterate& x, double target, int max_sweeps) {
    LayeredTensor& w = ws.weights;
    const int L = w.layer_count();
    const int A = w.action_count();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double worst = 0.0;
        for (int k = 1; k < L; ++k) {
            for (int j = 0; j < w.layer_size(k); ++j) {
                double in = 0.0, out = 0.0;
                for (int i = 0; i < w.layer_size(k - 1); ++i)
                    for (int a = 0; a < A; ++a) in += w.at(k - 1, i, a, j);
                for (int a = 0; a < A; ++a)
                    for (int n = 0; n < w.next_layer_size(k); ++n) out += w.at(k, j, a, n);
                worst = std::max(worst, std::fabs(in - out));
                if (in <= 0.0 || out <= 0.0) continue;
                const double split = std::sqrt(out / in);
                for (int i = 0; i < w.layer_size(k - 1); ++i)
                    for (int a = 0; a < A; ++a) w.at(k - 1, i, a, j) *= split;
                for (int a = 0; a < A; ++a)
                    for (int n = 0; n < w.next_layer_size(k); ++n) w.at(k, j, a, n) /= split;
                x.beta[ws.offsets[k] + j] += std::log(split);
            }
        }
        for (int k = 0; k < L; ++k) {
            const double mass = w.block_sum(k);
            for (auto& v : w.block(k)) v /= mass;
        }
        if (worst <= target) break;
    }
    // refresh the row sums after the multiplicative updates
    const ConfidenceSet& cs = *ws.cs;
    for (int k = 0; k < L; ++k) {
        const int nn = w.next_layer_size(k);
        for (int i = 0; i < w.layer_size(k); ++i)
            for (int a = 0; a < A; ++a) {
                const int p = cs.pair_offset[k] + i * A + a;
                double sum = 0.0;
                const int off = w.row_offset(k, i, a);
                for (int j = 0; j < nn; ++j) sum += w.block(k)[off + j];
                ws.row_weight[p] = sum;
            }
    }
}

// membership residual of the current weights against the confidence set
double membership_residual(const Workspace& ws) {
    const ConfidenceSet& cs = *ws.cs;
    const LayeredTensor& w = ws.weights;
    const int A = w.action_count();
    double worst = 0.0;
    for (int k = 0; k < w.layer_count(); ++k) {
        const int nn = w.next_layer_size(k);
        for (int i = 0; i < w.layer_size(k); ++i) {
            for (int a = 0; a < A; ++a) {
                const int p = cs.pair_offset[k] + i * A + a;
                const double W = ws.row_weight[p];
                const int off = w.row_offset(k, i, a);
                double dev = 0.0;
                for (int j = 0; j < nn; ++j)
                    dev += std::fabs(w.block(k)[off + j] - cs.p_hat.at(k, i, a, j) * W);
                worst = std::max(worst, dev - cs.epsilon[p] * W);
            }
        }
    }
    return worst;
}

void apply_step(const Iterate& x, const Gradient& g, double eta, const Workspace& ws,
                Iterate& out) {
    const int L = x.d.layer_count();
    const int A = x.d.action_count();
    const ConfidenceSet& cs = *ws.cs;
    out.beta = x.beta;
    out.rho = x.rho;
    std::vector<double> row;
    for (int k = 0; k < L; ++k) {
        const int nn = x.d.next_layer_size(k);
        for (int i = 0; i < x.d.layer_size(k); ++i) {
            for (int a = 0; a < A; ++a) {
                const int p = cs.pair_offset[k] + i * A + a;
                const int off = x.d.row_offset(k, i, a);
                if (ws.pinned[p]) {
                    for (int j = 0; j < nn; ++j) out.d.block(k)[off + j] = x.d.block(k)[off + j];
                    out.rho[p] = x.rho[p];
                    continue;
                }
                row.assign(nn, 0.0);
                for (int j = 0; j < nn; ++j)
                    row[j] = x.d.block(k)[off + j] - eta * g.d.block(k)[off + j];
                double rho = x.rho[p] - eta * g.rho[p];
                project_linf_cone(row, rho);
                out.rho[p] = rho;
                for (int j = 0; j < nn; ++j) out.d.block(k)[off + j] = row[j];
            }
        }
    }
}

double inner(const Iterate& a, const Iterate& b, const Gradient& g) {
    // <g, b - a> over the (d, rho) block
    double dot = 0.0;
    const int L = a.d.layer_count();
    for (int k = 0; k < L; ++k) {
        auto ga = g.d.block(k);
        auto xa = a.d.block(k);
        auto xb = b.d.block(k);
        for (std::size_t e = 0; e < ga.size(); ++e) dot += ga[e] * (xb[e] - xa[e]);
    }
    for (std::size_t p = 0; p < a.rho.size(); ++p) dot += g.rho[p] * (b.rho[p] - a.rho[p]);
    return dot;
}

double mapping_sup_norm(const Iterate& x, const Gradient& g, const Workspace& ws,
                        Iterate& scratch) {
    apply_step(x, g, 1.0, ws, scratch);
    double sup = 0.0;
    const int L = x.d.layer_count();
    for (int k = 0; k < L; ++k) {
        auto xa = x.d.block(k);
        auto xb = scratch.d.block(k);
        for (std::size_t e = 0; e < xa.size(); ++e) sup = std::max(sup, std::fabs(xa[e] - xb[e]));
    }
    for (std::size_t p = 0; p < x.rho.size(); ++p)
        sup = std::max(sup, std::fabs(x.rho[p] - scratch.rho[p]));
    return sup;
}

}  // namespace

void project_linf_cone(std::vector<double>& d, double& rho) {
    double vmax = 0.0;
    for (double v : d) vmax = std::max(vmax, std::fabs(v));
    if (vmax <= rho) {
        if (rho < 0.0) rho = 0.0;
        return;
    }
    std::vector<double> mag(d.size());
    for (std::size_t e = 0; e < d.size(); ++e) mag[e] = std::fabs(d[e]);
    std::sort(mag.begin(), mag.end(), std::greater<double>());
    // clamp the j largest magnitudes to a common level r = (rho + sum_top_j)/(j+1)
    double acc = 0.0;
    double level = std::max(rho, 0.0);
    for (std::size_t j = 1; j <= mag.size(); ++j) {
        acc += mag[j - 1];
        const double candidate = (rho + acc) / (static_cast<double>(j) + 1.0);
        const double next = (j < mag.size()) ? mag[j] : -std::numeric_limits<double>::infinity();
        if (candidate < mag[j - 1] && candidate >= next) {
            level = candidate;
            break;
        }
    }
    if (level < 0.0) level = 0.0;
    for (double& v : d) v = std::clamp(v, -level, level);
    rho = level;
}

PenaltyVector build_penalty(double v_weight, const StageFunction& f_prev,
                            const std::vector<double>& q,
                            const std::vector<StageFunction>& g_prev) {
    if (q.size() != g_prev.size())
        throw StructuralError("build_penalty: dual vector and constraint list sizes differ");
    PenaltyVector out;
    out.psi = f_prev;
    for (int k = 0; k < out.psi.layer_count(); ++k)
        for (double& v : out.psi.block(k)) v *= v_weight;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (!g_prev[i].same_shape(f_prev)) throw StructuralError("build_penalty: shape mismatch");
        out.psi.axpy(1.0, q[i], g_prev[i]);
    }
    return out;
}

LayeredTensor exponential_step(const OccupancyMeasure& theta_mixed, const PenaltyVector& psi,
                               double alpha) {
    if (alpha <= 0.0) throw ParameterError("exponential_step: alpha must be positive");
    if (!theta_mixed.same_shape(psi.psi)) throw StructuralError("exponential_step: shape mismatch");
    LayeredTensor out = theta_mixed;
    for (int k = 0; k < out.layer_count(); ++k) {
        auto o = out.block(k);
        auto p = psi.psi.block(k);
        for (std::size_t e = 0; e < o.size(); ++e) o[e] *= std::exp(-p[e] / alpha);
    }
    return out;
}

std::pair<double, DualPoint> dual_objective(const DualPoint& dual,
                                            const OccupancyMeasure& theta_mixed,
                                            const PenaltyVector& psi, double alpha,
                                            const ConfidenceSet& cs) {
    if (alpha <= 0.0) throw ParameterError("dual_objective: alpha must be positive");
    if (!theta_mixed.same_shape(psi.psi) || !theta_mixed.same_shape(cs.p_hat) ||
        !theta_mixed.same_shape(dual.mu_plus) || !theta_mixed.same_shape(dual.mu_minus))
        throw StructuralError("dual_objective: shape mismatch");
    const auto offsets = state_offsets(theta_mixed);
    if (static_cast<int>(dual.beta.size()) < total_state_count(theta_mixed, offsets))
        throw StructuralError("dual_objective: beta vector shorter than the state count");
    const int L = theta_mixed.layer_count();
    const int A = theta_mixed.action_count();

    LayeredTensor weights = theta_mixed;  // reused as exponent/weight storage
    double value = 0.0;
    for (int k = 0; k < L; ++k) {
        const int nn = theta_mixed.next_layer_size(k);
        auto wblk = weights.block(k);
        double shift = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < theta_mixed.layer_size(k); ++i) {
            const int s = offsets[k] + i;
            for (int a = 0; a < A; ++a) {
                const int p = cs.pair_offset[k] + i * A + a;
                const int off = theta_mixed.row_offset(k, i, a);
                double row_dot = 0.0;
                for (int j = 0; j < nn; ++j)
                    row_dot += cs.p_hat.at(k, i, a, j) *
                               (dual.mu_minus.at(k, i, a, j) - dual.mu_plus.at(k, i, a, j));
                for (int j = 0; j < nn; ++j) {
                    const double mp = dual.mu_plus.at(k, i, a, j);
                    const double mm = dual.mu_minus.at(k, i, a, j);
                    const double b = mm - mp + (mp + mm) * cs.epsilon[p] +
                                     dual.beta[offsets[k + 1] + j] - dual.beta[s] -
                                     psi.psi.at(k, i, a, j) / alpha - row_dot;
                    const double e = std::log(theta_mixed.at(k, i, a, j)) + b;
                    wblk[off + j] = e;
                    shift = std::max(shift, e);
                }
            }
        }
        double z = 0.0;
        for (double& e : wblk) {
            e = std::exp(e - shift);
            z += e;
        }
        for (double& e : wblk) e /= z;
        value += shift + std::log(z);
    }

    DualPoint grad;
    grad.mu_plus = LayeredTensor(weights);
    grad.mu_minus = LayeredTensor(weights);
    for (int k = 0; k < L; ++k) {
        for (auto& v : grad.mu_plus.block(k)) v = 0.0;
        for (auto& v : grad.mu_minus.block(k)) v = 0.0;
    }
    grad.beta.assign(total_state_count(theta_mixed, offsets), 0.0);
    for (int k = 0; k < L; ++k) {
        const int nn = theta_mixed.next_layer_size(k);
        for (int i = 0; i < theta_mixed.layer_size(k); ++i) {
            const int s = offsets[k] + i;
            for (int a = 0; a < A; ++a) {
                const int p = cs.pair_offset[k] + i * A + a;
                const int off = theta_mixed.row_offset(k, i, a);
                double W = 0.0;
                for (int j = 0; j < nn; ++j) W += weights.block(k)[off + j];
                for (int j = 0; j < nn; ++j) {
                    const double we = weights.block(k)[off + j];
                    const double ph = cs.p_hat.at(k, i, a, j);
                    grad.mu_plus.at(k, i, a, j) = we * (cs.epsilon[p] - 1.0) + ph * W;
                    grad.mu_minus.at(k, i, a, j) = we * (cs.epsilon[p] + 1.0) - ph * W;
                    grad.beta[offsets[k + 1] + j] += we;
                    grad.beta[s] -= we;
                }
            }
        }
    }
    return {value, std::move(grad)};
}

std::pair<OccupancyMeasure, SolverReport> kl_projection(
    const LayeredTensor& theta_unnorm, const OccupancyMeasure& theta_mixed,
    const PenaltyVector& psi, double alpha, const ConfidenceSet& cs,
    const SolverOptions& options, DualWarmStart* warm, DualPoint* dual_out) {
    if (alpha <= 0.0) throw ParameterError("kl_projection: alpha must be positive");
    if (!theta_unnorm.same_shape(theta_mixed) || !theta_mixed.same_shape(psi.psi) ||
        !theta_mixed.same_shape(cs.p_hat))
        throw StructuralError("kl_projection: shape mismatch");

    // the projected point in log space: log theta_mixed - psi/alpha
    LayeredTensor log_base = theta_mixed;
    for (int k = 0; k < log_base.layer_count(); ++k) {
        auto b = log_base.block(k);
        auto p = psi.psi.block(k);
        for (std::size_t e = 0; e < b.size(); ++e) {
            if (b[e] <= 0.0)
                throw ParameterError("kl_projection: theta_mixed must be strictly positive");
            b[e] = std::log(b[e]) - p[e] / alpha;
        }
    }

    Workspace ws;
    ws.log_base = &log_base;
    ws.cs = &cs;
    ws.offsets = state_offsets(theta_mixed);
    ws.total_states = total_state_count(theta_mixed, ws.offsets);
    ws.weights = theta_mixed;
    ws.log_z.assign(theta_mixed.layer_count(), 0.0);

    Iterate x;
    x.d = theta_mixed;
    for (int k = 0; k < x.d.layer_count(); ++k)
        for (auto& v : x.d.block(k)) v = 0.0;
    x.rho.assign(cs.epsilon.size(), 0.0);
    x.beta.assign(ws.total_states, 0.0);

    SolverReport report;
    if (warm && !warm->beta.empty() && warm->deviation.same_shape(theta_mixed) &&
        warm->beta.size() == x.beta.size() && warm->row_bound.size() == x.rho.size()) {
        x.d = warm->deviation;
        x.rho = warm->row_bound;
        x.beta = warm->beta;
        x.beta[0] = 0.0;
        x.beta[ws.total_states - 1] = 0.0;
        report.warm_started = true;
    }

    Gradient g;
    g.d = x.d;
    g.rho.assign(x.rho.size(), 0.0);
    Iterate trial = x, scratch = x;

    double value = evaluate(ws, x);
    double step = 1.0;
    bool converged = false;
    double window_start_value = value;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        report.iterations = iter;
        // exact minimization over the flow multipliers, then refresh the
        // weights from the folded beta so they stay bit-reproducible
        polish_beta(ws, x, 0.05 * options.flow_tol, 200);
        value = evaluate(ws, x);

        compute_gradient(ws, g);
        report.grad_norm = mapping_sup_norm(x, g, ws, scratch);
        const double flow = flow_residual(ws);
        const double member = membership_residual(ws);
        report.feasibility_residual = std::max(flow, member);
        if (report.grad_norm <= options.grad_tol && flow <= options.flow_tol &&
            member <= options.member_tol) {
            converged = true;
            break;
        }
        // fp-level stall: when fifty iterations move the dual value by less
        // than a few ulps while the primal gates already hold, further line
        // search only churns
        if (iter % 50 == 0) {
            if (iter > 0 && window_start_value - value <=
                                1e-13 * std::max(1.0, std::fabs(value)) &&
                flow <= options.flow_tol && member <= options.member_tol) {
                converged = true;
                break;
            }
            window_start_value = value;
        }
        bool accepted = false;
        while (step >= kMinStep) {
            apply_step(x, g, step, ws, trial);
            const double trial_value = evaluate(ws, trial);
            const double slope = inner(x, trial, g);
            if (trial_value <= value + kArmijoSlope * slope) {
                if (trial_value > value) report.objective_decrease_violations += 1;
                std::swap(x, trial);
                value = trial_value;
                accepted = true;
                break;
            }
            step *= 0.5;
            report.backtracks += 1;
        }
        if (!accepted) {
            // the (d, rho) block makes no progress at floating-point
            // resolution; the residual gates decide whether this point stands
            polish_beta(ws, x, 0.05 * options.flow_tol, 200);
            value = evaluate(ws, x);
            const double flow2 = flow_residual(ws);
            const double member2 = membership_residual(ws);
            report.feasibility_residual = std::max(flow2, member2);
            converged = flow2 <= options.flow_tol && member2 <= options.member_tol;
            break;
        }
        step = std::min(step * 1.3, kMaxStep);
    }
    report.dual_value = value;

    // recover theta from the softmax weights; blocks renormalized exactly
    OccupancyMeasure theta = ws.weights;
    for (int k = 0; k < theta.layer_count(); ++k) {
        double mass = theta.block_sum(k);
        for (auto& v : theta.block(k)) v /= mass;
    }
    report.objective_value = inner_product(psi.psi, theta) + alpha * unnormalized_kl(theta, theta_mixed);

    if (!converged) throw SolverFailure("kl_projection: iteration cap reached with residual above tolerance", report);

    if (warm) {
        warm->deviation = x.d;
        warm->row_bound = x.rho;
        warm->beta = x.beta;
    }
    if (dual_out) {
        DualPoint dp;
        dp.mu_plus = x.d;
        dp.mu_minus = x.d;
        const int A = x.d.action_count();
        for (int k = 0; k < x.d.layer_count(); ++k) {
            const int nn = x.d.next_layer_size(k);
            for (int i = 0; i < x.d.layer_size(k); ++i) {
                for (int a = 0; a < A; ++a) {
                    const int p = cs.pair_offset[k] + i * A + a;
                    const int off = x.d.row_offset(k, i, a);
                    for (int j = 0; j < nn; ++j) {
                        const double dev = x.d.block(k)[off + j];
                        dp.mu_plus.block(k)[off + j] = 0.5 * (x.rho[p] - dev);
                        dp.mu_minus.block(k)[off + j] = 0.5 * (x.rho[p] + dev);
                    }
                }
            }
        }
        dp.beta = x.beta;
        *dual_out = std::move(dp);
    }
    return {std::move(theta), report};
}

std::pair<OccupancyMeasure, SolverReport> solve_orlp(
    int t, const OccupancyMeasure& theta_prev, const std::vector<double>& q,
    const StageFunction& f_prev, const std::vector<StageFunction>& g_prev, double v_weight,
    double alpha, double lambda, const ConfidenceSet& cs, const MdpLayout& layout,
    const SolverOptions& options, DualWarmStart* warm) {
    if (t < 1) throw ParameterError("solve_orlp: episode index must be >= 1");
    if (t == 1) return {uniform_occupancy(layout), SolverReport{}};
    const OccupancyMeasure mixed = mix_with_uniform(theta_prev, lambda);
    const PenaltyVector psi = build_penalty(v_weight, f_prev, q, g_prev);
    const LayeredTensor pushed = exponential_step(mixed, psi, alpha);
    return kl_projection(pushed, mixed, psi, alpha, cs, options, warm);
}

}  // namespace ucpd
