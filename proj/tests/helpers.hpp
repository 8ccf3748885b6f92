#pragma once

#include <cmath>

#include "ucpd/env.hpp"
#include "ucpd/learner.hpp"
#include "ucpd/occupancy.hpp"
#include "ucpd/rng.hpp"

namespace ucpd::testing {

inline Policy random_policy(const MdpLayout& layout, Rng& rng) {
    Policy pi(layout);
    for (int k = 0; k < layout.layer_count(); ++k) {
        for (int i = 0; i < layout.layer_size(k); ++i) {
            const auto row = rng.simplex(layout.action_count());
            for (int a = 0; a < layout.action_count(); ++a) pi.prob(k, i, a) = row[a];
        }
    }
    return pi;
}

inline TransitionModel random_kernel(const MdpLayout& layout, Rng& rng) {
    TransitionModel model(layout);
    for (int k = 0; k < layout.layer_count(); ++k)
        for (int i = 0; i < layout.layer_size(k); ++i)
            for (int a = 0; a < layout.action_count(); ++a) {
                const auto row = rng.simplex(layout.layer_size(k + 1));
                for (int j = 0; j < layout.layer_size(k + 1); ++j)
                    model.kernel.at(k, i, a, j) = row[j];
            }
    return model;
}

// valid occupancy measure = occupancy of a random policy under a random kernel
inline OccupancyMeasure random_occupancy(const MdpLayout& layout, Rng& rng) {
    return true_occupancy(random_policy(layout, rng), random_kernel(layout, rng), layout);
}

inline StageFunction random_stage_function(const MdpLayout& layout, Rng& rng, double sup = 1.0) {
    StageFunction f(layout);
    for (int k = 0; k < layout.layer_count(); ++k)
        for (auto& v : f.block(k)) v = sup * (2.0 * rng.uniform() - 1.0);
    return f;
}

// synthetic confidence set; zero rows (the N=0 case) keep vacuous radii
inline ConfidenceSet random_confidence_set(const MdpLayout& layout, Rng& rng, double eps_lo,
                                           double eps_hi, double zero_row_prob = 0.15) {
    Counters counters(layout);
    ConfidenceSet cs = initial_confidence_set(layout, 100, 0.1);
    for (int k = 0; k < layout.layer_count(); ++k) {
        const int nn = layout.layer_size(k + 1);
        for (int i = 0; i < layout.layer_size(k); ++i)
            for (int a = 0; a < layout.action_count(); ++a) {
                const int p = cs.pair_offset[k] + i * layout.action_count() + a;
                if (rng.uniform() < zero_row_prob) {
                    for (int j = 0; j < nn; ++j) cs.p_hat.at(k, i, a, j) = 0.0;
                    cs.epsilon[p] = 1.2 + 2.0 * rng.uniform();
                } else {
                    const auto row = rng.simplex(nn);
                    for (int j = 0; j < nn; ++j) cs.p_hat.at(k, i, a, j) = row[j];
                    cs.epsilon[p] = eps_lo + (eps_hi - eps_lo) * rng.uniform();
                }
            }
    }
    return cs;
}

// random point of the optimistic polytope: occupancy of a random policy under
// a kernel drawn inside the confidence balls
inline OccupancyMeasure random_member(const ConfidenceSet& cs, const MdpLayout& layout,
                                      Rng& rng) {
    TransitionModel inside(layout);
    for (int k = 0; k < layout.layer_count(); ++k) {
        const int nn = layout.layer_size(k + 1);
        for (int i = 0; i < layout.layer_size(k); ++i)
            for (int a = 0; a < layout.action_count(); ++a) {
                const int p = cs.pair_offset[k] + i * layout.action_count() + a;
                double row_sum = 0.0;
                for (int j = 0; j < nn; ++j) row_sum += cs.p_hat.at(k, i, a, j);
                const auto noise = rng.simplex(nn);
                if (row_sum < 0.5) {
                    // empty row: radius is vacuous, any distribution qualifies
                    for (int j = 0; j < nn; ++j) inside.kernel.at(k, i, a, j) = noise[j];
                } else {
                    const double gamma = 0.5 * std::min(cs.epsilon[p], 2.0) * rng.uniform();
                    for (int j = 0; j < nn; ++j)
                        inside.kernel.at(k, i, a, j) =
                            (1.0 - gamma) * cs.p_hat.at(k, i, a, j) + gamma * noise[j];
                }
            }
    }
    return true_occupancy(random_policy(layout, rng), inside, layout);
}

/// Independent baseline: KL projection onto conditions (a),(b) alone by
/// cyclic iterative proportional scaling. Each constraint family has a
/// closed-form I-projection (normalize a layer; balance one state's inflow
/// and outflow by a multiplicative split), and cycling converges to the
/// projection onto the intersection.
inline OccupancyMeasure ipf_projection(const LayeredTensor& start, const MdpLayout& layout,
                                       int max_sweeps = 200000, double tol = 1e-13) {
    OccupancyMeasure theta = start;
    const int L = layout.layer_count();
    const int A = layout.action_count();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double worst = 0.0;
        for (int k = 0; k < L; ++k) {
            const double mass = theta.block_sum(k);
            worst = std::max(worst, std::fabs(mass - 1.0));
            for (auto& v : theta.block(k)) v /= mass;
        }
        for (int k = 1; k < L; ++k) {
            for (int j = 0; j < layout.layer_size(k); ++j) {
                double in = 0.0, out = 0.0;
                for (int i = 0; i < layout.layer_size(k - 1); ++i)
                    for (int a = 0; a < A; ++a) in += theta.at(k - 1, i, a, j);
                for (int a = 0; a < A; ++a)
                    for (int n = 0; n < layout.layer_size(k + 1); ++n)
                        out += theta.at(k, j, a, n);
                worst = std::max(worst, std::fabs(in - out));
                if (in <= 0.0 || out <= 0.0) continue;
                const double split = std::sqrt(out / in);
                for (int i = 0; i < layout.layer_size(k - 1); ++i)
                    for (int a = 0; a < A; ++a) theta.at(k - 1, i, a, j) *= split;
                for (int a = 0; a < A; ++a)
                    for (int n = 0; n < layout.layer_size(k + 1); ++n)
                        theta.at(k, j, a, n) /= split;
            }
        }
        if (worst < tol) break;
    }
    return theta;
}

inline double l1_distance(const LayeredTensor& a, const LayeredTensor& b) {
    double total = 0.0;
    for (int k = 0; k < a.layer_count(); ++k) {
        auto x = a.block(k);
        auto y = b.block(k);
        for (std::size_t e = 0; e < x.size(); ++e) total += std::fabs(x[e] - y[e]);
    }
    return total;
}

}  // namespace ucpd::testing
