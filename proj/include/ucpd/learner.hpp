#pragma once

#include <cstdint>
#include <vector>

#include "ucpd/layout.hpp"
#include "ucpd/occupancy.hpp"

namespace ucpd {

/// Visit counters: N/M are global (everything before the current epoch),
/// n/m are local to the current epoch. Pair counts are flattened per layer
/// in (state, action) order, matching pair_marginals.
struct Counters {
    std::vector<std::int64_t> pair_global;   // N(s,a)
    std::vector<std::int64_t> pair_local;    // n(s,a)
    LayeredTensor triple_global;             // M(s,a,s')
    LayeredTensor triple_local;              // m(s,a,s')
    int epoch_index = 1;                     // ell
    std::vector<int> pair_offset;            // layer -> first pair index

    explicit Counters(const MdpLayout& layout);
    int pair_index(int k, int i, int a) const {
        return pair_offset[k] + i * actions_ + a;
    }
    int action_count() const { return actions_; }

private:
    int actions_ = 0;
};

/// Empirical kernel and per-pair L1 confidence radii for one epoch.
struct ConfidenceSet {
    LayeredTensor p_hat;            // rows sum to 1, or are identically zero when N(s,a)=0
    std::vector<double> epsilon;    // per (s,a), flattened like Counters
    std::vector<int> pair_offset;
    int epoch_index = 1;
    int horizon = 0;                // T
    double zeta = 0.0;

    double eps(int k, int i, int a) const {
        return epsilon[pair_offset[k] + i * p_hat.action_count() + a];
    }
    double max_epsilon() const;
};

struct MembershipResult {
    bool ok = true;
    double worst_residual = 0.0;    // max over pairs of sum_{s'}|theta - p_hat*m| - eps*m
};

/// n(s,a) += 1, m(s,a,s') += 1 for the observed tuple; globals untouched.
/// Throws StructuralError if the tuple crosses non-consecutive layers.
void record_transition(Counters& counters, const MdpLayout& layout, int s, int a, int s_next);

/// True iff some pair visited in the current epoch has n(s,a) >= N(s,a).
bool epoch_trigger(const Counters& counters);

/// Folds local counts into globals, bumps the epoch index, zeroes locals and
/// rebuilds the empirical kernel p_hat = M / max{1,N} with fresh radii.
ConfidenceSet advance_epoch(Counters& counters, const MdpLayout& layout, int horizon,
                            double zeta);

/// sqrt( 2 |S_{k+1}| ln((T+1)|S||A|/zeta) / max{1, N} )
double confidence_radius(std::int64_t pair_visits, int next_layer_size, int horizon,
                         int total_states, int total_actions, double zeta);

// confidence set with no data: zero kernel, radii from N = 0 (epoch 1)
ConfidenceSet initial_confidence_set(const MdpLayout& layout, int horizon, double zeta);

// known-model switch: p_hat := P and every radius := epsilon, collapsing the
// optimistic polytope onto the true one when epsilon is tiny
ConfidenceSet known_model_confidence_set(const TransitionModel& model, const MdpLayout& layout,
                                         int horizon, double zeta, double epsilon);

/// Denominator-cleared membership test for the optimistic polytope:
/// sum_{s'} |theta(s,a,s') - p_hat(s'|s,a) m(s,a)| <= eps(s,a) m(s,a) per pair,
/// with m(s,a) = sum_{s'} theta(s,a,s'). Pairs with m = 0 pass vacuously.
MembershipResult membership_check(const OccupancyMeasure& theta, const ConfidenceSet& cs,
                                  double tol = 1e-12);

// Lemma-style cap on the number of epochs; valid once T >= |S||A|
double epoch_count_bound(int total_states, int total_actions, int horizon);

}  // namespace ucpd
