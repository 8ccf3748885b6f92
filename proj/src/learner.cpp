#include "ucpd/learner.hpp"

#include <cmath>

namespace ucpd {

namespace {

std::vector<int> make_pair_offsets(const MdpLayout& layout) {
    std::vector<int> offsets(layout.layer_count());
    int idx = 0;
    for (int k = 0; k < layout.layer_count(); ++k) {
        offsets[k] = idx;
        idx += layout.layer_size(k) * layout.action_count();
    }
    return offsets;
}

}  // namespace

Counters::Counters(const MdpLayout& layout)
    : triple_global(layout), triple_local(layout), actions_(layout.action_count()) {
    pair_offset = make_pair_offsets(layout);
    pair_global.assign(layout.pair_count(), 0);
    pair_local.assign(layout.pair_count(), 0);
}

double ConfidenceSet::max_epsilon() const {
    double m = 0.0;
    for (double e : epsilon) m = std::max(m, e);
    return m;
}

void record_transition(Counters& counters, const MdpLayout& layout, int s, int a, int s_next) {
    if (s < 0 || s >= layout.total_states() || s_next < 0 || s_next >= layout.total_states())
        throw StructuralError("record_transition: state id out of range");
    if (a < 0 || a >= layout.action_count())
        throw StructuralError("record_transition: action out of range");
    const int k = layout.layer_of(s);
    if (k == layout.layer_count() || layout.layer_of(s_next) != k + 1)
        throw StructuralError("record_transition: tuple crosses non-consecutive layers");
    const int i = layout.index_in_layer(s);
    const int j = layout.index_in_layer(s_next);
    counters.pair_local[counters.pair_index(k, i, a)] += 1;
    counters.triple_local.at(k, i, a, j) += 1.0;
}

bool epoch_trigger(const Counters& counters) {
    for (std::size_t p = 0; p < counters.pair_local.size(); ++p) {
        if (counters.pair_local[p] >= 1 && counters.pair_local[p] >= counters.pair_global[p])
            return true;
    }
    return false;
}

double confidence_radius(std::int64_t pair_visits, int next_layer_size, int horizon,
                         int total_states, int total_actions, double zeta) {
    if (zeta <= 0.0 || zeta >= 1.0) throw ParameterError("confidence_radius: zeta not in (0,1)");
    if (horizon < 1) throw ParameterError("confidence_radius: horizon must be >= 1");
    const double log_term =
        std::log((static_cast<double>(horizon) + 1.0) * total_states * total_actions / zeta);
    const double denom = static_cast<double>(std::max<std::int64_t>(1, pair_visits));
    return std::sqrt(2.0 * next_layer_size * log_term / denom);
}

namespace {

ConfidenceSet build_confidence_set(const Counters& counters, const MdpLayout& layout,
                                   int horizon, double zeta) {
    ConfidenceSet cs;
    cs.p_hat = LayeredTensor(layout);
    cs.pair_offset = counters.pair_offset;
    cs.epoch_index = counters.epoch_index;
    cs.horizon = horizon;
    cs.zeta = zeta;
    cs.epsilon.assign(counters.pair_global.size(), 0.0);

    const int S = layout.total_states();
    const int A = layout.action_count();
    for (int k = 0; k < layout.layer_count(); ++k) {
        const int nn = layout.layer_size(k + 1);
        for (int i = 0; i < layout.layer_size(k); ++i) {
            for (int a = 0; a < A; ++a) {
                const int p = counters.pair_index(k, i, a);
                const std::int64_t visits = counters.pair_global[p];
                const double denom = static_cast<double>(std::max<std::int64_t>(1, visits));
                for (int j = 0; j < nn; ++j)
                    cs.p_hat.at(k, i, a, j) = counters.triple_global.at(k, i, a, j) / denom;
                cs.epsilon[p] = confidence_radius(visits, nn, horizon, S, A, zeta);
            }
        }
    }
    return cs;
}

}  // namespace

ConfidenceSet advance_epoch(Counters& counters, const MdpLayout& layout, int horizon,
                            double zeta) {
    for (std::size_t p = 0; p < counters.pair_global.size(); ++p) {
        counters.pair_global[p] += counters.pair_local[p];
        counters.pair_local[p] = 0;
    }
    for (int k = 0; k < counters.triple_global.layer_count(); ++k) {
        auto global = counters.triple_global.block(k);
        auto local = counters.triple_local.block(k);
        for (std::size_t e = 0; e < global.size(); ++e) {
            global[e] += local[e];
            local[e] = 0.0;
        }
    }
    counters.epoch_index += 1;
    return build_confidence_set(counters, layout, horizon, zeta);
}

ConfidenceSet initial_confidence_set(const MdpLayout& layout, int horizon, double zeta) {
    Counters empty(layout);
    return build_confidence_set(empty, layout, horizon, zeta);
}

ConfidenceSet known_model_confidence_set(const TransitionModel& model, const MdpLayout& layout,
                                         int horizon, double zeta, double epsilon) {
    if (epsilon <= 0.0) throw ParameterError("known_model_confidence_set: epsilon must be > 0");
    ConfidenceSet cs;
    cs.p_hat = model.kernel;
    cs.pair_offset = make_pair_offsets(layout);
    cs.epoch_index = 1;
    cs.horizon = horizon;
    cs.zeta = zeta;
    cs.epsilon.assign(layout.pair_count(), epsilon);
    return cs;
}

MembershipResult membership_check(const OccupancyMeasure& theta, const ConfidenceSet& cs,
                                  double tol) {
    if (!theta.same_shape(cs.p_hat)) throw StructuralError("membership_check: shape mismatch");
    MembershipResult result;
    for (int k = 0; k < theta.layer_count(); ++k) {
        const int nn = theta.next_layer_size(k);
        for (int i = 0; i < theta.layer_size(k); ++i) {
            for (int a = 0; a < theta.action_count(); ++a) {
                double m = 0.0;
                for (int j = 0; j < nn; ++j) m += theta.at(k, i, a, j);
                double deviation = 0.0;
                for (int j = 0; j < nn; ++j)
                    deviation += std::fabs(theta.at(k, i, a, j) - cs.p_hat.at(k, i, a, j) * m);
                const double residual = deviation - cs.eps(k, i, a) * m;
                result.worst_residual = std::max(result.worst_residual, residual);
            }
        }
    }
    result.ok = result.worst_residual <= tol;
    return result;
}

double epoch_count_bound(int total_states, int total_actions, int horizon) {
    const double sa = static_cast<double>(total_states) * total_actions;
    return sa * std::log2(8.0 * horizon / sa);
}

}  // namespace ucpd
