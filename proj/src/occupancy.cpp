#include "ucpd/occupancy.hpp"

#include <cmath>

namespace ucpd {

std::string ConstraintViolation::describe() const {
    char buf[128];
    switch (kind) {
        case Kind::layer_mass:
            std::snprintf(buf, sizeof(buf), "layer %d mass residual %.3e", layer, residual);
            break;
        case Kind::negativity:
            std::snprintf(buf, sizeof(buf), "negative entry in layer %d (%.3e)", layer, residual);
            break;
        case Kind::flow:
            std::snprintf(buf, sizeof(buf), "flow residual %.3e at state %d of layer %d",
                          residual, state, layer);
            break;
    }
    return buf;
}

double ValidationReport::worst() const {
    double w = 0.0;
    for (const auto& v : violations) w = std::max(w, v.residual);
    return w;
}

ValidationReport validate_occupancy(const OccupancyMeasure& theta, const MdpLayout& layout) {
    if (!theta.matches(layout)) throw StructuralError("validate_occupancy: shape mismatch");
    ValidationReport report;
    const int L = layout.layer_count();
    const int A = layout.action_count();

    for (int k = 0; k < L; ++k) {
        double mass = 0.0;
        double most_negative = 0.0;
        for (double v : theta.block(k)) {
            mass += v;
            most_negative = std::min(most_negative, v);
        }
        if (std::fabs(mass - 1.0) > kPolytopeTol)
            report.violations.push_back(
                {ConstraintViolation::Kind::layer_mass, k, -1, std::fabs(mass - 1.0)});
        if (most_negative < -kPolytopeTol)
            report.violations.push_back(
                {ConstraintViolation::Kind::negativity, k, -1, -most_negative});
    }

    // condition (b) at interior states: inflow from layer k-1 equals outflow into layer k+1
    for (int k = 1; k < L; ++k) {
        for (int j = 0; j < layout.layer_size(k); ++j) {
            double inflow = 0.0;
            for (int i = 0; i < layout.layer_size(k - 1); ++i)
                for (int a = 0; a < A; ++a) inflow += theta.at(k - 1, i, a, j);
            double outflow = 0.0;
            for (int a = 0; a < A; ++a)
                for (int n = 0; n < layout.layer_size(k + 1); ++n) outflow += theta.at(k, j, a, n);
            double res = std::fabs(inflow - outflow);
            if (res > kPolytopeTol)
                report.violations.push_back({ConstraintViolation::Kind::flow, k, j, res});
        }
    }

    report.ok = report.violations.empty();
    return report;
}

Policy recover_policy(const OccupancyMeasure& theta) {
    const int L = theta.layer_count();
    const int A = theta.action_count();
    Policy policy;
    policy.action_count = A;
    policy.pi.resize(L);
    for (int k = 0; k < L; ++k) {
        const int nk = theta.layer_size(k);
        const int nn = theta.next_layer_size(k);
        policy.pi[k].assign(static_cast<std::size_t>(nk) * A, 0.0);
        for (int i = 0; i < nk; ++i) {
            double state_mass = 0.0;
            for (int a = 0; a < A; ++a)
                for (int j = 0; j < nn; ++j) state_mass += theta.at(k, i, a, j);
            if (state_mass <= 0.0) {
                for (int a = 0; a < A; ++a) policy.prob(k, i, a) = 1.0 / A;
                continue;
            }
            for (int a = 0; a < A; ++a) {
                double action_mass = 0.0;
                for (int j = 0; j < nn; ++j) action_mass += theta.at(k, i, a, j);
                policy.prob(k, i, a) = action_mass / state_mass;
            }
        }
    }
    return policy;
}

OccupancyMeasure mix_with_uniform(const OccupancyMeasure& theta, double lambda) {
    if (lambda < 0.0 || lambda > 1.0)
        throw ParameterError("mix_with_uniform: lambda must lie in [0,1]");
    OccupancyMeasure mixed = theta;
    for (int k = 0; k < theta.layer_count(); ++k) {
        const double u = lambda / (static_cast<double>(theta.layer_size(k)) *
                                   theta.next_layer_size(k) * theta.action_count());
        for (double& v : mixed.block(k)) v = (1.0 - lambda) * v + u;
    }
    return mixed;
}

double unnormalized_kl(const LayeredTensor& theta, const LayeredTensor& theta_ref) {
    if (!theta.same_shape(theta_ref)) throw StructuralError("unnormalized_kl: shape mismatch");
    double total = 0.0;
    for (int k = 0; k < theta.layer_count(); ++k) {
        auto a = theta.block(k);
        auto b = theta_ref.block(k);
        for (std::size_t e = 0; e < a.size(); ++e) {
            if (a[e] == 0.0) {
                total += b[e];
                continue;
            }
            if (b[e] <= 0.0)
                throw DivergenceUndefined("unnormalized_kl: theta > 0 on a null reference entry");
            total += a[e] * std::log(a[e] / b[e]) - a[e] + b[e];
        }
    }
    return total;
}

double inner_product(const StageFunction& func, const LayeredTensor& theta) {
    if (!func.same_shape(theta)) throw StructuralError("inner_product: shape mismatch");
    double total = 0.0;
    for (int k = 0; k < func.layer_count(); ++k) {
        auto f = func.block(k);
        auto t = theta.block(k);
        for (std::size_t e = 0; e < f.size(); ++e) total += f[e] * t[e];
    }
    return total;
}

std::vector<double> pair_marginals(const OccupancyMeasure& theta) {
    std::vector<double> m;
    for (int k = 0; k < theta.layer_count(); ++k) {
        const int nn = theta.next_layer_size(k);
        for (int i = 0; i < theta.layer_size(k); ++i) {
            for (int a = 0; a < theta.action_count(); ++a) {
                double row = 0.0;
                for (int j = 0; j < nn; ++j) row += theta.at(k, i, a, j);
                m.push_back(row);
            }
        }
    }
    return m;
}

}  // namespace ucpd
