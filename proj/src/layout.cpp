#include "ucpd/layout.hpp"

#include <cmath>
#include <numeric>

namespace ucpd {

MdpLayout::MdpLayout(std::vector<int> layer_sizes, int action_count)
    : sizes_(std::move(layer_sizes)), actions_(action_count) {
    if (sizes_.size() < 2) throw StructuralError("layout: need at least layers S_0 and S_L");
    if (sizes_.front() != 1 || sizes_.back() != 1)
        throw StructuralError("layout: initial and terminal layers must be singletons");
    if (actions_ < 1) throw StructuralError("layout: action count must be >= 1");
    for (int n : sizes_)
        if (n < 1) throw StructuralError("layout: every layer needs at least one state");

    offsets_.resize(sizes_.size());
    int id = 0;
    for (std::size_t k = 0; k < sizes_.size(); ++k) {
        offsets_[k] = id;
        id += sizes_[k];
    }
    total_states_ = id;
    layer_of_.resize(total_states_);
    for (std::size_t k = 0; k < sizes_.size(); ++k)
        for (int i = 0; i < sizes_[k]; ++i) layer_of_[offsets_[k] + i] = static_cast<int>(k);
}

int MdpLayout::total_entries() const {
    int n = 0;
    for (int k = 0; k < layer_count(); ++k) n += block_size(k);
    return n;
}

int MdpLayout::pair_count() const {
    int n = 0;
    for (int k = 0; k < layer_count(); ++k) n += sizes_[k] * actions_;
    return n;
}

LayeredTensor::LayeredTensor(const MdpLayout& layout, double fill) {
    const int L = layout.layer_count();
    actions_ = layout.action_count();
    blocks_.resize(L);
    layer_size_.resize(L);
    next_size_.resize(L);
    for (int k = 0; k < L; ++k) {
        layer_size_[k] = layout.layer_size(k);
        next_size_[k] = layout.layer_size(k + 1);
        blocks_[k].assign(static_cast<std::size_t>(layout.block_size(k)), fill);
    }
}

bool LayeredTensor::matches(const MdpLayout& layout) const {
    if (layer_count() != layout.layer_count() || actions_ != layout.action_count()) return false;
    for (int k = 0; k < layer_count(); ++k)
        if (layer_size_[k] != layout.layer_size(k) || next_size_[k] != layout.layer_size(k + 1))
            return false;
    return true;
}

double LayeredTensor::sum() const {
    double total = 0.0;
    for (const auto& b : blocks_) total += std::accumulate(b.begin(), b.end(), 0.0);
    return total;
}

double LayeredTensor::block_sum(int k) const {
    return std::accumulate(blocks_[k].begin(), blocks_[k].end(), 0.0);
}

double LayeredTensor::max_abs() const {
    double m = 0.0;
    for (const auto& b : blocks_)
        for (double v : b) m = std::max(m, std::fabs(v));
    return m;
}

LayeredTensor& LayeredTensor::axpy(double a, double b, const LayeredTensor& other) {
    if (!same_shape(other)) throw StructuralError("axpy: shape mismatch");
    for (int k = 0; k < layer_count(); ++k) {
        auto& mine = blocks_[k];
        const auto& theirs = other.blocks_[k];
        for (std::size_t e = 0; e < mine.size(); ++e) mine[e] = a * mine[e] + b * theirs[e];
    }
    return *this;
}

void TransitionModel::validate(const MdpLayout& layout) const {
    if (!kernel.matches(layout)) throw StructuralError("transition model: shape mismatch");
    for (int k = 0; k < kernel.layer_count(); ++k) {
        const int nn = kernel.next_layer_size(k);
        for (int i = 0; i < kernel.layer_size(k); ++i) {
            for (int a = 0; a < kernel.action_count(); ++a) {
                double row = 0.0;
                for (int j = 0; j < nn; ++j) {
                    double p = kernel.at(k, i, a, j);
                    if (p < 0.0) throw StructuralError("transition model: negative probability");
                    row += p;
                }
                if (std::fabs(row - 1.0) > 1e-12)
                    throw StructuralError("transition model: row does not sum to 1");
            }
        }
    }
}

Policy::Policy(const MdpLayout& layout, double fill) : action_count(layout.action_count()) {
    pi.resize(layout.layer_count());
    for (int k = 0; k < layout.layer_count(); ++k)
        pi[k].assign(static_cast<std::size_t>(layout.layer_size(k)) * action_count, fill);
}

void Policy::validate() const {
    for (const auto& layer : pi) {
        const int rows = static_cast<int>(layer.size()) / action_count;
        for (int i = 0; i < rows; ++i) {
            double row = 0.0;
            for (int a = 0; a < action_count; ++a) {
                double p = layer[i * action_count + a];
                if (p < 0.0) throw StructuralError("policy: negative probability");
                row += p;
            }
            if (std::fabs(row - 1.0) > 1e-12)
                throw StructuralError("policy: row does not sum to 1");
        }
    }
}

OccupancyMeasure uniform_occupancy(const MdpLayout& layout) {
    OccupancyMeasure theta(layout);
    for (int k = 0; k < layout.layer_count(); ++k) {
        const double v = 1.0 / (static_cast<double>(layout.layer_size(k)) *
                                layout.layer_size(k + 1) * layout.action_count());
        auto b = theta.block(k);
        for (double& e : b) e = v;
    }
    return theta;
}

}  // namespace ucpd
