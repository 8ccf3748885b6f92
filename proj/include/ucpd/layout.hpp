#pragma once

#include <span>
#include <vector>

#include "ucpd/errors.hpp"

namespace ucpd {

/// Loop-free layered state space: layers S_0 .. S_L with singleton initial
/// and terminal layers, transitions only between consecutive layers.
/// States carry contiguous global ids, layer by layer.
class MdpLayout {
public:
    // layer_sizes = (|S_0|, ..., |S_L|); must start and end with 1
    MdpLayout(std::vector<int> layer_sizes, int action_count);

    int layer_count() const { return static_cast<int>(sizes_.size()) - 1; }  // L
    int action_count() const { return actions_; }
    int layer_size(int k) const { return sizes_[k]; }
    int total_states() const { return total_states_; }

    // global state id of the i-th state of layer k
    int state_id(int k, int i) const { return offsets_[k] + i; }
    int layer_of(int state) const { return layer_of_[state]; }
    int index_in_layer(int state) const { return state - offsets_[layer_of_[state]]; }
    int initial_state() const { return 0; }
    int terminal_state() const { return total_states_ - 1; }

    // number of (s,a,s') entries in the block between layers k and k+1
    int block_size(int k) const { return sizes_[k] * actions_ * sizes_[k + 1]; }
    int total_entries() const;
    // number of (s,a) pairs with outgoing transitions
    int pair_count() const;

    bool operator==(const MdpLayout& other) const {
        return sizes_ == other.sizes_ && actions_ == other.actions_;
    }

    const std::vector<int>& layer_sizes() const { return sizes_; }

private:
    std::vector<int> sizes_;
    std::vector<int> offsets_;    // global id of first state per layer
    std::vector<int> layer_of_;   // state id -> layer
    int actions_ = 0;
    int total_states_ = 0;
};

/// Dense per-layer blocks of values indexed (k, s in S_k, a, s' in S_{k+1}).
/// Shared by occupancy measures, loss/budget functions and empirical kernels.
class LayeredTensor {
public:
    LayeredTensor() = default;
    explicit LayeredTensor(const MdpLayout& layout, double fill = 0.0);

    double at(int k, int i, int a, int j) const { return blocks_[k][index(k, i, a, j)]; }
    double& at(int k, int i, int a, int j) { return blocks_[k][index(k, i, a, j)]; }

    std::span<const double> block(int k) const { return blocks_[k]; }
    std::span<double> block(int k) { return blocks_[k]; }

    // flat offset of (i,a,j) inside block k
    int index(int k, int i, int a, int j) const {
        return (i * actions_ + a) * next_size_[k] + j;
    }
    int row_offset(int k, int i, int a) const { return (i * actions_ + a) * next_size_[k]; }

    int layer_count() const { return static_cast<int>(blocks_.size()); }
    int action_count() const { return actions_; }
    int layer_size(int k) const { return layer_size_[k]; }
    int next_layer_size(int k) const { return next_size_[k]; }
    int block_size(int k) const { return static_cast<int>(blocks_[k].size()); }

    bool same_shape(const LayeredTensor& other) const {
        return layer_size_ == other.layer_size_ && next_size_ == other.next_size_ &&
               actions_ == other.actions_;
    }
    bool matches(const MdpLayout& layout) const;

    double sum() const;
    double block_sum(int k) const;
    double max_abs() const;

    // elementwise a*this + b*other, shapes must match
    LayeredTensor& axpy(double a, double b, const LayeredTensor& other);

private:
    std::vector<std::vector<double>> blocks_;
    std::vector<int> layer_size_;
    std::vector<int> next_size_;
    int actions_ = 0;
};

// the shared per-layer shape makes these interchangeable at the storage level;
// which invariants apply is a property of the producing operation
using OccupancyMeasure = LayeredTensor;
using StageFunction = LayeredTensor;

/// Transition kernel: rows P(.|s,a), one block per layer, each row a
/// probability vector over the next layer.
struct TransitionModel {
    LayeredTensor kernel;

    TransitionModel() = default;
    explicit TransitionModel(const MdpLayout& layout) : kernel(layout) {}

    double prob(int k, int i, int a, int j) const { return kernel.at(k, i, a, j); }
    // throws StructuralError unless every row is a probability vector (1e-12)
    void validate(const MdpLayout& layout) const;
};

/// Per-state action distribution for non-terminal states; rows sum to 1.
struct Policy {
    // pi[k] is row-major (|S_k| x |A|), k = 0..L-1
    std::vector<std::vector<double>> pi;
    int action_count = 0;

    Policy() = default;
    Policy(const MdpLayout& layout, double fill = 0.0);

    double prob(int k, int i, int a) const { return pi[k][i * action_count + a]; }
    double& prob(int k, int i, int a) { return pi[k][i * action_count + a]; }
    void validate() const;
};

// theta(s,a,s') = 1 / (|S_k| |S_{k+1}| |A|): the algorithm's initial point,
// satisfies the per-layer mass and flow conditions exactly
OccupancyMeasure uniform_occupancy(const MdpLayout& layout);

}  // namespace ucpd
