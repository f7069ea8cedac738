#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace foxann::mlp {

struct Topology {
    std::vector<std::size_t> layer_sizes;

    std::size_t inputs() const { return layer_sizes.front(); }
    std::size_t outputs() const { return layer_sizes.back(); }
    std::size_t layer_count() const { return layer_sizes.size() - 1; }

    // throws std::invalid_argument unless there are >= 2 layers, all nonzero
    void validate() const;

    bool operator==(const Topology&) const = default;
};

// Sizing rule for classification nets: two hidden layers, the first twice the
// input width, the second half of it (floored, at least 1).
Topology build_topology(std::size_t n_features, std::size_t n_classes);

// Total number of parameters: sum over layers of (n_in + 1) * n_out.
std::size_t weight_count(const Topology& topology);

// Logistic function; saturates cleanly instead of overflowing for large |x|.
double sigmoid(double x);

// Fully connected feedforward network with sigmoid activations on every
// layer, parameterized by one flat vector.
//
// Flat layout (normative): layers in order; within layer l (n_in -> n_out)
// the n_in*n_out weights come first in row-major input order (w[i][j] at
// i*n_out + j), followed by the n_out biases. This layout is what the FOX
// optimizer searches, so it must stay stable.
struct Network {
    Topology topology;
    std::vector<double> values;

    std::span<const double> layer_weights(std::size_t layer) const;
    std::span<const double> layer_biases(std::size_t layer) const;

    bool operator==(const Network&) const = default;
};

// throws std::invalid_argument when values.size() != weight_count(topology)
Network unflatten(std::span<const double> values, const Topology& topology);
std::vector<double> flatten(const Network& network);

// Reusable activation buffers for the hot evaluation path.
struct ForwardScratch {
    std::vector<double> a;
    std::vector<double> b;
};

// Runs the network; the returned span aliases `scratch` and stays valid until
// the next call with the same scratch.
std::span<const double> forward_into(const Network& network,
                                     std::span<const double> input,
                                     ForwardScratch& scratch);

std::vector<double> forward(const Network& network, std::span<const double> input);

// argmax over the output activations; ties break to the lowest index.
std::size_t predict(const Network& network, std::span<const double> input);

}  // namespace foxann::mlp
