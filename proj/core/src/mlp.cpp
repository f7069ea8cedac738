#include "foxann/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace foxann::mlp {

namespace {

std::size_t layer_offset(const Topology& topology, std::size_t layer) {
    std::size_t offset = 0;
    for (std::size_t l = 0; l < layer; ++l)
        offset += (topology.layer_sizes[l] + 1) * topology.layer_sizes[l + 1];
    return offset;
}

}  // namespace

void Topology::validate() const {
    if (layer_sizes.size() < 2)
        throw std::invalid_argument("topology: need at least input and output layers");
    for (std::size_t s : layer_sizes)
        if (s == 0) throw std::invalid_argument("topology: layer sizes must be >= 1");
}

Topology build_topology(std::size_t n_features, std::size_t n_classes) {
    if (n_features < 1) throw std::invalid_argument("build_topology: n_features must be >= 1");
    if (n_classes < 2)
        throw std::invalid_argument("build_topology: n_classes must be >= 2 for classification");
    const std::size_t h1 = 2 * n_features;
    const std::size_t h2 = std::max<std::size_t>(1, n_features / 2);
    return Topology{{n_features, h1, h2, n_classes}};
}

std::size_t weight_count(const Topology& topology) {
    topology.validate();
    return layer_offset(topology, topology.layer_count());
}

double sigmoid(double x) {
    // Split on the sign so exp() never overflows.
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

std::span<const double> Network::layer_weights(std::size_t layer) const {
    const std::size_t offset = layer_offset(topology, layer);
    const std::size_t n = topology.layer_sizes[layer] * topology.layer_sizes[layer + 1];
    return {values.data() + offset, n};
}

std::span<const double> Network::layer_biases(std::size_t layer) const {
    const std::size_t offset = layer_offset(topology, layer) +
                               topology.layer_sizes[layer] * topology.layer_sizes[layer + 1];
    return {values.data() + offset, topology.layer_sizes[layer + 1]};
}

Network unflatten(std::span<const double> values, const Topology& topology) {
    const std::size_t expected = weight_count(topology);
    if (values.size() != expected) {
        std::ostringstream msg;
        msg << "unflatten: weight vector has " << values.size() << " values, expected "
            << expected;
        throw std::invalid_argument(msg.str());
    }
    return Network{topology, std::vector<double>(values.begin(), values.end())};
}

std::vector<double> flatten(const Network& network) { return network.values; }

std::span<const double> forward_into(const Network& network,
                                     std::span<const double> input,
                                     ForwardScratch& scratch) {
    const auto& sizes = network.topology.layer_sizes;
    if (input.size() != sizes.front()) {
        std::ostringstream msg;
        msg << "forward: input has " << input.size() << " values, expected "
            << sizes.front();
        throw std::invalid_argument(msg.str());
    }

    const double* params = network.values.data();
    std::vector<double>& current = scratch.a;
    std::vector<double>& next = scratch.b;
    current.assign(input.begin(), input.end());

    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const std::size_t n_in = sizes[l];
        const std::size_t n_out = sizes[l + 1];
        const double* biases = params + offset + n_in * n_out;

        next.assign(biases, biases + n_out);
        for (std::size_t i = 0; i < n_in; ++i) {
            const double x = current[i];
            const double* w = params + offset + i * n_out;
            for (std::size_t j = 0; j < n_out; ++j) next[j] += x * w[j];
        }
        for (std::size_t j = 0; j < n_out; ++j) next[j] = sigmoid(next[j]);

        offset += (n_in + 1) * n_out;
        std::swap(current, next);
    }
    return {current.data(), sizes.back()};
}

std::vector<double> forward(const Network& network, std::span<const double> input) {
    ForwardScratch scratch;
    const auto out = forward_into(network, input, scratch);
    return {out.begin(), out.end()};
}

std::size_t predict(const Network& network, std::span<const double> input) {
    ForwardScratch scratch;
    const auto out = forward_into(network, input, scratch);
    std::size_t best = 0;
    for (std::size_t j = 1; j < out.size(); ++j)
        if (out[j] > out[best]) best = j;
    return best;
}

}  // namespace foxann::mlp
