#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace foxann::metrics {

struct ConfusionMatrix {
    std::size_t n_classes = 0;
    std::vector<std::int64_t> counts;  // row-major; counts[t][p] = true t, predicted p

    std::int64_t& at(std::size_t t, std::size_t p) { return counts[t * n_classes + p]; }
    std::int64_t at(std::size_t t, std::size_t p) const { return counts[t * n_classes + p]; }

    std::int64_t total() const;
};

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred,
                          std::size_t n_classes);

struct MetricsReport {
    double accuracy = 0.0;
    double precision = 0.0;  // macro-averaged
    double recall = 0.0;     // macro-averaged
    double f_score = 0.0;    // harmonic mean of the macro precision and recall
    double loss = 0.0;       // validation loss the model was evaluated with

    bool operator==(const MetricsReport&) const = default;
};

// Accuracy plus macro precision/recall/F-score. Per-class terms with a zero
// denominator contribute 0. Throws on an empty confusion matrix.
MetricsReport report(const ConfusionMatrix& cm, double val_loss);

}  // namespace foxann::metrics
