#include "foxann/metrics.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace foxann::metrics {

std::int64_t ConfusionMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred,
                          std::size_t n_classes) {
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("confusion: y_true and y_pred lengths differ");
    ConfusionMatrix cm;
    cm.n_classes = n_classes;
    cm.counts.assign(n_classes * n_classes, 0);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int t = y_true[i];
        const int p = y_pred[i];
        if (t < 0 || static_cast<std::size_t>(t) >= n_classes || p < 0 ||
            static_cast<std::size_t>(p) >= n_classes) {
            std::ostringstream msg;
            msg << "confusion: class index out of range at sample " << i << " (true " << t
                << ", predicted " << p << ", n_classes " << n_classes << ")";
            throw std::invalid_argument(msg.str());
        }
        ++cm.at(static_cast<std::size_t>(t), static_cast<std::size_t>(p));
    }
    return cm;
}

MetricsReport report(const ConfusionMatrix& cm, double val_loss) {
    const std::int64_t total = cm.total();
    if (total <= 0) throw std::invalid_argument("report: empty confusion matrix");

    std::int64_t diagonal = 0;
    double precision_sum = 0.0;
    double recall_sum = 0.0;
    for (std::size_t c = 0; c < cm.n_classes; ++c) {
        const std::int64_t tp = cm.at(c, c);
        diagonal += tp;
        std::int64_t predicted = 0;  // tp + fp
        std::int64_t actual = 0;     // tp + fn
        for (std::size_t o = 0; o < cm.n_classes; ++o) {
            predicted += cm.at(o, c);
            actual += cm.at(c, o);
        }
        // Zero-denominator convention: an absent or never-predicted class
        // contributes 0 to the macro mean.
        precision_sum += predicted > 0 ? static_cast<double>(tp) / predicted : 0.0;
        recall_sum += actual > 0 ? static_cast<double>(tp) / actual : 0.0;
    }

    MetricsReport r;
    r.accuracy = static_cast<double>(diagonal) / static_cast<double>(total);
    r.precision = precision_sum / static_cast<double>(cm.n_classes);
    r.recall = recall_sum / static_cast<double>(cm.n_classes);
    r.f_score = (r.precision + r.recall) > 0.0
                    ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                    : 0.0;
    r.loss = val_loss;
    return r;
}

}  // namespace foxann::metrics
