#include "foxann/trainers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "foxann/rng.hpp"
#include "format.hpp"

namespace foxann::trainers {

namespace {

constexpr std::uint64_t kBackpropStream = 0x42505753ULL;

void check_pair_shapes(const LabeledData& train, const LabeledData& val) {
    if (train.features.rows == 0 || val.features.rows == 0)
        throw std::invalid_argument("training requires non-empty train and val splits");
    if (train.features.cols != val.features.cols ||
        train.targets.cols != val.targets.cols)
        throw std::invalid_argument("train/val feature or target widths differ");
    if (train.features.rows != train.targets.rows ||
        val.features.rows != val.targets.rows)
        throw std::invalid_argument("features and targets row counts differ");
}

// Activations and deltas for one backprop step, reused across samples.
struct BackpropScratch {
    std::vector<std::vector<double>> activations;  // [0] is the input
    std::vector<std::vector<double>> deltas;       // one per weight layer

    explicit BackpropScratch(const mlp::Topology& topology) {
        activations.resize(topology.layer_sizes.size());
        for (std::size_t l = 0; l < topology.layer_sizes.size(); ++l)
            activations[l].resize(topology.layer_sizes[l]);
        deltas.resize(topology.layer_count());
        for (std::size_t l = 0; l < deltas.size(); ++l)
            deltas[l].resize(topology.layer_sizes[l + 1]);
    }
};

void run_forward(const mlp::Network& net, std::span<const double> input,
                 BackpropScratch& scratch) {
    const auto& sizes = net.topology.layer_sizes;
    std::copy(input.begin(), input.end(), scratch.activations[0].begin());
    const double* params = net.values.data();
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const std::size_t n_in = sizes[l];
        const std::size_t n_out = sizes[l + 1];
        const double* biases = params + offset + n_in * n_out;
        auto& out = scratch.activations[l + 1];
        std::copy(biases, biases + n_out, out.begin());
        for (std::size_t i = 0; i < n_in; ++i) {
            const double x = scratch.activations[l][i];
            const double* w = params + offset + i * n_out;
            for (std::size_t j = 0; j < n_out; ++j) out[j] += x * w[j];
        }
        for (std::size_t j = 0; j < n_out; ++j) out[j] = mlp::sigmoid(out[j]);
        offset += (n_in + 1) * n_out;
    }
}

// Output deltas (y - z) * z * (1 - z), propagated backward through the
// hidden layers with the generalized delta rule.
void run_backward(const mlp::Network& net, std::span<const double> target,
                  BackpropScratch& scratch) {
    const auto& sizes = net.topology.layer_sizes;
    const std::size_t layers = net.topology.layer_count();

    const auto& output = scratch.activations[layers];
    auto& out_delta = scratch.deltas[layers - 1];
    for (std::size_t j = 0; j < output.size(); ++j) {
        const double z = output[j];
        out_delta[j] = (target[j] - z) * z * (1.0 - z);
    }

    // Offsets of each weight block, innermost layer last.
    std::size_t offset_after = net.values.size();
    for (std::size_t l = layers; l-- > 1;) {
        const std::size_t n_in = sizes[l];
        const std::size_t n_out = sizes[l + 1];
        offset_after -= (n_in + 1) * n_out;
        const double* w = net.values.data() + offset_after;
        auto& delta = scratch.deltas[l - 1];
        const auto& next_delta = scratch.deltas[l];
        const auto& act = scratch.activations[l];
        for (std::size_t i = 0; i < n_in; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < n_out; ++j) sum += w[i * n_out + j] * next_delta[j];
            delta[i] = sum * act[i] * (1.0 - act[i]);
        }
    }
}

// In-place delta-rule update: w_ij += eta * x_i * delta_j, b_j += eta * delta_j.
void apply_sample_update(mlp::Network& net, std::span<const double> input,
                         std::span<const double> target, double eta,
                         BackpropScratch& scratch) {
    run_forward(net, input, scratch);
    run_backward(net, target, scratch);

    const auto& sizes = net.topology.layer_sizes;
    double* params = net.values.data();
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const std::size_t n_in = sizes[l];
        const std::size_t n_out = sizes[l + 1];
        const auto& act = scratch.activations[l];
        const auto& delta = scratch.deltas[l];
        for (std::size_t i = 0; i < n_in; ++i) {
            double* w = params + offset + i * n_out;
            const double scaled = eta * act[i];
            for (std::size_t j = 0; j < n_out; ++j) w[j] += scaled * delta[j];
        }
        double* biases = params + offset + n_in * n_out;
        for (std::size_t j = 0; j < n_out; ++j) biases[j] += eta * delta[j];
        offset += (n_in + 1) * n_out;
    }
}

Matrix forward_all(const mlp::Network& net, const Matrix& features) {
    Matrix out(features.rows, net.topology.outputs());
    mlp::ForwardScratch scratch;
    for (std::size_t r = 0; r < features.rows; ++r) {
        const auto y = mlp::forward_into(net, features.row(r), scratch);
        std::copy(y.begin(), y.end(), out.row(r).begin());
    }
    return out;
}

void softmax_into(std::span<const double> scores, std::span<double> out) {
    const double peak = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (std::size_t j = 0; j < scores.size(); ++j) {
        out[j] = std::exp(scores[j] - peak);
        sum += out[j];
    }
    for (std::size_t j = 0; j < scores.size(); ++j) out[j] /= sum;
}

Matrix logreg_probabilities(const LinearModel& model, const Matrix& features) {
    Matrix probs(features.rows, model.bias.size());
    std::vector<double> s(model.bias.size());
    for (std::size_t r = 0; r < features.rows; ++r) {
        const auto x = features.row(r);
        for (std::size_t j = 0; j < s.size(); ++j) {
            double acc = model.bias[j];
            for (std::size_t i = 0; i < features.cols; ++i)
                acc += x[i] * model.weights(i, j);
            s[j] = acc;
        }
        softmax_into(s, probs.row(r));
    }
    return probs;
}

}  // namespace

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("train config: epochs must be >= 1");
    if (!(weight_low < weight_high))
        throw std::invalid_argument("train config: weight_low must be < weight_high");
    if (!(learning_rate > 0.0))
        throw std::invalid_argument("train config: learning_rate must be positive");
    if (population_size < 1)
        throw std::invalid_argument("train config: population_size must be >= 1");
}

void EpochTrace::save_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace file: " + path.string());
    out << "epoch,train_loss,val_loss\n";
    for (std::size_t e = 0; e < train_loss.size(); ++e)
        out << e << ',' << format_double(train_loss[e]) << ','
            << format_double(val_loss[e]) << '\n';
    if (!out) throw std::runtime_error("failed writing trace file: " + path.string());
}

std::vector<double> LinearModel::scores(std::span<const double> input) const {
    std::vector<double> s(bias);
    for (std::size_t i = 0; i < weights.rows; ++i) {
        const double x = input[i];
        for (std::size_t j = 0; j < s.size(); ++j) s[j] += x * weights(i, j);
    }
    return s;
}

std::vector<double> LinearModel::probabilities(std::span<const double> input) const {
    std::vector<double> p = scores(input);
    softmax_into(p, p);
    return p;
}

std::size_t LinearModel::predict(std::span<const double> input) const {
    const std::vector<double> s = scores(input);
    std::size_t best = 0;
    for (std::size_t j = 1; j < s.size(); ++j)
        if (s[j] > s[best]) best = j;
    return best;
}

std::size_t TrainedModel::predict(std::span<const double> input) const {
    if (const auto* net = std::get_if<mlp::Network>(&parameters))
        return mlp::predict(*net, input);
    return std::get<LinearModel>(parameters).predict(input);
}

double loss(const Matrix& targets, const Matrix& outputs, LossMode mode) {
    if (targets.rows != outputs.rows || targets.cols != outputs.cols) {
        std::ostringstream msg;
        msg << "loss: shape mismatch, targets " << targets.rows << "x" << targets.cols
            << " vs outputs " << outputs.rows << "x" << outputs.cols;
        throw std::invalid_argument(msg.str());
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < targets.values.size(); ++i) {
        const double d = targets.values[i] - outputs.values[i];
        sum += d * d;
    }
    if (mode == LossMode::kHalfSum) return 0.5 * sum;
    return sum / static_cast<double>(targets.rows * targets.cols);
}

double foxann_objective(std::span<const double> weights, const mlp::Topology& topology,
                        const Matrix& features, const Matrix& targets) {
    const mlp::Network net = mlp::unflatten(weights, topology);
    mlp::ForwardScratch scratch;
    double sum = 0.0;
    for (std::size_t r = 0; r < features.rows; ++r) {
        const auto out = mlp::forward_into(net, features.row(r), scratch);
        const auto target = targets.row(r);
        for (std::size_t j = 0; j < out.size(); ++j) {
            const double d = target[j] - out[j];
            sum += d * d;
        }
    }
    return sum / static_cast<double>(targets.rows * targets.cols);
}

std::pair<TrainedModel, EpochTrace> train_foxann(const LabeledData& train,
                                                 const LabeledData& val,
                                                 const mlp::Topology& topology,
                                                 const TrainConfig& cfg) {
    cfg.validate();
    check_pair_shapes(train, val);
    topology.validate();
    if (topology.inputs() != train.features.cols ||
        topology.outputs() != train.targets.cols)
        throw std::invalid_argument("train_foxann: topology does not match the data");

    fox::FoxParams params;
    params.population_size = cfg.population_size;
    params.max_iterations = cfg.epochs;
    params.a_schedule = cfg.a_schedule;
    const fox::SearchBounds bounds(cfg.weight_low, cfg.weight_high,
                                   mlp::weight_count(topology));

    EpochTrace trace;
    trace.train_loss.reserve(cfg.epochs);
    trace.val_loss.reserve(cfg.epochs);

    const auto objective = [&](std::span<const double> w) {
        return foxann_objective(w, topology, train.features, train.targets);
    };
    const auto on_iteration = [&](std::size_t, std::span<const double> best, double fit) {
        trace.train_loss.push_back(fit);
        trace.val_loss.push_back(foxann_objective(best, topology, val.features, val.targets));
    };

    const fox::OptResult opt =
        fox::optimize(objective, bounds, params, cfg.seed, on_iteration);

    TrainedModel model;
    model.kind = ModelKind::kFoxann;
    model.parameters = mlp::unflatten(opt.best_position, topology);
    model.final_train_loss = trace.train_loss.back();
    model.final_val_loss = trace.val_loss.back();
    return {std::move(model), std::move(trace)};
}

std::pair<TrainedModel, EpochTrace> train_backprop(const LabeledData& train,
                                                   const LabeledData& val,
                                                   const mlp::Topology& topology,
                                                   const TrainConfig& cfg) {
    cfg.validate();
    check_pair_shapes(train, val);
    topology.validate();
    if (topology.inputs() != train.features.cols ||
        topology.outputs() != train.targets.cols)
        throw std::invalid_argument("train_backprop: topology does not match the data");

    mlp::Network net;
    net.topology = topology;
    net.values.resize(mlp::weight_count(topology));
    Rng rng(derive_seed(cfg.seed, kBackpropStream));
    for (double& v : net.values) v = rng.uniform(cfg.weight_low, cfg.weight_high);

    std::vector<std::size_t> order(train.features.rows);
    std::iota(order.begin(), order.end(), 0);
    BackpropScratch scratch(topology);

    EpochTrace trace;
    trace.train_loss.reserve(cfg.epochs);
    trace.val_loss.reserve(cfg.epochs);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng.engine());
        for (const std::size_t idx : order)
            apply_sample_update(net, train.features.row(idx), train.targets.row(idx),
                                cfg.learning_rate, scratch);

        const double train_loss =
            loss(train.targets, forward_all(net, train.features), cfg.loss_mode);
        const double val_loss =
            loss(val.targets, forward_all(net, val.features), cfg.loss_mode);
        if (std::isnan(train_loss) || std::isnan(val_loss)) {
            std::ostringstream msg;
            msg << "train_backprop: loss became NaN at epoch " << epoch;
            throw std::runtime_error(msg.str());
        }
        trace.train_loss.push_back(train_loss);
        trace.val_loss.push_back(val_loss);
    }

    TrainedModel model;
    model.kind = ModelKind::kAnnBackprop;
    model.parameters = std::move(net);
    model.final_train_loss = trace.train_loss.back();
    model.final_val_loss = trace.val_loss.back();
    return {std::move(model), std::move(trace)};
}

std::pair<TrainedModel, EpochTrace> train_logreg(const LabeledData& train,
                                                 const LabeledData& val,
                                                 std::size_t n_classes,
                                                 const TrainConfig& cfg) {
    cfg.validate();
    check_pair_shapes(train, val);
    if (n_classes < 2)
        throw std::invalid_argument("train_logreg: n_classes must be >= 2");
    if (train.targets.cols != n_classes)
        throw std::invalid_argument("train_logreg: target width does not match n_classes");

    const std::size_t n_features = train.features.cols;
    const std::size_t n = train.features.rows;
    LinearModel model{Matrix(n_features, n_classes), std::vector<double>(n_classes, 0.0)};

    EpochTrace trace;
    trace.train_loss.reserve(cfg.epochs);
    trace.val_loss.reserve(cfg.epochs);

    Matrix grad_w(n_features, n_classes);
    std::vector<double> grad_b(n_classes);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Cross-entropy gradient: (1/N) * X^T (P - Y).
        const Matrix probs = logreg_probabilities(model, train.features);
        std::fill(grad_w.values.begin(), grad_w.values.end(), 0.0);
        std::fill(grad_b.begin(), grad_b.end(), 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            const auto x = train.features.row(r);
            const auto p = probs.row(r);
            const auto y = train.targets.row(r);
            for (std::size_t j = 0; j < n_classes; ++j) {
                const double residual = p[j] - y[j];
                grad_b[j] += residual;
                for (std::size_t i = 0; i < n_features; ++i)
                    grad_w(i, j) += x[i] * residual;
            }
        }
        const double scale = cfg.learning_rate / static_cast<double>(n);
        for (std::size_t i = 0; i < grad_w.values.size(); ++i)
            model.weights.values[i] -= scale * grad_w.values[i];
        for (std::size_t j = 0; j < n_classes; ++j) model.bias[j] -= scale * grad_b[j];

        trace.train_loss.push_back(
            loss(train.targets, logreg_probabilities(model, train.features), cfg.loss_mode));
        trace.val_loss.push_back(
            loss(val.targets, logreg_probabilities(model, val.features), cfg.loss_mode));
    }

    TrainedModel trained;
    trained.kind = ModelKind::kLogreg;
    trained.parameters = std::move(model);
    trained.final_train_loss = trace.train_loss.back();
    trained.final_val_loss = trace.val_loss.back();
    return {std::move(trained), std::move(trace)};
}

std::vector<double> backprop_gradient(const mlp::Network& network,
                                      std::span<const double> input,
                                      std::span<const double> target) {
    BackpropScratch scratch(network.topology);
    run_forward(network, input, scratch);
    run_backward(network, target, scratch);

    // Gradient of the half-sum loss is -x_i * delta_j in the flat layout.
    std::vector<double> grad(network.values.size());
    const auto& sizes = network.topology.layer_sizes;
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const std::size_t n_in = sizes[l];
        const std::size_t n_out = sizes[l + 1];
        const auto& act = scratch.activations[l];
        const auto& delta = scratch.deltas[l];
        for (std::size_t i = 0; i < n_in; ++i)
            for (std::size_t j = 0; j < n_out; ++j)
                grad[offset + i * n_out + j] = -act[i] * delta[j];
        for (std::size_t j = 0; j < n_out; ++j)
            grad[offset + n_in * n_out + j] = -delta[j];
        offset += (n_in + 1) * n_out;
    }
    return grad;
}

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::kFoxann: return "foxann";
        case ModelKind::kAnnBackprop: return "ann";
        case ModelKind::kLogreg: return "logreg";
    }
    return "unknown";
}

ModelKind model_kind_from_string(std::string_view name) {
    if (name == "foxann") return ModelKind::kFoxann;
    if (name == "ann") return ModelKind::kAnnBackprop;
    if (name == "logreg") return ModelKind::kLogreg;
    throw std::invalid_argument("unknown model '" + std::string(name) +
                                "'; valid models: foxann ann logreg");
}

}  // namespace foxann::trainers
