#include "foxann/model_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "foxann/mlp.hpp"

namespace foxann::model_io {

namespace {

using json = nlohmann::ordered_json;

std::vector<double> flatten_linear(const trainers::LinearModel& model) {
    // Same convention as the network layout: weights row-major by input
    // index, then the biases.
    std::vector<double> flat(model.weights.values);
    flat.insert(flat.end(), model.bias.begin(), model.bias.end());
    return flat;
}

}  // namespace

void save_model_json(const std::filesystem::path& path,
                     const trainers::TrainedModel& model, const data::Scaler& scaler,
                     const std::vector<std::string>& class_names) {
    json doc;
    doc["kind"] = trainers::to_string(model.kind);
    if (const auto* net = std::get_if<mlp::Network>(&model.parameters)) {
        doc["layer_sizes"] = net->topology.layer_sizes;
        doc["weights"] = net->values;
    } else {
        const auto& linear = std::get<trainers::LinearModel>(model.parameters);
        doc["layer_sizes"] = std::vector<std::size_t>{linear.weights.rows,
                                                      linear.bias.size()};
        doc["weights"] = flatten_linear(linear);
    }
    doc["scaler"] = {{"x_min", scaler.x_min}, {"x_max", scaler.x_max}};
    doc["class_names"] = class_names;
    doc["final_train_loss"] = model.final_train_loss;
    doc["final_val_loss"] = model.final_val_loss;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing model file: " + path.string());
}

LoadedModel load_model_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path.string());
    json doc = json::parse(in);

    LoadedModel loaded;
    loaded.model.kind = trainers::model_kind_from_string(doc.at("kind").get<std::string>());
    const auto layer_sizes = doc.at("layer_sizes").get<std::vector<std::size_t>>();
    const auto weights = doc.at("weights").get<std::vector<double>>();

    if (loaded.model.kind == trainers::ModelKind::kLogreg) {
        if (layer_sizes.size() != 2)
            throw std::runtime_error(path.string() + ": logreg expects two layer sizes");
        const std::size_t n_features = layer_sizes[0];
        const std::size_t n_classes = layer_sizes[1];
        if (weights.size() != (n_features + 1) * n_classes)
            throw std::runtime_error(path.string() + ": weight count mismatch");
        trainers::LinearModel linear;
        linear.weights = Matrix(n_features, n_classes);
        std::copy(weights.begin(), weights.begin() + n_features * n_classes,
                  linear.weights.values.begin());
        linear.bias.assign(weights.begin() + n_features * n_classes, weights.end());
        loaded.model.parameters = std::move(linear);
    } else {
        const mlp::Topology topology{layer_sizes};
        loaded.model.parameters = mlp::unflatten(weights, topology);
    }

    loaded.scaler.x_min = doc.at("scaler").at("x_min").get<std::vector<double>>();
    loaded.scaler.x_max = doc.at("scaler").at("x_max").get<std::vector<double>>();
    loaded.class_names = doc.at("class_names").get<std::vector<std::string>>();
    loaded.model.final_train_loss = doc.value("final_train_loss", 0.0);
    loaded.model.final_val_loss = doc.value("final_val_loss", 0.0);
    return loaded;
}

}  // namespace foxann::model_io
