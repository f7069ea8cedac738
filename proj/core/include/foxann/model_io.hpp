#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "foxann/data.hpp"
#include "foxann/trainers.hpp"

namespace foxann::model_io {

// JSON schema (documented in the README):
//   kind         "foxann" | "ann" | "logreg"
//   layer_sizes  network layer widths; [n_features, n_classes] for logreg
//   weights      flat parameter vector in the canonical layout
//   scaler       { "x_min": [...], "x_max": [...] }
//   class_names  label index -> name
void save_model_json(const std::filesystem::path& path,
                     const trainers::TrainedModel& model, const data::Scaler& scaler,
                     const std::vector<std::string>& class_names);

struct LoadedModel {
    trainers::TrainedModel model;
    data::Scaler scaler;
    std::vector<std::string> class_names;
};

LoadedModel load_model_json(const std::filesystem::path& path);

}  // namespace foxann::model_io
