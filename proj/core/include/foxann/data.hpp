#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "foxann/matrix.hpp"

namespace foxann::data {

struct Dataset {
    std::string name;
    Matrix features;                       // N x F, no missing values
    std::vector<int> labels;               // N entries in [0, n_classes)
    std::vector<std::string> class_names;  // index -> name, first-appearance order
    std::vector<std::string> feature_names;

    std::size_t n_samples() const { return features.rows; }
    std::size_t n_features() const { return features.cols; }
    std::size_t n_classes() const { return class_names.size(); }
};

// Reads a UTF-8 CSV with a header row, numeric feature columns and the class
// label in the last column. Labels are mapped to indices in order of first
// appearance. Missing or non-numeric cells are rejected with the offending
// row and column named.
Dataset load_csv(const std::filesystem::path& path, std::string name = "");

// Per-feature min/max recorded by fit_scaler.
struct Scaler {
    std::vector<double> x_min;
    std::vector<double> x_max;

    bool operator==(const Scaler&) const = default;
};

Scaler fit_scaler(const Matrix& features);

// (x - x_min) / (x_max - x_min) per feature; constant features map to 0.0.
// Values outside the fitted range are not clamped.
Matrix apply_scaler(const Scaler& scaler, const Matrix& features);

// Unit vector with 1.0 at `label`; throws when label is out of range.
std::vector<double> one_hot(int label, std::size_t n_classes);
Matrix one_hot_matrix(std::span<const int> labels, std::size_t n_classes);

struct FoldSplit {
    std::size_t fold_index = 0;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> val_indices;
};

// Seeded stratified k-fold split: validation sets partition the dataset and
// per-class fold counts differ by at most one. Falls back to a plain k-fold
// (with a stderr warning) when some class has fewer than k members.
std::vector<FoldSplit> stratified_k_fold(const Dataset& dataset, std::size_t k,
                                         std::uint64_t seed);

// --- bundled datasets --------------------------------------------------------

std::vector<std::string> bundled_dataset_names();

// Resolution order: FOXANN_DATA_DIR environment variable, ./data relative to
// the working directory, then the build-time default.
std::filesystem::path dataset_dir();

Dataset load_bundled(const std::string& name);

}  // namespace foxann::data
