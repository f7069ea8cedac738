#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "foxann/data.hpp"
#include "foxann/metrics.hpp"
#include "foxann/trainers.hpp"

namespace foxann::harness {

enum class NormScope {
    kWholeDataset,  // scaler fitted on the full dataset before splitting
    kPerFold,       // scaler fitted on each training fold only
};

struct ExperimentConfig {
    // Bundled names ("iris", "breast_cancer", "wine") or paths to CSV files.
    std::vector<std::string> datasets;
    std::vector<trainers::ModelKind> models;
    std::size_t folds = 10;
    std::size_t epochs = 100;
    std::size_t population_size = 30;
    double learning_rate = 0.1;
    double weight_low = -3.0;
    double weight_high = 3.0;
    std::uint64_t seed = 7;
    NormScope normalization_scope = NormScope::kWholeDataset;
    fox::ASchedule a_schedule = fox::ASchedule::kDecreasing;
    std::size_t repeats = 1;
    std::string output_dir = "results";

    void validate() const;
};

struct FoldOutcome {
    std::size_t repeat = 0;
    std::size_t fold = 0;
    metrics::MetricsReport report;
};

struct ModelRecord {
    std::size_t repeat = 0;
    std::size_t fold = 0;
    trainers::TrainedModel model;
    data::Scaler scaler;
    std::vector<std::string> class_names;
};

// Results for one dataset x model cell of the grid.
struct CellResult {
    std::string dataset;
    trainers::ModelKind model = trainers::ModelKind::kFoxann;
    std::vector<FoldOutcome> folds;
    metrics::MetricsReport average;             // arithmetic mean over folds
    std::vector<double> mean_val_loss_curve;    // per epoch, averaged over folds
    std::vector<ModelRecord> trained;           // not serialized into metrics.json
};

struct RunResult {
    ExperimentConfig config;
    double wall_time_seconds = 0.0;
    std::vector<CellResult> cells;
    // Per-model metrics averaged over all datasets ("average results" rows).
    std::vector<std::pair<trainers::ModelKind, metrics::MetricsReport>> model_averages;
};

// Trains every (dataset, model, fold) combination under k-fold
// cross-validation. Fold splits depend only on (seed, dataset, repeat), so
// every model sees identical folds; training seeds additionally mix in the
// model and fold index. Deterministic for a fixed config.
RunResult run_experiment(const ExperimentConfig& cfg);

// Writes metrics.csv, metrics.json, curves/<dataset>_<model>.csv and
// models/<dataset>_<model>_fold<k>.json under `dir`.
void export_report(const RunResult& result, const std::filesystem::path& dir);

// Reads a metrics.json back; trained model records are not restored.
RunResult load_metrics_json(const std::filesystem::path& file);

// Aggregate table (one row per dataset x model plus the average rows).
std::string render_comparison(const RunResult& result);

const char* to_string(NormScope scope);
NormScope norm_scope_from_string(std::string_view name);
const char* to_string(fox::ASchedule schedule);
fox::ASchedule a_schedule_from_string(std::string_view name);

}  // namespace foxann::harness
