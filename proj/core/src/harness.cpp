#include "foxann/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "foxann/mlp.hpp"
#include "foxann/model_io.hpp"
#include "foxann/rng.hpp"
#include "format.hpp"

namespace foxann::harness {

namespace {

using json = nlohmann::ordered_json;
using trainers::ModelKind;

constexpr std::uint64_t kFoldSeedTag = 0x464f4c4453ULL;
constexpr std::uint64_t kTrainSeedTag = 0x545241494eULL;

data::Dataset resolve_dataset(const std::string& spec) {
    const auto names = data::bundled_dataset_names();
    if (std::find(names.begin(), names.end(), spec) != names.end())
        return data::load_bundled(spec);
    const std::filesystem::path path(spec);
    if (std::filesystem::exists(path)) return data::load_csv(path);

    std::ostringstream msg;
    msg << "unknown dataset '" << spec << "'; expected a bundled name (";
    for (std::size_t i = 0; i < names.size(); ++i) msg << (i ? " " : "") << names[i];
    msg << ") or a path to a CSV file";
    throw std::invalid_argument(msg.str());
}

trainers::LabeledData gather(const Matrix& features, const Matrix& targets,
                             const std::vector<int>& labels,
                             const std::vector<std::size_t>& indices) {
    trainers::LabeledData out;
    out.features = Matrix(indices.size(), features.cols);
    out.targets = Matrix(indices.size(), targets.cols);
    out.labels.reserve(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const std::size_t src = indices[r];
        std::copy(features.row(src).begin(), features.row(src).end(),
                  out.features.row(r).begin());
        std::copy(targets.row(src).begin(), targets.row(src).end(),
                  out.targets.row(r).begin());
        out.labels.push_back(labels[src]);
    }
    return out;
}

metrics::MetricsReport mean_report(const std::vector<metrics::MetricsReport>& reports) {
    metrics::MetricsReport mean;
    for (const auto& r : reports) {
        mean.accuracy += r.accuracy;
        mean.precision += r.precision;
        mean.recall += r.recall;
        mean.f_score += r.f_score;
        mean.loss += r.loss;
    }
    const double n = static_cast<double>(reports.size());
    mean.accuracy /= n;
    mean.precision /= n;
    mean.recall /= n;
    mean.f_score /= n;
    mean.loss /= n;
    return mean;
}

json report_to_json(const metrics::MetricsReport& r) {
    return {{"accuracy", r.accuracy},
            {"loss", r.loss},
            {"precision", r.precision},
            {"recall", r.recall},
            {"f_score", r.f_score}};
}

metrics::MetricsReport report_from_json(const json& j) {
    metrics::MetricsReport r;
    r.accuracy = j.at("accuracy").get<double>();
    r.loss = j.at("loss").get<double>();
    r.precision = j.at("precision").get<double>();
    r.recall = j.at("recall").get<double>();
    r.f_score = j.at("f_score").get<double>();
    return r;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing file: " + path.string());
}

std::string metrics_csv(const RunResult& result) {
    std::ostringstream out;
    out << "dataset,model,repeat,fold,accuracy,loss,precision,recall,f_score,"
           "seed,folds,epochs,population_size,learning_rate,normalization_scope,"
           "a_schedule\n";
    const auto& cfg = result.config;
    const auto provenance = [&]() {
        std::ostringstream p;
        p << cfg.seed << ',' << cfg.folds << ',' << cfg.epochs << ','
          << cfg.population_size << ',' << format_double(cfg.learning_rate) << ','
          << to_string(cfg.normalization_scope) << ',' << to_string(cfg.a_schedule);
        return p.str();
    }();
    const auto row = [&](const std::string& dataset, ModelKind model,
                         const std::string& repeat, const std::string& fold,
                         const metrics::MetricsReport& r) {
        out << dataset << ',' << trainers::to_string(model) << ',' << repeat << ','
            << fold << ',' << format_double(r.accuracy) << ',' << format_double(r.loss)
            << ',' << format_double(r.precision) << ',' << format_double(r.recall)
            << ',' << format_double(r.f_score) << ',' << provenance << '\n';
    };

    for (const auto& cell : result.cells)
        for (const auto& fold : cell.folds)
            row(cell.dataset, cell.model, std::to_string(fold.repeat),
                std::to_string(fold.fold), fold.report);
    for (const auto& cell : result.cells)
        row(cell.dataset, cell.model, "", "mean", cell.average);
    for (const auto& [model, report] : result.model_averages)
        row("average", model, "", "mean", report);
    return out.str();
}

std::string curve_csv(const std::vector<double>& curve) {
    std::ostringstream out;
    out << "epoch,mean_val_loss\n";
    for (std::size_t e = 0; e < curve.size(); ++e)
        out << e << ',' << format_double(curve[e]) << '\n';
    return out.str();
}

json config_to_json(const ExperimentConfig& cfg) {
    json models = json::array();
    for (const auto m : cfg.models) models.push_back(trainers::to_string(m));
    return {{"datasets", cfg.datasets},
            {"models", models},
            {"folds", cfg.folds},
            {"epochs", cfg.epochs},
            {"population_size", cfg.population_size},
            {"learning_rate", cfg.learning_rate},
            {"weight_low", cfg.weight_low},
            {"weight_high", cfg.weight_high},
            {"seed", cfg.seed},
            {"normalization_scope", to_string(cfg.normalization_scope)},
            {"a_schedule", to_string(cfg.a_schedule)},
            {"repeats", cfg.repeats},
            {"output_dir", cfg.output_dir}};
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    cfg.datasets = j.at("datasets").get<std::vector<std::string>>();
    cfg.models.clear();
    for (const auto& name : j.at("models"))
        cfg.models.push_back(trainers::model_kind_from_string(name.get<std::string>()));
    cfg.folds = j.at("folds").get<std::size_t>();
    cfg.epochs = j.at("epochs").get<std::size_t>();
    cfg.population_size = j.at("population_size").get<std::size_t>();
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.weight_low = j.at("weight_low").get<double>();
    cfg.weight_high = j.at("weight_high").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.normalization_scope =
        norm_scope_from_string(j.at("normalization_scope").get<std::string>());
    cfg.a_schedule = a_schedule_from_string(j.at("a_schedule").get<std::string>());
    cfg.repeats = j.at("repeats").get<std::size_t>();
    cfg.output_dir = j.at("output_dir").get<std::string>();
    return cfg;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (datasets.empty()) throw std::invalid_argument("config: need at least one dataset");
    if (models.empty()) throw std::invalid_argument("config: need at least one model");
    if (folds < 2) throw std::invalid_argument("config: folds must be >= 2");
    if (epochs < 1) throw std::invalid_argument("config: epochs must be >= 1");
    if (repeats < 1) throw std::invalid_argument("config: repeats must be >= 1");
    if (!(weight_low < weight_high))
        throw std::invalid_argument("config: weight bounds must satisfy low < high");
    if (!(learning_rate > 0.0))
        throw std::invalid_argument("config: learning_rate must be positive");
    if (population_size < 1)
        throw std::invalid_argument("config: population_size must be >= 1");
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();

    RunResult result;
    result.config = cfg;

    for (const auto& dataset_spec : cfg.datasets) {
        const data::Dataset ds = resolve_dataset(dataset_spec);
        const std::uint64_t dataset_hash = hash_name(ds.name);
        const Matrix targets = data::one_hot_matrix(ds.labels, ds.n_classes());

        // With whole-dataset scope the scaler sees every row before splitting.
        const data::Scaler whole_scaler = data::fit_scaler(ds.features);
        const Matrix whole_scaled =
            cfg.normalization_scope == NormScope::kWholeDataset
                ? data::apply_scaler(whole_scaler, ds.features)
                : Matrix{};

        // Splits depend only on (seed, dataset, repeat): every model sees
        // the same folds.
        std::vector<std::vector<data::FoldSplit>> splits(cfg.repeats);
        for (std::size_t rep = 0; rep < cfg.repeats; ++rep)
            splits[rep] = data::stratified_k_fold(
                ds, cfg.folds, derive_seed(cfg.seed, kFoldSeedTag, dataset_hash, rep));

        for (const ModelKind model : cfg.models) {
            CellResult cell;
            cell.dataset = ds.name;
            cell.model = model;
            std::vector<metrics::MetricsReport> reports;
            std::vector<trainers::EpochTrace> traces;

            for (std::size_t rep = 0; rep < cfg.repeats; ++rep) {
                for (const auto& split : splits[rep]) {
                    try {
                        data::Scaler scaler = whole_scaler;
                        trainers::LabeledData train_split, val_split;
                        if (cfg.normalization_scope == NormScope::kWholeDataset) {
                            train_split = gather(whole_scaled, targets, ds.labels,
                                                 split.train_indices);
                            val_split = gather(whole_scaled, targets, ds.labels,
                                               split.val_indices);
                        } else {
                            const trainers::LabeledData raw_train = gather(
                                ds.features, targets, ds.labels, split.train_indices);
                            scaler = data::fit_scaler(raw_train.features);
                            train_split = raw_train;
                            train_split.features =
                                data::apply_scaler(scaler, raw_train.features);
                            val_split =
                                gather(ds.features, targets, ds.labels, split.val_indices);
                            val_split.features =
                                data::apply_scaler(scaler, val_split.features);
                        }

                        trainers::TrainConfig tc;
                        tc.epochs = cfg.epochs;
                        tc.weight_low = cfg.weight_low;
                        tc.weight_high = cfg.weight_high;
                        tc.population_size = cfg.population_size;
                        tc.learning_rate = cfg.learning_rate;
                        tc.a_schedule = cfg.a_schedule;
                        tc.seed = derive_seed(
                            cfg.seed, kTrainSeedTag ^ dataset_hash,
                            hash_name(trainers::to_string(model)),
                            (static_cast<std::uint64_t>(rep) << 32) | split.fold_index);

                        std::pair<trainers::TrainedModel, trainers::EpochTrace> outcome;
                        switch (model) {
                            case ModelKind::kFoxann:
                                outcome = trainers::train_foxann(
                                    train_split, val_split,
                                    mlp::build_topology(ds.n_features(), ds.n_classes()),
                                    tc);
                                break;
                            case ModelKind::kAnnBackprop:
                                outcome = trainers::train_backprop(
                                    train_split, val_split,
                                    mlp::build_topology(ds.n_features(), ds.n_classes()),
                                    tc);
                                break;
                            case ModelKind::kLogreg:
                                outcome = trainers::train_logreg(train_split, val_split,
                                                                 ds.n_classes(), tc);
                                break;
                        }

                        std::vector<int> predicted;
                        predicted.reserve(val_split.n_samples());
                        for (std::size_t r = 0; r < val_split.n_samples(); ++r)
                            predicted.push_back(static_cast<int>(
                                outcome.first.predict(val_split.features.row(r))));
                        const auto cm =
                            metrics::confusion(val_split.labels, predicted, ds.n_classes());
                        const auto report =
                            metrics::report(cm, outcome.second.val_loss.back());

                        cell.folds.push_back({rep, split.fold_index, report});
                        cell.trained.push_back({rep, split.fold_index,
                                                std::move(outcome.first), scaler,
                                                ds.class_names});
                        reports.push_back(report);
                        traces.push_back(std::move(outcome.second));
                    } catch (const std::exception& e) {
                        std::ostringstream msg;
                        msg << "experiment failed for dataset '" << ds.name << "', model '"
                            << trainers::to_string(model) << "', repeat " << rep
                            << ", fold " << split.fold_index << ": " << e.what();
                        throw std::runtime_error(msg.str());
                    }
                }
            }

            cell.average = mean_report(reports);
            cell.mean_val_loss_curve.assign(cfg.epochs, 0.0);
            for (const auto& trace : traces)
                for (std::size_t e = 0; e < cfg.epochs; ++e)
                    cell.mean_val_loss_curve[e] += trace.val_loss[e];
            for (double& v : cell.mean_val_loss_curve)
                v /= static_cast<double>(traces.size());

            result.cells.push_back(std::move(cell));
        }
    }

    for (const ModelKind model : cfg.models) {
        std::vector<metrics::MetricsReport> averages;
        for (const auto& cell : result.cells)
            if (cell.model == model) averages.push_back(cell.average);
        result.model_averages.emplace_back(model, mean_report(averages));
    }

    result.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

void export_report(const RunResult& result, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir / "curves", ec);
    std::filesystem::create_directories(dir / "models", ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + dir.string());

    write_text_file(dir / "metrics.csv", metrics_csv(result));

    json doc;
    doc["schema"] = "foxann.metrics.v1";
    doc["config"] = config_to_json(result.config);
    doc["wall_time_seconds"] = result.wall_time_seconds;
    doc["results"] = json::array();
    for (const auto& cell : result.cells) {
        json folds = json::array();
        for (const auto& fold : cell.folds) {
            json f = {{"repeat", fold.repeat}, {"fold", fold.fold}};
            f.update(report_to_json(fold.report));
            folds.push_back(std::move(f));
        }
        doc["results"].push_back({{"dataset", cell.dataset},
                                  {"model", trainers::to_string(cell.model)},
                                  {"folds", std::move(folds)},
                                  {"average", report_to_json(cell.average)},
                                  {"mean_val_loss_curve", cell.mean_val_loss_curve}});
    }
    doc["model_averages"] = json::array();
    for (const auto& [model, report] : result.model_averages) {
        json m = {{"model", trainers::to_string(model)}};
        m.update(report_to_json(report));
        doc["model_averages"].push_back(std::move(m));
    }
    write_text_file(dir / "metrics.json", doc.dump(2) + "\n");

    for (const auto& cell : result.cells) {
        const std::string stem = cell.dataset + "_" + trainers::to_string(cell.model);
        write_text_file(dir / "curves" / (stem + ".csv"),
                        curve_csv(cell.mean_val_loss_curve));
        for (const auto& record : cell.trained) {
            std::ostringstream name;
            name << stem;
            if (result.config.repeats > 1) name << "_rep" << record.repeat;
            name << "_fold" << record.fold << ".json";
            model_io::save_model_json(dir / "models" / name.str(), record.model,
                                      record.scaler, record.class_names);
        }
    }
}

RunResult load_metrics_json(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open metrics file: " + file.string());
    json doc = json::parse(in);

    RunResult result;
    result.config = config_from_json(doc.at("config"));
    result.wall_time_seconds = doc.at("wall_time_seconds").get<double>();
    for (const auto& cell_json : doc.at("results")) {
        CellResult cell;
        cell.dataset = cell_json.at("dataset").get<std::string>();
        cell.model =
            trainers::model_kind_from_string(cell_json.at("model").get<std::string>());
        for (const auto& fold_json : cell_json.at("folds")) {
            FoldOutcome fold;
            fold.repeat = fold_json.at("repeat").get<std::size_t>();
            fold.fold = fold_json.at("fold").get<std::size_t>();
            fold.report = report_from_json(fold_json);
            cell.folds.push_back(std::move(fold));
        }
        cell.average = report_from_json(cell_json.at("average"));
        cell.mean_val_loss_curve =
            cell_json.at("mean_val_loss_curve").get<std::vector<double>>();
        result.cells.push_back(std::move(cell));
    }
    for (const auto& avg_json : doc.at("model_averages"))
        result.model_averages.emplace_back(
            trainers::model_kind_from_string(avg_json.at("model").get<std::string>()),
            report_from_json(avg_json));
    return result;
}

std::string render_comparison(const RunResult& result) {
    std::ostringstream out;
    out << "seed " << result.config.seed << ", " << result.config.folds << " folds, "
        << result.config.epochs << " epochs\n\n";
    char line[160];
    std::snprintf(line, sizeof(line), "%-24s %-8s %9s %9s %10s %9s %9s\n", "Dataset",
                  "Model", "Accuracy", "Loss", "Precision", "Recall", "F-Score");
    out << line;
    const auto print_row = [&](const std::string& dataset, ModelKind model,
                               const metrics::MetricsReport& r) {
        std::snprintf(line, sizeof(line), "%-24s %-8s %9.4f %9.4f %10.4f %9.4f %9.4f\n",
                      dataset.c_str(), trainers::to_string(model), r.accuracy, r.loss,
                      r.precision, r.recall, r.f_score);
        out << line;
    };
    for (const auto& cell : result.cells) print_row(cell.dataset, cell.model, cell.average);
    for (const auto& [model, report] : result.model_averages)
        print_row("average", model, report);
    return out.str();
}

const char* to_string(NormScope scope) {
    return scope == NormScope::kWholeDataset ? "whole_dataset" : "per_fold";
}

NormScope norm_scope_from_string(std::string_view name) {
    if (name == "whole_dataset") return NormScope::kWholeDataset;
    if (name == "per_fold") return NormScope::kPerFold;
    throw std::invalid_argument("unknown normalization scope '" + std::string(name) +
                                "'; valid: whole_dataset per_fold");
}

const char* to_string(fox::ASchedule schedule) {
    return schedule == fox::ASchedule::kDecreasing ? "decreasing" : "literal_eq10";
}

fox::ASchedule a_schedule_from_string(std::string_view name) {
    if (name == "decreasing") return fox::ASchedule::kDecreasing;
    if (name == "literal_eq10") return fox::ASchedule::kLiteral;
    throw std::invalid_argument("unknown a-schedule '" + std::string(name) +
                                "'; valid: decreasing literal_eq10");
}

}  // namespace foxann::harness
