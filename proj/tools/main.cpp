#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "foxann/data.hpp"
#include "foxann/fox.hpp"
#include "foxann/harness.hpp"
#include "foxann/trainers.hpp"

namespace {

using foxann::harness::ExperimentConfig;

// "LO:HI" -> weight bounds
void parse_bounds(const std::string& text, ExperimentConfig& cfg) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw CLI::ValidationError("--bounds", "expected LO:HI, e.g. -3:3");
    try {
        cfg.weight_low = std::stod(text.substr(0, colon));
        cfg.weight_high = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw CLI::ValidationError("--bounds", "expected numeric LO:HI, e.g. -3:3");
    }
    if (!(cfg.weight_low < cfg.weight_high))
        throw CLI::ValidationError("--bounds", "LO must be < HI");
}

int cmd_run(const ExperimentConfig& cfg) {
    const auto result = foxann::harness::run_experiment(cfg);
    foxann::harness::export_report(result, cfg.output_dir);
    std::cout << foxann::harness::render_comparison(result);
    std::cout << "\nresults written to " << cfg.output_dir << "\n";
    return 0;
}

int cmd_compare(const std::string& metrics_file) {
    const auto result = foxann::harness::load_metrics_json(metrics_file);
    std::cout << foxann::harness::render_comparison(result);
    return 0;
}

int cmd_list_datasets() {
    std::printf("data directory: %s\n\n", foxann::data::dataset_dir().string().c_str());
    std::printf("%-16s %9s %9s %8s\n", "name", "instances", "features", "classes");
    for (const auto& name : foxann::data::bundled_dataset_names()) {
        const auto ds = foxann::data::load_bundled(name);
        std::printf("%-16s %9zu %9zu %8zu\n", name.c_str(), ds.n_samples(),
                    ds.n_features(), ds.n_classes());
    }
    return 0;
}

int cmd_sphere_check(std::size_t dim, std::size_t pop, std::size_t iters,
                     std::uint64_t seed) {
    foxann::fox::FoxParams params;
    params.population_size = pop;
    params.max_iterations = iters;
    const foxann::fox::SearchBounds bounds(-5.0, 5.0, dim);
    const auto sphere = [](std::span<const double> x) {
        double sum = 0.0;
        for (const double v : x) sum += v * v;
        return sum;
    };
    const auto result = foxann::fox::optimize(sphere, bounds, params, seed);
    std::printf("sphere benchmark: dim %zu, population %zu, %zu iterations, seed %llu\n",
                dim, pop, iters, static_cast<unsigned long long>(seed));
    for (std::size_t i = 0; i < result.fitness_history.size(); ++i)
        std::printf("%4zu  %.6e\n", i, result.fitness_history[i]);
    std::printf("best fitness: %.6e\n", result.best_fitness);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FOXANN: feedforward networks trained by the FOX optimizer, "
                 "benchmarked against backprop and logistic regression"};
    app.require_subcommand(1);

    // run ---------------------------------------------------------------
    ExperimentConfig cfg;
    cfg.datasets = foxann::data::bundled_dataset_names();
    cfg.models = {foxann::trainers::ModelKind::kFoxann,
                  foxann::trainers::ModelKind::kAnnBackprop,
                  foxann::trainers::ModelKind::kLogreg};

    auto* run = app.add_subcommand("run", "Run a cross-validated training experiment");
    run->set_config("--config", "", "Key-value config file; flags override its entries");

    std::vector<std::string> dataset_args;
    std::vector<std::string> model_args;
    std::string bounds_arg;
    run->add_option("--dataset", dataset_args,
                    "Dataset name (iris, breast_cancer, wine) or CSV path; repeatable");
    run->add_option("--model", model_args, "Model to train: foxann, ann, logreg; repeatable")
        ->check(CLI::IsMember({"foxann", "ann", "logreg"}));
    run->add_option("--folds", cfg.folds, "Cross-validation folds")
        ->capture_default_str();
    run->add_option("--epochs", cfg.epochs, "Training epochs")->capture_default_str();
    run->add_option("--pop", cfg.population_size, "FOX population size")
        ->capture_default_str();
    run->add_option("--lr", cfg.learning_rate, "Learning rate for ann/logreg")
        ->capture_default_str();
    run->add_option("--seed", cfg.seed, "Run seed")->capture_default_str();
    run->add_option("--bounds", bounds_arg, "Weight bounds as LO:HI (default -3:3)");
    run->add_option_function<std::string>(
           "--norm-scope",
           [&cfg](const std::string& v) {
               cfg.normalization_scope = foxann::harness::norm_scope_from_string(v);
           },
           "Normalization scope: whole_dataset or per_fold")
        ->check(CLI::IsMember({"whole_dataset", "per_fold"}));
    run->add_option_function<std::string>(
           "--a-schedule",
           [&cfg](const std::string& v) {
               cfg.a_schedule = foxann::harness::a_schedule_from_string(v);
           },
           "Exploration scale schedule: decreasing or literal_eq10")
        ->check(CLI::IsMember({"decreasing", "literal_eq10"}));
    run->add_option("--repeats", cfg.repeats, "Seeded repetitions of the fold loop")
        ->capture_default_str();
    run->add_option("--out", cfg.output_dir, "Output directory")->capture_default_str();

    // compare -----------------------------------------------------------
    auto* compare =
        app.add_subcommand("compare", "Render the aggregate table from a metrics.json");
    std::string metrics_file;
    compare->add_option("metrics", metrics_file, "Path to metrics.json")->required();

    // list-datasets -------------------------------------------------------
    auto* list = app.add_subcommand("list-datasets", "List the bundled datasets");

    // sphere-check --------------------------------------------------------
    auto* sphere = app.add_subcommand(
        "sphere-check", "Run the FOX optimizer on the sphere function and print "
                        "the convergence history");
    std::size_t sphere_dim = 5, sphere_pop = 30, sphere_iters = 100;
    std::uint64_t sphere_seed = 7;
    sphere->add_option("--dim", sphere_dim, "Dimensions")->capture_default_str();
    sphere->add_option("--pop", sphere_pop, "Population size")->capture_default_str();
    sphere->add_option("--iters", sphere_iters, "Iterations")->capture_default_str();
    sphere->add_option("--seed", sphere_seed, "Seed")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (!dataset_args.empty()) cfg.datasets = dataset_args;
            if (!model_args.empty()) {
                cfg.models.clear();
                for (const auto& name : model_args)
                    cfg.models.push_back(foxann::trainers::model_kind_from_string(name));
            }
            if (!bounds_arg.empty()) parse_bounds(bounds_arg, cfg);
            return cmd_run(cfg);
        }
        if (compare->parsed()) return cmd_compare(metrics_file);
        if (list->parsed()) return cmd_list_datasets();
        if (sphere->parsed())
            return cmd_sphere_check(sphere_dim, sphere_pop, sphere_iters, sphere_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
