#include "foxann/data.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "foxann/rng.hpp"

namespace foxann::data {

namespace {

constexpr std::uint64_t kFoldStream = 0x464f4c44ULL;

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(trim(std::string_view(line).substr(start)));
            break;
        }
        cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

[[noreturn]] void cell_error(const std::filesystem::path& path, std::size_t line_no,
                             std::size_t column, const std::string& column_name,
                             const std::string& what) {
    std::ostringstream msg;
    msg << path.string() << ": " << what << " at line " << line_no << ", column "
        << column + 1;
    if (!column_name.empty()) msg << " (" << column_name << ")";
    throw std::runtime_error(msg.str());
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, std::string name) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("dataset file is empty: " + path.string());

    const std::vector<std::string> header = split_line(line);
    if (header.size() < 2)
        throw std::runtime_error(path.string() +
                                 ": need at least one feature column and a label column");
    const std::size_t n_features = header.size() - 1;

    Dataset ds;
    ds.name = name.empty() ? path.stem().string() : std::move(name);
    ds.feature_names.assign(header.begin(), header.end() - 1);

    std::vector<double> feature_rows;
    std::unordered_map<std::string, int> class_index;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;  // tolerate a trailing blank line
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size()) {
            std::ostringstream msg;
            msg << path.string() << ": line " << line_no << " has " << cells.size()
                << " cells, expected " << header.size();
            throw std::runtime_error(msg.str());
        }
        for (std::size_t c = 0; c < n_features; ++c) {
            const std::string& cell = cells[c];
            if (cell.empty()) cell_error(path, line_no, c, header[c], "missing value");
            double value = 0.0;
            const auto [ptr, ec] =
                std::from_chars(cell.data(), cell.data() + cell.size(), value);
            if (ec != std::errc{} || ptr != cell.data() + cell.size())
                cell_error(path, line_no, c, header[c],
                           "non-numeric feature value '" + cell + "'");
            feature_rows.push_back(value);
        }
        const std::string& label = cells.back();
        if (label.empty())
            cell_error(path, line_no, n_features, header.back(), "missing label");
        auto [it, inserted] =
            class_index.try_emplace(label, static_cast<int>(ds.class_names.size()));
        if (inserted) ds.class_names.push_back(label);
        ds.labels.push_back(it->second);
    }

    if (ds.labels.empty())
        throw std::runtime_error(path.string() + ": no data rows");
    if (ds.class_names.size() < 2)
        throw std::runtime_error(path.string() + ": fewer than 2 classes in label column");

    ds.features = Matrix(ds.labels.size(), n_features);
    ds.features.values = std::move(feature_rows);
    return ds;
}

Scaler fit_scaler(const Matrix& features) {
    if (features.rows == 0) throw std::invalid_argument("fit_scaler: no rows");
    Scaler s;
    s.x_min.assign(features.cols, std::numeric_limits<double>::infinity());
    s.x_max.assign(features.cols, -std::numeric_limits<double>::infinity());
    for (std::size_t r = 0; r < features.rows; ++r) {
        for (std::size_t c = 0; c < features.cols; ++c) {
            s.x_min[c] = std::min(s.x_min[c], features(r, c));
            s.x_max[c] = std::max(s.x_max[c], features(r, c));
        }
    }
    return s;
}

Matrix apply_scaler(const Scaler& scaler, const Matrix& features) {
    if (scaler.x_min.size() != features.cols)
        throw std::invalid_argument("apply_scaler: feature count mismatch");
    Matrix out(features.rows, features.cols);
    for (std::size_t c = 0; c < features.cols; ++c) {
        const double range = scaler.x_max[c] - scaler.x_min[c];
        for (std::size_t r = 0; r < features.rows; ++r) {
            out(r, c) = range > 0.0 ? (features(r, c) - scaler.x_min[c]) / range : 0.0;
        }
    }
    return out;
}

std::vector<double> one_hot(int label, std::size_t n_classes) {
    if (label < 0 || static_cast<std::size_t>(label) >= n_classes) {
        std::ostringstream msg;
        msg << "one_hot: label " << label << " out of range [0, " << n_classes << ")";
        throw std::invalid_argument(msg.str());
    }
    std::vector<double> v(n_classes, 0.0);
    v[static_cast<std::size_t>(label)] = 1.0;
    return v;
}

Matrix one_hot_matrix(std::span<const int> labels, std::size_t n_classes) {
    Matrix out(labels.size(), n_classes);
    for (std::size_t r = 0; r < labels.size(); ++r) {
        if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) >= n_classes)
            throw std::invalid_argument("one_hot_matrix: label out of range");
        out(r, static_cast<std::size_t>(labels[r])) = 1.0;
    }
    return out;
}

std::vector<FoldSplit> stratified_k_fold(const Dataset& dataset, std::size_t k,
                                         std::uint64_t seed) {
    const std::size_t n = dataset.n_samples();
    if (k < 2) throw std::invalid_argument("stratified_k_fold: k must be >= 2");
    if (k > n) throw std::invalid_argument("stratified_k_fold: k exceeds the sample count");

    std::vector<std::vector<std::size_t>> by_class(dataset.n_classes());
    for (std::size_t i = 0; i < n; ++i)
        by_class[static_cast<std::size_t>(dataset.labels[i])].push_back(i);

    bool stratified = true;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        if (by_class[c].size() < k) {
            std::cerr << "warning: class '" << dataset.class_names[c] << "' of dataset '"
                      << dataset.name << "' has fewer than " << k
                      << " samples; falling back to plain k-fold\n";
            stratified = false;
            break;
        }
    }

    Rng rng(derive_seed(seed, kFoldStream, hash_name(dataset.name)));
    std::vector<std::vector<std::size_t>> val_sets(k);
    if (stratified) {
        // Deal each shuffled class across the folds; the rotating start
        // spreads the remainders so fold sizes stay within one of each other.
        std::size_t start = 0;
        for (auto& members : by_class) {
            std::shuffle(members.begin(), members.end(), rng.engine());
            for (std::size_t i = 0; i < members.size(); ++i)
                val_sets[(start + i) % k].push_back(members[i]);
            start = (start + members.size()) % k;
        }
    } else {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        std::shuffle(all.begin(), all.end(), rng.engine());
        for (std::size_t i = 0; i < n; ++i) val_sets[i % k].push_back(all[i]);
    }

    std::vector<FoldSplit> folds(k);
    std::vector<std::size_t> fold_of(n, 0);
    for (std::size_t f = 0; f < k; ++f)
        for (std::size_t idx : val_sets[f]) fold_of[idx] = f;
    for (std::size_t f = 0; f < k; ++f) {
        folds[f].fold_index = f;
        std::sort(val_sets[f].begin(), val_sets[f].end());
        folds[f].val_indices = std::move(val_sets[f]);
        folds[f].train_indices.reserve(n - folds[f].val_indices.size());
        for (std::size_t i = 0; i < n; ++i)
            if (fold_of[i] != f) folds[f].train_indices.push_back(i);
    }
    return folds;
}

std::vector<std::string> bundled_dataset_names() {
    return {"iris", "breast_cancer", "wine"};
}

std::filesystem::path dataset_dir() {
    if (const char* env = std::getenv("FOXANN_DATA_DIR")) return env;
    if (std::filesystem::exists("data/iris.csv")) return "data";
#ifdef FOXANN_DEFAULT_DATA_DIR
    return FOXANN_DEFAULT_DATA_DIR;
#else
    return "data";
#endif
}

Dataset load_bundled(const std::string& name) {
    static const std::unordered_map<std::string, std::string> files = {
        {"iris", "iris.csv"},
        {"breast_cancer", "breast_cancer_wisconsin.csv"},
        {"wine", "wine.csv"},
    };
    const auto it = files.find(name);
    if (it == files.end()) {
        std::ostringstream msg;
        msg << "unknown dataset '" << name << "'; bundled datasets:";
        for (const auto& known : bundled_dataset_names()) msg << " " << known;
        throw std::invalid_argument(msg.str());
    }
    return load_csv(dataset_dir() / it->second, name);
}

}  // namespace foxann::data
