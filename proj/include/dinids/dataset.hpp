#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dinids/common.hpp"

namespace dinids::dataset {

enum class ColumnType { numeric, categorical, label };
enum class ColumnRole { feature, identifier, label };

struct SchemaColumn {
    std::string name;
    ColumnType type = ColumnType::numeric;
    ColumnRole role = ColumnRole::feature;
};

// Plain-text sidecar: one "<name> <type> <role>" line per column, '#' comments.
struct Schema {
    std::vector<SchemaColumn> columns;

    static Schema load(const std::string& path);

    std::size_t feature_count() const;
    // Index of the string-valued class label column (type == label).
    std::size_t class_label_index() const;
};

struct DatasetMeta {
    std::string name;
    std::size_t n_flows = 0;
    double benign_fraction = 0.0;
    std::map<std::string, std::size_t> attack_class_counts;
};

struct FeatureMatrix {
    Matrix values;  // n x d, row per flow
    std::vector<std::string> column_names;

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

struct FlowTable {
    Schema schema;
    std::vector<std::string> feature_names;                 // schema order
    Matrix features;                                        // n x n_features
    std::vector<std::vector<std::string>> identifiers;      // n x n_identifier
    std::vector<std::string> labels;                        // class strings
    std::vector<int> binary_labels;                         // filled by binarize_labels
    DatasetMeta meta;

    std::size_t rows() const { return labels.size(); }
};

struct ScalerParams {
    std::vector<double> min;
    std::vector<double> max;
};

struct LoadOptions {
    // Abort when more than this fraction of data rows fails to parse.
    double max_bad_row_fraction = 0.001;
    std::string dataset_name;
};

FlowTable load_netflow_csv(const std::string& path, const Schema& schema,
                           const LoadOptions& opts = {});

// "Benign" -> 0, anything else -> 1 (case-sensitive).
void binarize_labels(FlowTable& table);

// Drops identifier and label columns; the remaining numeric columns in
// schema order are the model features.
FeatureMatrix select_features(const FlowTable& table);

ScalerParams fit_scaler(const FeatureMatrix& x);

// (v - min) / (max - min), clipped to [0,1]; constant columns map to 0.
FeatureMatrix apply_scaler(const ScalerParams& params, const FeatureMatrix& x);

// Per-class proportional allocation with largest-remainder rounding.
FlowTable stratified_sample(const FlowTable& table, std::size_t n,
                            std::uint64_t seed);

// Shuffled split; test gets floor(n * fraction) rows.
std::pair<FlowTable, FlowTable> split(const FlowTable& table, double fraction,
                                      std::uint64_t seed);

// Shared index helper so matrix-level splits follow the same rule.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double fraction, std::uint64_t seed);

FlowTable take_rows(const FlowTable& table, const std::vector<std::size_t>& idx);

void save_matrix(const std::string& path, const FeatureMatrix& m);
FeatureMatrix load_matrix(const std::string& path);

}  // namespace dinids::dataset
