#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dinids/dann.hpp"
#include "dinids/dataset.hpp"
#include "dinids/metrics.hpp"
#include "dinids/osvm.hpp"

namespace dinids::eval {

using dataset::FeatureMatrix;

// ---------------------------------------------------------------------------
// 2-D embedding export (drift visualization)

struct EmbeddingExport {
    Matrix coords;                        // m x dims
    std::vector<int> domain;              // tag per embedded row
    std::vector<std::size_t> row_indices; // rows of the input that were kept
    bool rank_deficient = false;          // second component forced to zero
};

// Centers the data and projects onto the top principal directions found by
// iterated power method with deflation. Deterministic under seed.
EmbeddingExport pca_embed(const FeatureMatrix& x, int dims, std::size_t sample_n,
                          std::uint64_t seed,
                          const std::vector<int>& domain_tags = {});

// between-domain centroid distance / mean within-domain spread, measured in
// the embedding plane. Requires exactly two domain tags (0 and 1).
double separation_ratio(const EmbeddingExport& emb);

// ---------------------------------------------------------------------------
// Pipelines under evaluation

enum class PipelineKind { di_nids, dann_classifier, feed_forward, osvm_raw };

std::string pipeline_name(PipelineKind k);

struct PipelineConfig {
    dann::DannTrainConfig dann;
    osvm::OsvmConfig osvm;
    // OSVM training is O(n^2) in kernel storage; cap the benign training pool.
    std::size_t osvm_max_train = 4000;

    void validate() const { dann.validate(); osvm.validate(); }
};

struct TrainedPipeline {
    PipelineKind kind = PipelineKind::feed_forward;
    std::optional<dann::DannModel> dann_model;
    std::optional<osvm::OsvmModel> osvm_model;
    dann::TrainHistory history;
};

// target_x may be empty for feed_forward / osvm_raw. Benign-only source rows
// feed the OSVM stage; target labels are never consumed.
TrainedPipeline train_pipeline(PipelineKind kind, const FeatureMatrix& source_x,
                               const std::vector<int>& source_y,
                               const FeatureMatrix& target_x,
                               const PipelineConfig& cfg);

std::vector<int> pipeline_predict(const TrainedPipeline& p, const FeatureMatrix& x);

// ---------------------------------------------------------------------------
// Evaluation protocols

struct EvalConfig {
    PipelineConfig pipeline;
    double test_split = 0.3;
    int folds = 5;
    std::uint64_t base_seed = 1;
};

struct LabeledData {
    std::string name;
    FeatureMatrix x;
    std::vector<int> y;
};

// Train/test on splits of the same dataset; mean F1 over `folds` seeds.
MetricsReport run_domain_specific(PipelineKind kind, const LabeledData& data,
                                  const EvalConfig& cfg);

// Train on source (plus unlabeled target-train rows), score target-test.
MetricsReport run_cross_domain(PipelineKind kind, const LabeledData& source,
                               const LabeledData& target, const EvalConfig& cfg);

// ---------------------------------------------------------------------------
// Comparison report (degradation accounting)

struct DirectionResult {
    std::string train_dataset;
    std::string test_dataset;
    double f1 = 0.0;  // percent
};

struct ModelResults {
    std::string model;
    std::map<std::string, double> ds_f1;   // dataset -> percent
    std::vector<DirectionResult> cross;    // per direction, percent
};

struct ModelSummary {
    std::string model;
    std::map<std::string, double> ds_f1;
    std::vector<DirectionResult> cross;
    std::vector<double> degradation;       // aligned with cross
    std::optional<double> avg_cd_f1;
    std::optional<double> avg_degradation;
    std::vector<std::string> missing_directions;
};

struct ProtocolReport {
    std::vector<ModelSummary> models;
};

ProtocolReport build_comparison_report(const std::vector<ModelResults>& results);

std::string render_report_table(const ProtocolReport& report);

// Published full-scale results for the two NFv2 benchmarks; emitted as a
// reference column only, never asserted against desk-scale runs.
std::vector<ModelResults> reference_results();

std::string report_to_json(const ProtocolReport& report);
ProtocolReport report_from_json(const std::string& json_text);

}  // namespace dinids::eval
