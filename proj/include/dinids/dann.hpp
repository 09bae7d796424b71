#pragma once

#include <cstdint>
#include <vector>

#include "dinids/dataset.hpp"
#include "dinids/nn.hpp"

namespace dinids::dann {

using dataset::FeatureMatrix;

inline constexpr int kInputDim = 39;
inline constexpr int kFeatureDim = 10;

// Feature extractor 39-10-10-10, label classifier 10-2 (no hidden layer),
// domain classifier 10-10-2 (one hidden layer); all sigmoid.
struct DannModel {
    nn::DenseNetwork g_f;
    nn::DenseNetwork g_c;
    nn::DenseNetwork g_d;

    static DannModel init(std::uint64_t seed);
    void validate() const;
};

enum class LambdaMode { fixed, scheduled };

struct LambdaSchedule {
    LambdaMode mode = LambdaMode::scheduled;
    double fixed_value = 0.0;
    double gamma_rate = 10.0;
};

struct DannTrainConfig {
    int epochs = 50;
    nn::SgdConfig sgd;
    double validation_split = 0.3;
    LambdaSchedule lambda;
    int folds = 5;
    int early_stop_patience = 5;
    // When false the domain sub-process is skipped entirely; this is the
    // plain feed-forward baseline trained by the same loop.
    bool train_domain_path = true;
    // When false, target rows are consumed cyclically in a canonical
    // (lexicographically sorted) order instead of being resampled per epoch,
    // so the result depends only on the multiset of target rows.
    bool resample_target = true;

    void validate() const;
};

struct EpochRecord {
    double label_loss = 0.0;
    double domain_loss = 0.0;
    double validation_f1 = 0.0;
    double lambda_value = 0.0;
};

using TrainHistory = std::vector<EpochRecord>;

// Eq.-style losses on clamped probabilities.
double label_loss(double p_true_class);
double domain_loss(double p_target, int gamma);

double lambda_at(double progress, const LambdaSchedule& cfg);

struct TrainResult {
    DannModel model;
    TrainHistory history;
};

TrainResult train_dann(const FeatureMatrix& source_x,
                       const std::vector<int>& source_y,
                       const FeatureMatrix& target_x,
                       const DannTrainConfig& cfg);

FeatureMatrix extract_features(const DannModel& model, const FeatureMatrix& x);

std::vector<int> predict_labels(const DannModel& model, const FeatureMatrix& x);

// Diagnostics only: argmax over the two domain-classifier units.
std::vector<int> predict_domain(const DannModel& model, const FeatureMatrix& x);

}  // namespace dinids::dann
