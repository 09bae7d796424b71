#pragma once

#include <cstddef>
#include <vector>

#include "dinids/common.hpp"

namespace dinids::eval {

// Attack (label 1) is the positive class throughout.
struct ConfusionMatrix {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::size_t total() const { return tp + fp + tn + fn; }
};

struct MetricsReport {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    std::size_t support_pos = 0;
    std::size_t support_neg = 0;
    bool degenerate = false;  // set when a zero denominator forced a 0
};

ConfusionMatrix confusion(const std::vector<int>& y_true,
                          const std::vector<int>& y_pred);

MetricsReport metrics(const ConfusionMatrix& cm);

// ds_f1 - cd_f1, in percentage points; negative when cross-domain improves.
double degradation(double ds_f1, double cd_f1);

}  // namespace dinids::eval
