#include "dinids/metrics.hpp"

namespace dinids::eval {

ConfusionMatrix confusion(const std::vector<int>& y_true,
                          const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size())
        throw ShapeError("label vectors differ in length");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool t = y_true[i] != 0, p = y_pred[i] != 0;
        if (t && p) ++cm.tp;
        else if (!t && p) ++cm.fp;
        else if (t && !p) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
    MetricsReport r;
    r.support_pos = cm.tp + cm.fn;
    r.support_neg = cm.tn + cm.fp;
    if (cm.tp + cm.fp > 0)
        r.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    else
        r.degenerate = true;
    if (cm.tp + cm.fn > 0)
        r.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    else
        r.degenerate = true;
    if (r.precision + r.recall > 0)
        r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    if (cm.total() > 0)
        r.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    return r;
}

double degradation(double ds_f1, double cd_f1) { return ds_f1 - cd_f1; }

}  // namespace dinids::eval
