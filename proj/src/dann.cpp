#include "dinids/dann.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dinids/metrics.hpp"

namespace dinids::dann {

using nn::DenseNetwork;

DannModel DannModel::init(std::uint64_t seed) {
    auto rng = make_rng(seed, RngStream::init);
    DannModel m;
    m.g_f = DenseNetwork::random({kInputDim, 10, 10, kFeatureDim},
                                 nn::Activation::sigmoid, rng);
    m.g_c = DenseNetwork::random({kFeatureDim, 2}, nn::Activation::sigmoid, rng);
    m.g_d = DenseNetwork::random({kFeatureDim, 10, 2}, nn::Activation::sigmoid, rng);
    return m;
}

void DannModel::validate() const {
    if (g_f.in_dim() != kInputDim || g_f.out_dim() != kFeatureDim)
        throw ShapeError("g_f must map 39 inputs to 10 features");
    if (g_c.in_dim() != kFeatureDim || g_c.out_dim() != 2)
        throw ShapeError("g_c must map 10 features to 2 outputs");
    if (g_d.in_dim() != kFeatureDim || g_d.out_dim() != 2)
        throw ShapeError("g_d must map 10 features to 2 outputs");
}

void DannTrainConfig::validate() const {
    sgd.validate();
    if (epochs <= 0) throw NumericError("epochs must be > 0");
    if (validation_split <= 0.0 || validation_split >= 1.0)
        throw NumericError("validation_split must be in (0,1)");
    if (folds <= 0) throw NumericError("folds must be > 0");
    if (early_stop_patience <= 0) throw NumericError("patience must be > 0");
}

double label_loss(double p_true_class) { return -std::log(clamp_prob(p_true_class)); }

double domain_loss(double p_target, int gamma) {
    const double p = clamp_prob(p_target);
    return -(gamma * std::log(p) + (1 - gamma) * std::log(1.0 - p));
}

double lambda_at(double progress, const LambdaSchedule& cfg) {
    if (progress < 0.0 || progress > 1.0)
        throw std::invalid_argument("progress must be in [0,1]");
    if (cfg.mode == LambdaMode::fixed) return cfg.fixed_value;
    return 2.0 / (1.0 + std::exp(-cfg.gamma_rate * progress)) - 1.0;
}

namespace {

int argmax2(const Vector& out) { return out[1] > out[0] ? 1 : 0; }

// Lexicographic order over rows; used for the canonical target ordering.
std::vector<std::size_t> lexicographic_order(const Matrix& x) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(x.rows()));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            const double va = x(static_cast<Eigen::Index>(a), c);
            const double vb = x(static_cast<Eigen::Index>(b), c);
            if (va != vb) return va < vb;
        }
        return false;
    });
    return idx;
}

double validation_f1(const DannModel& model, const Matrix& x,
                     const std::vector<int>& y,
                     const std::vector<std::size_t>& idx) {
    std::vector<int> yt, yp;
    yt.reserve(idx.size());
    yp.reserve(idx.size());
    for (auto i : idx) {
        const Vector f = model.g_f.forward(x.row(static_cast<Eigen::Index>(i)).transpose());
        yp.push_back(argmax2(model.g_c.forward(f)));
        yt.push_back(y[i]);
    }
    return eval::metrics(eval::confusion(yt, yp)).f1;
}

}  // namespace

TrainResult train_dann(const FeatureMatrix& source_x,
                       const std::vector<int>& source_y,
                       const FeatureMatrix& target_x,
                       const DannTrainConfig& cfg) {
    cfg.validate();
    if (source_x.rows() == 0) throw DataError("empty source dataset");
    if (cfg.train_domain_path && target_x.rows() == 0)
        throw DataError("empty target dataset");
    if (source_x.cols() != kInputDim)
        throw ShapeError("source matrix must have 39 columns");
    if (cfg.train_domain_path && target_x.cols() != kInputDim)
        throw ShapeError("target matrix must have 39 columns");
    if (source_y.size() != source_x.rows())
        throw ShapeError("source label count != source row count");
    for (int y : source_y)
        if (y != 0 && y != 1) throw DataError("source labels must be 0/1");

    const std::uint64_t seed = cfg.sgd.seed;
    DannModel model = DannModel::init(seed);

    auto [train_idx, val_idx] =
        dataset::split_indices(source_x.rows(), cfg.validation_split, seed);
    if (train_idx.empty()) train_idx = val_idx;

    auto rng_label_order = make_rng(seed, RngStream::shuffle);
    auto rng_label_drop = make_rng(seed, RngStream::dropout_label);
    auto rng_domain_order = make_rng(seed, RngStream::domain_order);
    auto rng_domain_drop = make_rng(seed, RngStream::dropout_domain);

    const Matrix& sx = source_x.values;
    const Matrix& tx = target_x.values;

    std::vector<std::size_t> target_order;
    if (cfg.train_domain_path) {
        target_order.resize(target_x.rows());
        std::iota(target_order.begin(), target_order.end(), 0);
        if (!cfg.resample_target) target_order = lexicographic_order(tx);
    }
    std::size_t target_cursor = 0;
    std::size_t domain_src_cursor = 0;
    std::vector<std::size_t> domain_src_order = train_idx;

    const int batch = cfg.sgd.batch_size;
    const std::size_t n_train = train_idx.size();
    const std::size_t n_batches = (n_train + static_cast<std::size_t>(batch) - 1) /
                                  static_cast<std::size_t>(batch);

    TrainHistory history;
    DannModel best = model;
    double best_f1 = -1.0;
    int since_best = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(train_idx.begin(), train_idx.end(), rng_label_order);
        if (cfg.train_domain_path) {
            std::shuffle(domain_src_order.begin(), domain_src_order.end(),
                         rng_domain_order);
            if (cfg.resample_target)
                std::shuffle(target_order.begin(), target_order.end(),
                             rng_domain_order);
        }

        double epoch_label_loss = 0.0;
        double epoch_domain_loss = 0.0;
        std::size_t label_samples = 0, domain_batches = 0;
        double lambda = 0.0;

        for (std::size_t b = 0; b < n_batches; ++b) {
            const double progress =
                (static_cast<double>(epoch) +
                 static_cast<double>(b) / static_cast<double>(n_batches)) /
                static_cast<double>(cfg.epochs);
            lambda = lambda_at(progress, cfg.lambda);

            // ---- label classifier sub-process (source only) ----
            const std::size_t lo = b * static_cast<std::size_t>(batch);
            const std::size_t hi = std::min(lo + static_cast<std::size_t>(batch), n_train);
            const double inv_n = 1.0 / static_cast<double>(hi - lo);

            auto gf_grads = model.g_f.zero_gradients();
            auto gc_grads = model.g_c.zero_gradients();
            for (std::size_t k = lo; k < hi; ++k) {
                const std::size_t i = train_idx[k];
                const Vector x = sx.row(static_cast<Eigen::Index>(i)).transpose();
                const Vector f = model.g_f.forward_train(x, cfg.sgd.dropout_ratio,
                                                         &rng_label_drop);
                const Vector out = model.g_c.forward_train(f);
                const int y = source_y[i];
                // Cross-entropy of each sigmoid unit against the one-hot
                // label: the true unit is pulled toward 1, the other toward 0.
                // Training only the true unit leaves the losing unit free to
                // saturate and argmax degenerates to a constant.
                const double a = clamp_prob(out[y]);
                const double q = clamp_prob(out[1 - y]);
                epoch_label_loss += label_loss(a) + label_loss(1.0 - q);
                Vector dout = Vector::Zero(2);
                dout[y] = -inv_n / a;
                dout[1 - y] = inv_n / (1.0 - q);
                auto back_c = model.g_c.backward(dout);
                gc_grads += back_c.grads;
                gf_grads += model.g_f.backward(back_c.input_grad).grads;
            }
            label_samples += hi - lo;
            nn::sgd_step(model.g_c, gc_grads, cfg.sgd);
            nn::sgd_step(model.g_f, gf_grads, cfg.sgd);

            // ---- domain classifier sub-process (mixed batch) ----
            if (cfg.train_domain_path) {
                const std::size_t half = std::max<std::size_t>(
                    1, static_cast<std::size_t>(batch) / 2);
                auto gd_grads = model.g_d.zero_gradients();
                auto gf_dom_grads = model.g_f.zero_gradients();
                const double inv_half = 1.0 / static_cast<double>(half);

                for (int side = 0; side < 2; ++side) {  // 0 = source, 1 = target
                    for (std::size_t k = 0; k < half; ++k) {
                        Vector x;
                        if (side == 0) {
                            const std::size_t i =
                                domain_src_order[domain_src_cursor++ %
                                                 domain_src_order.size()];
                            x = sx.row(static_cast<Eigen::Index>(i)).transpose();
                        } else {
                            const std::size_t i =
                                target_order[target_cursor++ % target_order.size()];
                            x = tx.row(static_cast<Eigen::Index>(i)).transpose();
                        }
                        const Vector f = model.g_f.forward_train(
                            x, cfg.sgd.dropout_ratio, &rng_domain_drop);
                        const Vector out = model.g_d.forward_train(
                            f, cfg.sgd.dropout_ratio, &rng_domain_drop);
                        const double p = clamp_prob(out[1]);
                        epoch_domain_loss += inv_half * domain_loss(out[1], side);
                        // d/dp of Eq.-style binary cross-entropy on the
                        // target-domain unit; unit 0 carries no gradient.
                        Vector dout = Vector::Zero(2);
                        dout[1] = inv_half * (p - static_cast<double>(side)) /
                                  (p * (1.0 - p));
                        auto back_d = model.g_d.backward(dout);
                        gd_grads += back_d.grads;
                        const Vector rev = nn::grl_backward(back_d.input_grad, lambda);
                        gf_dom_grads += model.g_f.backward(rev).grads;
                    }
                }
                nn::sgd_step(model.g_d, gd_grads, cfg.sgd);
                nn::sgd_step(model.g_f, gf_dom_grads, cfg.sgd);
                ++domain_batches;
            }
        }

        EpochRecord rec;
        rec.label_loss = epoch_label_loss / static_cast<double>(label_samples);
        rec.domain_loss = domain_batches > 0
                              ? epoch_domain_loss / static_cast<double>(domain_batches)
                              : 0.0;
        rec.lambda_value = lambda;
        rec.validation_f1 = validation_f1(model, sx, source_y, val_idx);
        if (!std::isfinite(rec.label_loss) || !std::isfinite(rec.domain_loss))
            throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch),
                                  epoch);
        history.push_back(rec);

        // ties keep the most recent model: at equal source accuracy the
        // later epochs carry more of the domain-invariance progress
        if (rec.validation_f1 >= best_f1) {
            if (rec.validation_f1 > best_f1) since_best = 0;
            best_f1 = rec.validation_f1;
            best = model;
        } else if (++since_best >= cfg.early_stop_patience) {
            break;
        }
    }

    return {best, history};
}

FeatureMatrix extract_features(const DannModel& model, const FeatureMatrix& x) {
    if (x.cols() != static_cast<std::size_t>(kInputDim))
        throw ShapeError("feature matrix must have 39 columns");
    FeatureMatrix out;
    out.values.resize(x.values.rows(), kFeatureDim);
    for (Eigen::Index r = 0; r < x.values.rows(); ++r)
        out.values.row(r) = model.g_f.forward(x.values.row(r).transpose()).transpose();
    for (int i = 0; i < kFeatureDim; ++i)
        out.column_names.push_back("f" + std::to_string(i));
    return out;
}

std::vector<int> predict_labels(const DannModel& model, const FeatureMatrix& x) {
    if (x.cols() != static_cast<std::size_t>(kInputDim))
        throw ShapeError("feature matrix must have 39 columns");
    std::vector<int> out;
    out.reserve(x.rows());
    for (Eigen::Index r = 0; r < x.values.rows(); ++r) {
        const Vector f = model.g_f.forward(x.values.row(r).transpose());
        out.push_back(argmax2(model.g_c.forward(f)));
    }
    return out;
}

std::vector<int> predict_domain(const DannModel& model, const FeatureMatrix& x) {
    if (x.cols() != static_cast<std::size_t>(kInputDim))
        throw ShapeError("feature matrix must have 39 columns");
    std::vector<int> out;
    out.reserve(x.rows());
    for (Eigen::Index r = 0; r < x.values.rows(); ++r) {
        const Vector f = model.g_f.forward(x.values.row(r).transpose());
        out.push_back(argmax2(model.g_d.forward(f)));
    }
    return out;
}

}  // namespace dinids::dann
