// Python bindings for the dinids core: adversarial training, feature
// projection, the one-class stage, metrics, and the drift embedding.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dinids/dann.hpp"
#include "dinids/eval.hpp"
#include "dinids/metrics.hpp"
#include "dinids/osvm.hpp"

namespace py = pybind11;
using namespace dinids;

namespace {

dataset::FeatureMatrix as_feature_matrix(const Matrix& values) {
    dataset::FeatureMatrix x;
    x.values = values;
    x.column_names.reserve(static_cast<std::size_t>(values.cols()));
    for (Eigen::Index c = 0; c < values.cols(); ++c)
        x.column_names.push_back("c" + std::to_string(c));
    return x;
}

dann::LambdaSchedule parse_lambda(const std::string& mode, double value) {
    if (mode == "scheduled") return {dann::LambdaMode::scheduled, value};
    if (mode == "fixed") return {dann::LambdaMode::fixed, value};
    throw py::value_error("lambda_mode must be 'scheduled' or 'fixed'");
}

dann::DannTrainConfig make_dann_config(int epochs, double learning_rate,
                                       int batch_size, double dropout,
                                       std::uint64_t seed,
                                       const std::string& lambda_mode,
                                       double lambda_value,
                                       bool train_domain_path) {
    dann::DannTrainConfig cfg;
    cfg.epochs = epochs;
    cfg.sgd.learning_rate = learning_rate;
    cfg.sgd.batch_size = batch_size;
    cfg.sgd.dropout_ratio = dropout;
    cfg.sgd.seed = seed;
    cfg.early_stop_patience = epochs;
    cfg.lambda = parse_lambda(lambda_mode, lambda_value);
    cfg.train_domain_path = train_domain_path;
    return cfg;
}

py::dict metrics_dict(const eval::MetricsReport& m) {
    py::dict d;
    d["precision"] = m.precision;
    d["recall"] = m.recall;
    d["f1"] = m.f1;
    d["accuracy"] = m.accuracy;
    d["support_pos"] = m.support_pos;
    d["support_neg"] = m.support_neg;
    d["degenerate"] = m.degenerate;
    return d;
}

}  // namespace

PYBIND11_MODULE(pydinids, m) {
    m.doc() = "Domain-invariant network intrusion detection core";

    py::class_<dann::DannModel>(m, "DannModel")
        .def_static("init", &dann::DannModel::init, py::arg("seed"))
        .def("extract_features",
             [](const dann::DannModel& model, const Matrix& x) {
                 return dann::extract_features(model, as_feature_matrix(x)).values;
             },
             py::arg("x"))
        .def("predict_labels",
             [](const dann::DannModel& model, const Matrix& x) {
                 return dann::predict_labels(model, as_feature_matrix(x));
             },
             py::arg("x"))
        .def("predict_domain",
             [](const dann::DannModel& model, const Matrix& x) {
                 return dann::predict_domain(model, as_feature_matrix(x));
             },
             py::arg("x"));

    m.def(
        "train_dann",
        [](const Matrix& source_x, const std::vector<int>& source_y,
           const Matrix& target_x, int epochs, double learning_rate,
           int batch_size, double dropout, std::uint64_t seed,
           const std::string& lambda_mode, double lambda_value,
           bool train_domain_path) {
            auto cfg = make_dann_config(epochs, learning_rate, batch_size,
                                        dropout, seed, lambda_mode,
                                        lambda_value, train_domain_path);
            auto result = dann::train_dann(as_feature_matrix(source_x), source_y,
                                           as_feature_matrix(target_x), cfg);
            py::list history;
            for (const auto& rec : result.history) {
                py::dict d;
                d["label_loss"] = rec.label_loss;
                d["domain_loss"] = rec.domain_loss;
                d["validation_f1"] = rec.validation_f1;
                d["lambda_value"] = rec.lambda_value;
                history.append(d);
            }
            return py::make_tuple(result.model, history);
        },
        py::arg("source_x"), py::arg("source_y"), py::arg("target_x"),
        py::arg("epochs") = 50, py::arg("learning_rate") = 1.0,
        py::arg("batch_size") = 32, py::arg("dropout") = 0.0,
        py::arg("seed") = 1, py::arg("lambda_mode") = "scheduled",
        py::arg("lambda_value") = 0.0, py::arg("train_domain_path") = true);

    py::class_<osvm::OsvmModel>(m, "OsvmModel")
        .def_readonly("rho", &osvm::OsvmModel::rho)
        .def_property_readonly("n_support",
                               [](const osvm::OsvmModel& m_) {
                                   return m_.alphas.size();
                               })
        .def("decision_function",
             [](const osvm::OsvmModel& model, const Matrix& x) {
                 Vector out(x.rows());
                 for (Eigen::Index r = 0; r < x.rows(); ++r)
                     out[r] = osvm::decision_function(model, x.row(r).transpose());
                 return out;
             },
             py::arg("x"))
        .def("predict",
             [](const osvm::OsvmModel& model, const Matrix& x) {
                 std::vector<int> out;
                 out.reserve(static_cast<std::size_t>(x.rows()));
                 for (Eigen::Index r = 0; r < x.rows(); ++r)
                     out.push_back(osvm::predict(model, x.row(r).transpose()) ==
                                           osvm::FlowClass::anomaly
                                       ? 1
                                       : 0);
                 return out;
             },
             py::arg("x"));

    m.def(
        "train_osvm",
        [](const Matrix& x, double nu, double gamma, double tolerance,
           std::uint64_t seed) {
            osvm::OsvmConfig cfg;
            cfg.nu = nu;
            cfg.kernel.gamma = gamma;
            cfg.tolerance = tolerance;
            cfg.seed = seed;
            return osvm::train_osvm(x, cfg);
        },
        py::arg("x"), py::arg("nu") = 0.05, py::arg("gamma") = -1.0,
        py::arg("tolerance") = 1e-4, py::arg("seed") = 0);

    m.def(
        "metrics",
        [](const std::vector<int>& y_true, const std::vector<int>& y_pred) {
            return metrics_dict(eval::metrics(eval::confusion(y_true, y_pred)));
        },
        py::arg("y_true"), py::arg("y_pred"));

    m.def("degradation", &eval::degradation, py::arg("ds_f1"), py::arg("cd_f1"));

    m.def(
        "pca_embed",
        [](const Matrix& x, int dims, std::size_t sample_n, std::uint64_t seed,
           const std::vector<int>& domain_tags) {
            const auto emb = eval::pca_embed(as_feature_matrix(x), dims,
                                             sample_n, seed, domain_tags);
            py::dict d;
            d["coords"] = emb.coords;
            d["domain"] = emb.domain;
            d["row_indices"] = emb.row_indices;
            d["rank_deficient"] = emb.rank_deficient;
            return d;
        },
        py::arg("x"), py::arg("dims") = 2, py::arg("sample_n") = 0,
        py::arg("seed") = 0, py::arg("domain_tags") = std::vector<int>{});

    m.def(
        "separation_ratio",
        [](const Matrix& coords, const std::vector<int>& domain) {
            eval::EmbeddingExport emb;
            emb.coords = coords;
            emb.domain = domain;
            return eval::separation_ratio(emb);
        },
        py::arg("coords"), py::arg("domain"));
}
