#include "dinids/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace dinids::eval {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// PCA embedding

namespace {

Vector power_iteration(const Matrix& cov, std::mt19937_64& rng, double* eigenvalue) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector v = Vector::NullaryExpr(cov.rows(), [&] { return u(rng); });
    v.normalize();
    for (int it = 0; it < 1000; ++it) {
        Vector w = cov * v;
        const double norm = w.norm();
        if (norm < 1e-300) {
            *eigenvalue = 0.0;
            return v;
        }
        w /= norm;
        const double delta = (w - v).norm();
        v = w;
        if (delta < 1e-12) break;
    }
    *eigenvalue = v.dot(cov * v);
    return v;
}

}  // namespace

EmbeddingExport pca_embed(const FeatureMatrix& x, int dims, std::size_t sample_n,
                          std::uint64_t seed, const std::vector<int>& domain_tags) {
    if (dims < 1 || dims > static_cast<int>(x.cols()))
        throw std::invalid_argument("dims must be in [1, columns]");
    if (sample_n > x.rows())
        throw std::invalid_argument("sample_n exceeds row count");
    if (!domain_tags.empty() && domain_tags.size() != x.rows())
        throw ShapeError("domain tag count != row count");

    EmbeddingExport out;
    out.row_indices.resize(x.rows());
    std::iota(out.row_indices.begin(), out.row_indices.end(), 0);
    auto rng = make_rng(seed, RngStream::embed);
    if (sample_n > 0 && sample_n < x.rows()) {
        std::shuffle(out.row_indices.begin(), out.row_indices.end(), rng);
        out.row_indices.resize(sample_n);
        std::sort(out.row_indices.begin(), out.row_indices.end());
    }

    const std::size_t m = out.row_indices.size();
    Matrix sub(static_cast<Eigen::Index>(m), x.values.cols());
    for (std::size_t i = 0; i < m; ++i)
        sub.row(static_cast<Eigen::Index>(i)) =
            x.values.row(static_cast<Eigen::Index>(out.row_indices[i]));
    const Eigen::RowVectorXd mean = sub.colwise().mean();
    sub.rowwise() -= mean;

    Matrix cov = (sub.transpose() * sub) /
                 std::max<double>(1.0, static_cast<double>(m) - 1.0);

    out.coords.resize(static_cast<Eigen::Index>(m), dims);
    for (int c = 0; c < dims; ++c) {
        double eigenvalue = 0.0;
        Vector v = power_iteration(cov, rng, &eigenvalue);
        if (eigenvalue <= 1e-12) {
            out.coords.rightCols(dims - c).setZero();
            out.rank_deficient = true;
            break;
        }
        out.coords.col(c) = sub * v;
        cov -= eigenvalue * v * v.transpose();
    }

    if (!domain_tags.empty())
        for (auto i : out.row_indices) out.domain.push_back(domain_tags[i]);
    return out;
}

double separation_ratio(const EmbeddingExport& emb) {
    if (emb.domain.size() != static_cast<std::size_t>(emb.coords.rows()))
        throw ShapeError("embedding has no per-row domain tags");
    Eigen::RowVectorXd c0 = Eigen::RowVectorXd::Zero(emb.coords.cols());
    Eigen::RowVectorXd c1 = c0;
    std::size_t n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < emb.domain.size(); ++i) {
        if (emb.domain[i] == 0) {
            c0 += emb.coords.row(static_cast<Eigen::Index>(i));
            ++n0;
        } else {
            c1 += emb.coords.row(static_cast<Eigen::Index>(i));
            ++n1;
        }
    }
    if (n0 == 0 || n1 == 0) throw DataError("both domains must be present");
    c0 /= static_cast<double>(n0);
    c1 /= static_cast<double>(n1);
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i < emb.domain.size(); ++i) {
        const auto row = emb.coords.row(static_cast<Eigen::Index>(i));
        if (emb.domain[i] == 0)
            s0 += (row - c0).squaredNorm();
        else
            s1 += (row - c1).squaredNorm();
    }
    const double spread = 0.5 * (std::sqrt(s0 / static_cast<double>(n0)) +
                                 std::sqrt(s1 / static_cast<double>(n1)));
    if (spread <= 0.0) return std::numeric_limits<double>::infinity();
    return (c0 - c1).norm() / spread;
}

// ---------------------------------------------------------------------------
// Pipelines

std::string pipeline_name(PipelineKind k) {
    switch (k) {
        case PipelineKind::di_nids: return "DI-NIDS";
        case PipelineKind::dann_classifier: return "DANN";
        case PipelineKind::feed_forward: return "FeedForward";
        case PipelineKind::osvm_raw: return "OSVM";
    }
    return "?";
}

namespace {

Matrix benign_rows(const FeatureMatrix& x, const std::vector<int>& y,
                   std::size_t cap, std::uint64_t seed) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] == 0) idx.push_back(i);
    if (idx.empty()) throw DataError("no benign rows to train the one-class stage");
    if (cap > 0 && idx.size() > cap) {
        auto rng = make_rng(seed, RngStream::osvm);
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(cap);
        std::sort(idx.begin(), idx.end());
    }
    Matrix out(static_cast<Eigen::Index>(idx.size()), x.values.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) =
            x.values.row(static_cast<Eigen::Index>(idx[i]));
    return out;
}

}  // namespace

TrainedPipeline train_pipeline(PipelineKind kind, const FeatureMatrix& source_x,
                               const std::vector<int>& source_y,
                               const FeatureMatrix& target_x,
                               const PipelineConfig& cfg) {
    cfg.validate();
    TrainedPipeline p;
    p.kind = kind;

    if (kind == PipelineKind::osvm_raw) {
        Matrix train = benign_rows(source_x, source_y, cfg.osvm_max_train,
                                   cfg.osvm.seed);
        p.osvm_model = osvm::train_osvm(train, cfg.osvm);
        return p;
    }

    dann::DannTrainConfig dcfg = cfg.dann;
    if (kind == PipelineKind::feed_forward) dcfg.train_domain_path = false;
    auto trained = dann::train_dann(source_x, source_y, target_x, dcfg);
    p.dann_model = std::move(trained.model);
    p.history = std::move(trained.history);

    if (kind == PipelineKind::di_nids) {
        FeatureMatrix projected = dann::extract_features(*p.dann_model, source_x);
        Matrix train = benign_rows(projected, source_y, cfg.osvm_max_train,
                                   cfg.osvm.seed);
        p.osvm_model = osvm::train_osvm(train, cfg.osvm);
    }
    return p;
}

std::vector<int> pipeline_predict(const TrainedPipeline& p, const FeatureMatrix& x) {
    switch (p.kind) {
        case PipelineKind::feed_forward:
        case PipelineKind::dann_classifier:
            return dann::predict_labels(*p.dann_model, x);
        case PipelineKind::osvm_raw: {
            std::vector<int> out;
            out.reserve(x.rows());
            for (Eigen::Index r = 0; r < x.values.rows(); ++r)
                out.push_back(osvm::predict(*p.osvm_model,
                                            x.values.row(r).transpose()) ==
                                      osvm::FlowClass::anomaly
                                  ? 1
                                  : 0);
            return out;
        }
        case PipelineKind::di_nids: {
            FeatureMatrix projected = dann::extract_features(*p.dann_model, x);
            std::vector<int> out;
            out.reserve(x.rows());
            for (Eigen::Index r = 0; r < projected.values.rows(); ++r)
                out.push_back(osvm::predict(*p.osvm_model,
                                            projected.values.row(r).transpose()) ==
                                      osvm::FlowClass::anomaly
                                  ? 1
                                  : 0);
            return out;
        }
    }
    throw StateError("unknown pipeline kind");
}

// ---------------------------------------------------------------------------
// Protocols

namespace {

FeatureMatrix take_matrix_rows(const FeatureMatrix& x,
                               const std::vector<std::size_t>& idx) {
    FeatureMatrix out;
    out.column_names = x.column_names;
    out.values.resize(static_cast<Eigen::Index>(idx.size()), x.values.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
        out.values.row(static_cast<Eigen::Index>(i)) =
            x.values.row(static_cast<Eigen::Index>(idx[i]));
    return out;
}

std::vector<int> take_labels(const std::vector<int>& y,
                             const std::vector<std::size_t>& idx) {
    std::vector<int> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(y[i]);
    return out;
}

MetricsReport mean_reports(const std::vector<MetricsReport>& reports) {
    MetricsReport mean;
    for (const auto& r : reports) {
        mean.precision += r.precision;
        mean.recall += r.recall;
        mean.f1 += r.f1;
        mean.accuracy += r.accuracy;
        mean.support_pos += r.support_pos;
        mean.support_neg += r.support_neg;
        mean.degenerate = mean.degenerate || r.degenerate;
    }
    const double n = static_cast<double>(reports.size());
    mean.precision /= n;
    mean.recall /= n;
    mean.f1 /= n;
    mean.accuracy /= n;
    return mean;
}

PipelineConfig seeded(const PipelineConfig& base, std::uint64_t seed) {
    PipelineConfig cfg = base;
    cfg.dann.sgd.seed = seed;
    cfg.osvm.seed = seed;
    return cfg;
}

}  // namespace

MetricsReport run_domain_specific(PipelineKind kind, const LabeledData& data,
                                  const EvalConfig& cfg) {
    std::vector<MetricsReport> folds;
    for (int f = 0; f < cfg.folds; ++f) {
        const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(f);
        auto [train_idx, test_idx] =
            dataset::split_indices(data.x.rows(), cfg.test_split, seed);
        const FeatureMatrix train_x = take_matrix_rows(data.x, train_idx);
        const FeatureMatrix test_x = take_matrix_rows(data.x, test_idx);
        const auto train_y = take_labels(data.y, train_idx);
        const auto test_y = take_labels(data.y, test_idx);
        try {
            // dann-based pipelines use the unlabeled test rows as the target
            // domain; their labels are only read for scoring below.
            auto p = train_pipeline(kind, train_x, train_y, test_x,
                                    seeded(cfg.pipeline, seed));
            folds.push_back(metrics(confusion(test_y, pipeline_predict(p, test_x))));
        } catch (const std::exception& e) {
            throw DataError("fold " + std::to_string(f) + ": " + e.what());
        }
    }
    return mean_reports(folds);
}

MetricsReport run_cross_domain(PipelineKind kind, const LabeledData& source,
                               const LabeledData& target, const EvalConfig& cfg) {
    std::vector<MetricsReport> folds;
    for (int f = 0; f < cfg.folds; ++f) {
        const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(f);
        auto [tgt_train_idx, tgt_test_idx] =
            dataset::split_indices(target.x.rows(), cfg.test_split, seed);
        const FeatureMatrix tgt_train = take_matrix_rows(target.x, tgt_train_idx);
        const FeatureMatrix tgt_test = take_matrix_rows(target.x, tgt_test_idx);
        const auto test_y = take_labels(target.y, tgt_test_idx);
        try {
            auto p = train_pipeline(kind, source.x, source.y, tgt_train,
                                    seeded(cfg.pipeline, seed));
            folds.push_back(metrics(confusion(test_y, pipeline_predict(p, tgt_test))));
        } catch (const std::exception& e) {
            throw DataError("fold " + std::to_string(f) + ": " + e.what());
        }
    }
    return mean_reports(folds);
}

// ---------------------------------------------------------------------------
// Comparison report

ProtocolReport build_comparison_report(const std::vector<ModelResults>& results) {
    if (results.empty()) throw DataError("no results to report");
    ProtocolReport report;
    for (const auto& r : results) {
        ModelSummary s;
        s.model = r.model;
        s.ds_f1 = r.ds_f1;
        s.cross = r.cross;
        double cd_sum = 0.0, deg_sum = 0.0;
        std::size_t deg_count = 0;
        for (const auto& c : r.cross) {
            cd_sum += c.f1;
            auto it = r.ds_f1.find(c.train_dataset);
            if (it == r.ds_f1.end()) {
                s.degradation.push_back(std::numeric_limits<double>::quiet_NaN());
                s.missing_directions.push_back(c.train_dataset + "->" +
                                               c.test_dataset);
            } else {
                s.degradation.push_back(degradation(it->second, c.f1));
                deg_sum += s.degradation.back();
                ++deg_count;
            }
        }
        if (!r.cross.empty())
            s.avg_cd_f1 = cd_sum / static_cast<double>(r.cross.size());
        if (deg_count > 0)
            s.avg_degradation = deg_sum / static_cast<double>(deg_count);
        report.models.push_back(std::move(s));
    }
    return report;
}

std::string render_report_table(const ProtocolReport& report) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << std::left << std::setw(14) << "Model" << std::setw(18) << "Train"
       << std::setw(18) << "Test" << std::right << std::setw(10) << "F1(%)"
       << std::setw(10) << "Degr(%)" << std::setw(12) << "AvgDegr(%)" << "\n";
    os << std::string(82, '-') << "\n";
    for (const auto& m : report.models) {
        for (const auto& [ds, f1] : m.ds_f1) {
            os << std::left << std::setw(14) << m.model << std::setw(18) << ds
               << std::setw(18) << ds << std::right << std::setw(10) << f1
               << std::setw(10) << "-" << std::setw(12) << "-" << "\n";
        }
        for (std::size_t i = 0; i < m.cross.size(); ++i) {
            os << std::left << std::setw(14) << m.model << std::setw(18)
               << m.cross[i].train_dataset << std::setw(18)
               << m.cross[i].test_dataset << std::right << std::setw(10)
               << m.cross[i].f1;
            if (std::isnan(m.degradation[i]))
                os << std::setw(10) << "absent";
            else
                os << std::setw(10) << m.degradation[i];
            if (i + 1 == m.cross.size() && m.avg_degradation)
                os << std::setw(12) << *m.avg_degradation;
            else
                os << std::setw(12) << "";
            os << "\n";
        }
        if (m.avg_cd_f1)
            os << std::left << std::setw(14) << m.model
               << "avg cross-domain F1: " << *m.avg_cd_f1 << "\n";
        os << std::string(82, '-') << "\n";
    }
    return os.str();
}

std::string report_to_json(const ProtocolReport& report) {
    json j = json::array();
    for (const auto& m : report.models) {
        json jm;
        jm["model"] = m.model;
        jm["domain_specific_f1"] = m.ds_f1;
        jm["cross_domain"] = json::array();
        for (std::size_t i = 0; i < m.cross.size(); ++i) {
            json jc;
            jc["train"] = m.cross[i].train_dataset;
            jc["test"] = m.cross[i].test_dataset;
            jc["f1"] = m.cross[i].f1;
            if (std::isnan(m.degradation[i]))
                jc["degradation"] = nullptr;
            else
                jc["degradation"] = m.degradation[i];
            jm["cross_domain"].push_back(jc);
        }
        if (m.avg_cd_f1) jm["avg_cross_domain_f1"] = *m.avg_cd_f1;
        if (m.avg_degradation) jm["avg_degradation"] = *m.avg_degradation;
        if (!m.missing_directions.empty())
            jm["missing_directions"] = m.missing_directions;
        j.push_back(jm);
    }
    return j.dump(2);
}

ProtocolReport report_from_json(const std::string& json_text) {
    json j = json::parse(json_text);
    ProtocolReport report;
    for (const auto& jm : j) {
        ModelSummary m;
        m.model = jm.at("model").get<std::string>();
        for (auto it = jm.at("domain_specific_f1").begin();
             it != jm.at("domain_specific_f1").end(); ++it)
            m.ds_f1[it.key()] = it.value().get<double>();
        for (const auto& jc : jm.at("cross_domain")) {
            DirectionResult d;
            d.train_dataset = jc.at("train").get<std::string>();
            d.test_dataset = jc.at("test").get<std::string>();
            d.f1 = jc.at("f1").get<double>();
            m.cross.push_back(d);
            if (jc.at("degradation").is_null())
                m.degradation.push_back(std::numeric_limits<double>::quiet_NaN());
            else
                m.degradation.push_back(jc.at("degradation").get<double>());
        }
        if (jm.contains("avg_cross_domain_f1"))
            m.avg_cd_f1 = jm.at("avg_cross_domain_f1").get<double>();
        if (jm.contains("avg_degradation"))
            m.avg_degradation = jm.at("avg_degradation").get<double>();
        if (jm.contains("missing_directions"))
            for (const auto& s : jm.at("missing_directions"))
                m.missing_directions.push_back(s.get<std::string>());
        report.models.push_back(std::move(m));
    }
    return report;
}

std::vector<ModelResults> reference_results() {
    const std::string cic = "NFv2-CIC-2018";
    const std::string unsw = "NFv2-UNSW-NB15";
    std::vector<ModelResults> out;
    out.push_back({"DI-NIDS",
                   {{cic, 93.23}, {unsw, 98.68}},
                   {{cic, unsw, 85.79}, {unsw, cic, 93.29}}});
    out.push_back({"OSVM",
                   {{cic, 92.97}, {unsw, 98.28}},
                   {{cic, unsw, 86.15}, {unsw, cic, 15.74}}});
    out.push_back({"DANN",
                   {{cic, 97.81}, {unsw, 93.38}},
                   {{cic, unsw, 17.31}, {unsw, cic, 61.94}}});
    out.push_back({"FeedForward",
                   {{cic, 97.72}, {unsw, 92.24}},
                   {{cic, unsw, 3.09}, {unsw, cic, 30.79}}});
    return out;
}

}  // namespace dinids::eval
