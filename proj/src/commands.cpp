#include "dinids/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dinids/eval.hpp"

namespace dinids::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string resolve_data_path(const std::string& path) {
    if (fs::exists(path)) return path;
    if (const char* root = std::getenv("DINIDS_DATA_DIR")) {
        const fs::path candidate = fs::path(root) / path;
        if (fs::exists(candidate)) return candidate.string();
    }
    return path;
}

namespace {

struct IngestedDataset {
    dataset::FlowTable table;
    dataset::FeatureMatrix features;
};

IngestedDataset ingest(const std::string& csv, const std::string& schema_path,
                       const std::string& name, std::size_t subsample,
                       std::uint64_t seed) {
    const auto schema = dataset::Schema::load(resolve_data_path(schema_path));
    dataset::LoadOptions opts;
    opts.dataset_name = name;
    IngestedDataset d;
    d.table = dataset::load_netflow_csv(resolve_data_path(csv), schema, opts);
    if (subsample > 0 && subsample < d.table.rows())
        d.table = dataset::stratified_sample(d.table, subsample, seed);
    dataset::binarize_labels(d.table);
    d.features = dataset::select_features(d.table);
    return d;
}

json meta_to_json(const dataset::DatasetMeta& meta) {
    json j;
    j["name"] = meta.name;
    j["n_flows"] = meta.n_flows;
    j["benign_fraction"] = meta.benign_fraction;
    j["n_attack_classes"] = meta.attack_class_counts.size();
    j["attack_class_counts"] = meta.attack_class_counts;
    return j;
}

void append_ledger(const std::string& ledger_path, const json& row) {
    std::ofstream out(ledger_path, std::ios::app);
    if (!out) throw DataError("cannot append to ledger: " + ledger_path);
    out << row.dump() << "\n";
}

}  // namespace

int cmd_ingest(const IngestArgs& args) {
    try {
        auto d = ingest(args.dataset_csv, args.schema_path, args.name,
                        args.subsample, args.seed);
        fs::create_directories(args.output_dir);
        const fs::path base(args.output_dir);
        const std::string stem = args.name.empty() ? "dataset" : args.name;

        dataset::save_matrix((base / (stem + ".features.mat")).string(), d.features);
        {
            std::ofstream labels(base / (stem + ".labels.txt"));
            for (std::size_t i = 0; i < d.table.rows(); ++i)
                labels << d.table.binary_labels[i] << " " << d.table.labels[i] << "\n";
        }
        json summary = meta_to_json(d.table.meta);
        summary["subsample"] = args.subsample;
        summary["seed"] = args.seed;
        {
            std::ofstream out(base / (stem + ".summary.json"));
            out << summary.dump(2) << "\n";
        }
        std::cout << summary.dump(2) << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "ingest: " << e.what() << "\n";
        return kExitInputError;
    }
}

int cmd_train(const RunConfig& cfg) {
    try {
        const auto kind = pipeline_kind_from_string(cfg.pipeline_kind);
        auto source = ingest(cfg.source_csv, cfg.schema_path, "source",
                             cfg.subsample, cfg.subsample_seed);
        IngestedDataset target;
        const bool needs_target = kind == eval::PipelineKind::di_nids ||
                                  kind == eval::PipelineKind::dann_classifier;
        if (needs_target) {
            if (cfg.target_csv.empty())
                throw DataError("pipeline " + cfg.pipeline_kind +
                                " requires target.csv");
            target = ingest(cfg.target_csv, cfg.schema_path, "target",
                            cfg.subsample, cfg.subsample_seed);
        }

        const auto scaler = dataset::fit_scaler(source.features);
        const auto sx = dataset::apply_scaler(scaler, source.features);
        dataset::FeatureMatrix tx;
        if (needs_target) tx = dataset::apply_scaler(scaler, target.features);

        auto pipeline = eval::train_pipeline(kind, sx, source.table.binary_labels,
                                             tx, cfg.pipeline);

        ModelBundle bundle;
        bundle.scaler = scaler;
        bundle.dann_model = pipeline.dann_model
                                ? *pipeline.dann_model
                                : dann::DannModel::init(cfg.pipeline.dann.sgd.seed);
        bundle.osvm_model = pipeline.osvm_model;
        bundle.provenance.config_hash = config_hash(cfg.raw_text);
        bundle.provenance.seed = cfg.pipeline.dann.sgd.seed;
        bundle.provenance.tool_version = kToolVersion;
        bundle.provenance.pipeline_kind = cfg.pipeline_kind;
        bundle.provenance.dataset_metas.push_back(source.table.meta);
        if (needs_target)
            bundle.provenance.dataset_metas.push_back(target.table.meta);

        const fs::path out(cfg.output_dir);
        save_bundle((out / "bundle").string(), bundle);
        {
            std::ofstream hist(out / "history.tsv");
            hist << "epoch\tlabel_loss\tdomain_loss\tval_f1\tlambda\n";
            hist.precision(17);
            for (std::size_t e = 0; e < pipeline.history.size(); ++e)
                hist << e << "\t" << pipeline.history[e].label_loss << "\t"
                     << pipeline.history[e].domain_loss << "\t"
                     << pipeline.history[e].validation_f1 << "\t"
                     << pipeline.history[e].lambda_value << "\n";
        }
        std::cout << "bundle written to " << (out / "bundle").string() << "\n";
        return kExitOk;
    } catch (const DivergenceError& e) {
        std::cerr << "train: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const std::exception& e) {
        std::cerr << "train: " << e.what() << "\n";
        return kExitInputError;
    }
}

int cmd_eval(const EvalArgs& args) {
    try {
        auto bundle = load_bundle(args.bundle_dir);
        auto data = ingest(args.dataset_csv, args.schema_path, args.dataset_name,
                           0, args.seed);
        if (bundle.scaler.min.size() != data.features.cols())
            throw DataError("schema drift: bundle expects " +
                            std::to_string(bundle.scaler.min.size()) +
                            " features, dataset has " +
                            std::to_string(data.features.cols()));
        const auto x = dataset::apply_scaler(bundle.scaler, data.features);

        eval::TrainedPipeline p;
        p.kind = pipeline_kind_from_string(bundle.provenance.pipeline_kind);
        p.dann_model = bundle.dann_model;
        p.osvm_model = bundle.osvm_model;

        // Self mode scores the held-out split only; cross mode scores all rows.
        std::vector<int> y_true;
        std::vector<int> y_pred;
        if (args.cross) {
            y_true = data.table.binary_labels;
            y_pred = eval::pipeline_predict(p, x);
        } else {
            auto [train_idx, test_idx] =
                dataset::split_indices(x.rows(), args.test_split, args.seed);
            dataset::FeatureMatrix test_x;
            test_x.column_names = x.column_names;
            test_x.values.resize(static_cast<Eigen::Index>(test_idx.size()),
                                 x.values.cols());
            for (std::size_t i = 0; i < test_idx.size(); ++i) {
                test_x.values.row(static_cast<Eigen::Index>(i)) =
                    x.values.row(static_cast<Eigen::Index>(test_idx[i]));
                y_true.push_back(data.table.binary_labels[test_idx[i]]);
            }
            y_pred = eval::pipeline_predict(p, test_x);
        }
        const auto report = eval::metrics(eval::confusion(y_true, y_pred));

        const std::string train_name = bundle.provenance.dataset_metas.empty()
                                           ? "unknown"
                                           : bundle.provenance.dataset_metas[0].name;
        json row;
        row["model"] = eval::pipeline_name(p.kind);
        row["mode"] = args.cross ? "cross" : "self";
        row["train_dataset"] = train_name;
        row["test_dataset"] = data.table.meta.name;
        row["f1"] = report.f1 * 100.0;
        row["precision"] = report.precision;
        row["recall"] = report.recall;
        row["accuracy"] = report.accuracy;
        row["config_hash"] = bundle.provenance.config_hash;
        row["seed"] = args.seed;
        if (report.degenerate) row["warning"] = "degenerate metric denominator";

        fs::create_directories(args.output_dir);
        const fs::path out(args.output_dir);
        {
            std::ofstream rf(out / ("eval_" + data.table.meta.name + "_" +
                                    row["mode"].get<std::string>() + ".json"));
            rf << row.dump(2) << "\n";
        }
        append_ledger((out / "ledger.jsonl").string(), row);
        std::cout << row.dump(2) << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "eval: " << e.what() << "\n";
        return kExitInputError;
    }
}

int cmd_report(const std::string& ledger_path, const std::string& output_dir,
               bool with_reference) {
    try {
        std::ifstream in(ledger_path);
        std::vector<json> rows;
        std::string line;
        while (in && std::getline(in, line)) {
            if (line.empty()) continue;
            rows.push_back(json::parse(line));
        }
        if (rows.empty()) {
            std::cerr << "report: ledger is empty or missing: " << ledger_path
                      << "\n";
            return kExitEmptyLedger;
        }

        std::vector<eval::ModelResults> results;
        for (const auto& row : rows) {
            const std::string model = row.at("model").get<std::string>();
            auto it = std::find_if(results.begin(), results.end(),
                                   [&](const auto& r) { return r.model == model; });
            if (it == results.end()) {
                results.push_back({model, {}, {}});
                it = results.end() - 1;
            }
            if (row.at("mode") == "self")
                it->ds_f1[row.at("test_dataset").get<std::string>()] =
                    row.at("f1").get<double>();
            else
                it->cross.push_back({row.at("train_dataset").get<std::string>(),
                                     row.at("test_dataset").get<std::string>(),
                                     row.at("f1").get<double>()});
        }

        auto report = eval::build_comparison_report(results);
        std::string table = eval::render_report_table(report);
        if (with_reference) {
            table += "\nPublished full-scale reference values:\n";
            table += eval::render_report_table(
                eval::build_comparison_report(eval::reference_results()));
        }

        fs::create_directories(output_dir);
        const fs::path out(output_dir);
        {
            std::ofstream tf(out / "report.txt");
            tf << table;
        }
        {
            std::ofstream jf(out / "report.json");
            jf << eval::report_to_json(report) << "\n";
        }
        std::cout << table;
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "report: " << e.what() << "\n";
        return kExitInputError;
    }
}

int cmd_embed(const EmbedArgs& args) {
    try {
        auto source = ingest(args.source_csv, args.schema_path, "source", 0, args.seed);
        auto target = ingest(args.target_csv, args.schema_path, "target", 0, args.seed);

        dataset::ScalerParams scaler;
        std::optional<ModelBundle> bundle;
        if (!args.bundle_dir.empty()) {
            bundle = load_bundle(args.bundle_dir);
            scaler = bundle->scaler;
        } else {
            scaler = dataset::fit_scaler(source.features);
        }
        auto sx = dataset::apply_scaler(scaler, source.features);
        auto tx = dataset::apply_scaler(scaler, target.features);
        if (bundle) {
            sx = dann::extract_features(bundle->dann_model, sx);
            tx = dann::extract_features(bundle->dann_model, tx);
        }

        dataset::FeatureMatrix both;
        both.column_names = sx.column_names;
        both.values.resize(sx.values.rows() + tx.values.rows(), sx.values.cols());
        both.values.topRows(sx.values.rows()) = sx.values;
        both.values.bottomRows(tx.values.rows()) = tx.values;
        std::vector<int> tags(static_cast<std::size_t>(both.values.rows()), 1);
        std::fill(tags.begin(), tags.begin() + sx.values.rows(), 0);

        const std::size_t sample =
            std::min<std::size_t>(args.sample_n, static_cast<std::size_t>(both.values.rows()));
        auto emb = eval::pca_embed(both, 2, sample, args.seed, tags);

        std::ofstream out(args.output_csv);
        if (!out) throw DataError("cannot write " + args.output_csv);
        out.precision(17);
        out << "x,y,domain\n";
        for (Eigen::Index i = 0; i < emb.coords.rows(); ++i)
            out << emb.coords(i, 0) << "," << emb.coords(i, 1) << ","
                << emb.domain[static_cast<std::size_t>(i)] << "\n";
        std::cout << "embedding written to " << args.output_csv
                  << " (separation ratio " << eval::separation_ratio(emb) << ")\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "embed: " << e.what() << "\n";
        return kExitInputError;
    }
}

}  // namespace dinids::cli
