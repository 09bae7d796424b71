#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "dinids/commands.hpp"
#include "synthetic.hpp"

using namespace dinids;
using namespace dinids::cli;

namespace fs = std::filesystem;

namespace {

fs::path workspace() {
    const auto dir = fs::temp_directory_path() / "dinids_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string write_schema() {
    const auto path = workspace() / "flows_schema.txt";
    std::ofstream out(path);
    out << "id categorical identifier\n";
    for (int c = 0; c < 39; ++c) out << "c" << c << " numeric feature\n";
    out << "Label numeric label\n";
    out << "Attack label label\n";
    return path.string();
}

std::string write_flow_csv(const std::string& name,
                           const dataset::FeatureMatrix& x,
                           const std::vector<int>& y) {
    const auto path = workspace() / name;
    std::ofstream out(path);
    out.precision(17);
    out << "id";
    for (int c = 0; c < 39; ++c) out << ",c" << c;
    out << ",Label,Attack\n";
    for (Eigen::Index i = 0; i < x.values.rows(); ++i) {
        out << "h" << i;
        for (int c = 0; c < 39; ++c) out << "," << x.values(i, c);
        const int label = y[static_cast<std::size_t>(i)];
        out << "," << label << "," << (label ? "Exploits" : "Benign") << "\n";
    }
    return path.string();
}

}  // namespace

TEST_CASE("config parsing and hashing") {
    const std::string text =
        "# run settings\n"
        "source.csv = a.csv\n"
        "target.csv=b.csv\n"
        "schema=s.txt\n"
        "pipeline.kind=dann\n"
        "subsample.n=5000\n"
        "dann.epochs=7\n"
        "dann.learning_rate=0.01\n"
        "dann.lambda_fixed=0.25\n"
        "osvm.nu=0.2\n"
        "osvm.max_train=1234\n";
    const auto cfg = parse_config_text(text);
    CHECK(cfg.source_csv == "a.csv");
    CHECK(cfg.target_csv == "b.csv");
    CHECK(cfg.pipeline_kind == "dann");
    CHECK(cfg.subsample == 5000);
    CHECK(cfg.pipeline.dann.epochs == 7);
    CHECK(cfg.pipeline.dann.sgd.learning_rate == 0.01);
    CHECK(cfg.pipeline.dann.lambda.mode == dann::LambdaMode::fixed);
    CHECK(cfg.pipeline.dann.lambda.fixed_value == 0.25);
    CHECK(cfg.pipeline.osvm.nu == 0.2);
    CHECK(cfg.pipeline.osvm_max_train == 1234);

    CHECK_THROWS_AS(parse_config_text("no_equals_sign\n"), DataError);
    CHECK_THROWS_AS(parse_config_text("nonsense.key=1\n"), DataError);
    CHECK_THROWS_AS(parse_config_text("dann.epochs=abc\n"), DataError);
    CHECK_THROWS_AS(parse_config_text("dann.lambda_mode=sometimes\n"), DataError);

    // hash runs over the normalized text: comments and spacing are immaterial
    const auto h1 = config_hash(cfg.raw_text);
    const auto h2 = config_hash(
        parse_config_text("source.csv=a.csv\n").raw_text);
    CHECK(h1.size() == 16);
    CHECK(h1.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(h1 != h2);
    const auto spaced = parse_config_text("source.csv   =   a.csv   # note\n");
    CHECK(config_hash(spaced.raw_text) == h2);
    CHECK(config_hash(cfg.raw_text) == h1);
}

TEST_CASE("pipeline_kind_from_string") {
    CHECK(pipeline_kind_from_string("di_nids") == eval::PipelineKind::di_nids);
    CHECK(pipeline_kind_from_string("di-nids") == eval::PipelineKind::di_nids);
    CHECK(pipeline_kind_from_string("dann") == eval::PipelineKind::dann_classifier);
    CHECK(pipeline_kind_from_string("ff") == eval::PipelineKind::feed_forward);
    CHECK(pipeline_kind_from_string("osvm") == eval::PipelineKind::osvm_raw);
    CHECK_THROWS_AS(pipeline_kind_from_string("svm"), DataError);
}

TEST_CASE("bundle round-trip is bit-exact") {
    ModelBundle bundle;
    bundle.dann_model = dann::DannModel::init(5);
    bundle.scaler.min = {0.0, -1.5, 0.25};
    bundle.scaler.max = {1.0, 2.5, 0.75};

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix sv = Matrix::NullaryExpr(20, 10, [&] { return u(rng); });
    osvm::OsvmConfig ocfg;
    ocfg.nu = 0.3;
    bundle.osvm_model = osvm::train_osvm(sv, ocfg);

    bundle.provenance.config_hash = "00ff00ff00ff00ff";
    bundle.provenance.seed = 42;
    bundle.provenance.tool_version = kToolVersion;
    bundle.provenance.pipeline_kind = "di_nids";
    dataset::DatasetMeta meta;
    meta.name = "toy";
    meta.n_flows = 20;
    meta.benign_fraction = 0.5;
    bundle.provenance.dataset_metas.push_back(meta);

    const auto dir = (workspace() / "bundle_roundtrip").string();
    save_bundle(dir, bundle);
    const auto back = load_bundle(dir);

    CHECK(back.dann_model.g_f.equals(bundle.dann_model.g_f));
    CHECK(back.dann_model.g_c.equals(bundle.dann_model.g_c));
    CHECK(back.dann_model.g_d.equals(bundle.dann_model.g_d));
    CHECK(back.scaler.min == bundle.scaler.min);
    CHECK(back.scaler.max == bundle.scaler.max);
    REQUIRE(back.osvm_model.has_value());
    CHECK(back.osvm_model->rho == bundle.osvm_model->rho);
    CHECK(back.osvm_model->kernel.gamma == bundle.osvm_model->kernel.gamma);
    CHECK(back.osvm_model->alphas.cwiseEqual(bundle.osvm_model->alphas).all());
    CHECK(back.osvm_model->support_vectors
              .cwiseEqual(bundle.osvm_model->support_vectors)
              .all());
    CHECK(back.provenance.config_hash == "00ff00ff00ff00ff");
    CHECK(back.provenance.seed == 42);
    CHECK(back.provenance.pipeline_kind == "di_nids");
    REQUIRE(back.provenance.dataset_metas.size() == 1);
    CHECK(back.provenance.dataset_metas[0].name == "toy");

    // decision values from the reloaded model are bitwise identical
    dataset::FeatureMatrix probe;
    probe.values = Matrix::NullaryExpr(7, 39, [&] { return 0.5 + 0.1 * u(rng); });
    const auto f1 = dann::extract_features(bundle.dann_model, probe);
    const auto f2 = dann::extract_features(back.dann_model, probe);
    CHECK(f1.values.cwiseEqual(f2.values).all());
    for (Eigen::Index i = 0; i < f1.values.rows(); ++i) {
        const Vector q = f1.values.row(i).transpose();
        CHECK(osvm::decision_function(*bundle.osvm_model, q) ==
              osvm::decision_function(*back.osvm_model, q));
    }
}

TEST_CASE("tampered bundle is rejected on load") {
    ModelBundle bundle;
    bundle.dann_model = dann::DannModel::init(2);
    bundle.scaler.min = {0.0};
    bundle.scaler.max = {1.0};
    Matrix sv(6, 2);
    sv << 0.0, 0.1, 0.2, 0.0, 0.1, 0.1, 0.0, 0.0, 0.2, 0.2, 0.1, 0.0;
    osvm::OsvmConfig ocfg;
    ocfg.nu = 0.5;
    bundle.osvm_model = osvm::train_osvm(sv, ocfg);
    bundle.provenance.tool_version = kToolVersion;
    bundle.provenance.pipeline_kind = "di_nids";
    bundle.osvm_model->alphas *= 3.0;  // breaks the simplex constraint

    const auto dir = (workspace() / "bundle_tampered").string();
    save_bundle(dir, bundle);
    CHECK_THROWS_AS(load_bundle(dir), DataError);

    CHECK_THROWS_AS(load_bundle((workspace() / "no_bundle_here").string()),
                    DataError);
}

TEST_CASE("resolve_data_path falls back to DINIDS_DATA_DIR") {
    const auto root = workspace() / "data_root";
    fs::create_directories(root);
    {
        std::ofstream out(root / "relative_only.csv");
        out << "x\n";
    }
    setenv("DINIDS_DATA_DIR", root.string().c_str(), 1);
    CHECK(resolve_data_path("relative_only.csv") ==
          (root / "relative_only.csv").string());
    CHECK(resolve_data_path("never_exists.csv") == "never_exists.csv");
    // an existing path wins over the environment root
    const auto direct = (root / "relative_only.csv").string();
    CHECK(resolve_data_path(direct) == direct);
    unsetenv("DINIDS_DATA_DIR");
    CHECK(resolve_data_path("relative_only.csv") == "relative_only.csv");
}

TEST_CASE("train / eval / report command flow") {
    auto data = testing::make_shift_data(220, 220, 41);
    const auto schema = write_schema();
    const auto src = write_flow_csv("cmd_source.csv", data.source_x, data.source_y);
    const auto tgt = write_flow_csv("cmd_target.csv", data.target_x, data.target_y);
    const auto out_dir = (workspace() / "run_out").string();
    fs::remove_all(out_dir);

    const std::string cfg_text =
        "source.csv=" + src + "\n" +
        "target.csv=" + tgt + "\n" +
        "schema=" + schema + "\n" +
        "output.dir=" + out_dir + "\n" +
        "pipeline.kind=di_nids\n"
        "dann.epochs=3\n"
        "dann.learning_rate=0.2\n"
        "dann.batch_size=32\n"
        "dann.dropout=0\n"
        "dann.patience=10\n"
        "osvm.nu=0.1\n";
    const auto cfg = parse_config_text(cfg_text);

    REQUIRE(cmd_train(cfg) == kExitOk);
    const auto bundle_dir = (fs::path(out_dir) / "bundle").string();
    REQUIRE(fs::exists(fs::path(bundle_dir) / "manifest.json"));
    CHECK(fs::exists(fs::path(out_dir) / "history.tsv"));
    const auto bundle = load_bundle(bundle_dir);
    CHECK(bundle.provenance.config_hash == config_hash(cfg.raw_text));
    CHECK(bundle.provenance.pipeline_kind == "di_nids");
    CHECK(bundle.osvm_model.has_value());
    REQUIRE(bundle.provenance.dataset_metas.size() == 2);

    EvalArgs self;
    self.bundle_dir = bundle_dir;
    self.dataset_csv = src;
    self.schema_path = schema;
    self.output_dir = out_dir;
    self.dataset_name = "src";
    REQUIRE(cmd_eval(self) == kExitOk);

    EvalArgs cross = self;
    cross.dataset_csv = tgt;
    cross.dataset_name = "tgt";
    cross.cross = true;
    REQUIRE(cmd_eval(cross) == kExitOk);

    const auto ledger = (fs::path(out_dir) / "ledger.jsonl").string();
    REQUIRE(fs::exists(ledger));
    {
        std::ifstream in(ledger);
        std::string line;
        int rows = 0;
        while (std::getline(in, line))
            if (!line.empty()) ++rows;
        CHECK(rows == 2);
    }

    CHECK(cmd_report(ledger, out_dir, true) == kExitOk);
    CHECK(fs::exists(fs::path(out_dir) / "report.txt"));
    CHECK(fs::exists(fs::path(out_dir) / "report.json"));

    EmbedArgs emb;
    emb.bundle_dir = bundle_dir;
    emb.source_csv = src;
    emb.target_csv = tgt;
    emb.schema_path = schema;
    emb.output_csv = (fs::path(out_dir) / "embedding.csv").string();
    emb.sample_n = 100;
    CHECK(cmd_embed(emb) == kExitOk);
    CHECK(fs::exists(emb.output_csv));
}

TEST_CASE("command exit codes on bad input") {
    IngestArgs bad;
    bad.dataset_csv = "/no/such/file.csv";
    bad.schema_path = "/no/such/schema.txt";
    bad.output_dir = (workspace() / "never").string();
    CHECK(cmd_ingest(bad) == kExitInputError);

    CHECK(cmd_report((workspace() / "missing_ledger.jsonl").string(),
                     (workspace() / "rep").string(), false) == kExitEmptyLedger);

    EvalArgs eargs;
    eargs.bundle_dir = (workspace() / "no_bundle").string();
    eargs.dataset_csv = "also_missing.csv";
    eargs.schema_path = "missing_schema.txt";
    eargs.output_dir = (workspace() / "rep").string();
    CHECK(cmd_eval(eargs) == kExitInputError);
}

TEST_CASE("cmd_ingest writes features, labels, and a summary") {
    auto data = testing::make_shift_data(120, 2, 15, 0.75);
    const auto schema = write_schema();
    const auto csv = write_flow_csv("ingest_source.csv", data.source_x, data.source_y);
    const auto out_dir = (workspace() / "ingest_out").string();
    fs::remove_all(out_dir);

    IngestArgs args;
    args.dataset_csv = csv;
    args.schema_path = schema;
    args.output_dir = out_dir;
    args.name = "toyset";
    args.subsample = 50;
    args.seed = 3;
    REQUIRE(cmd_ingest(args) == kExitOk);

    const fs::path base(out_dir);
    REQUIRE(fs::exists(base / "toyset.features.mat"));
    REQUIRE(fs::exists(base / "toyset.labels.txt"));
    REQUIRE(fs::exists(base / "toyset.summary.json"));
    const auto features = dataset::load_matrix((base / "toyset.features.mat").string());
    CHECK(features.values.rows() == 50);
    CHECK(features.values.cols() == 39);
}
