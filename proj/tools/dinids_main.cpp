#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dinids/commands.hpp"

using namespace dinids;

int main(int argc, char** argv) {
    CLI::App app{"DI-NIDS: domain-invariant network intrusion detection"};
    app.require_subcommand(1);

    // ingest
    cli::IngestArgs ingest_args;
    auto* ingest = app.add_subcommand("ingest", "Load, validate and cache a dataset");
    ingest->add_option("dataset", ingest_args.dataset_csv, "NetFlow CSV path")->required();
    ingest->add_option("--schema", ingest_args.schema_path, "schema sidecar")->required();
    ingest->add_option("--out", ingest_args.output_dir, "output directory")->required();
    ingest->add_option("--name", ingest_args.name, "dataset name");
    ingest->add_option("--subsample", ingest_args.subsample, "stratified subsample size");
    ingest->add_option("--seed", ingest_args.seed, "subsample seed");

    // train
    std::string config_path;
    std::uint64_t train_seed = 0;
    bool train_seed_set = false;
    std::size_t train_subsample = 0;
    bool train_subsample_set = false;
    double lambda_fixed = 0.0;
    bool lambda_fixed_set = false;
    auto* train = app.add_subcommand("train", "Train a pipeline and write a model bundle");
    train->add_option("--config", config_path, "run configuration file")->required();
    train->add_option("--seed", train_seed, "override training seed")
        ->each([&](const std::string&) { train_seed_set = true; });
    train->add_option("--subsample", train_subsample, "override subsample size")
        ->each([&](const std::string&) { train_subsample_set = true; });
    train->add_option("--lambda-fixed", lambda_fixed, "use a fixed adversarial weight")
        ->each([&](const std::string&) { lambda_fixed_set = true; });

    // eval
    cli::EvalArgs eval_args;
    std::string direction = "self";
    auto* eval_cmd = app.add_subcommand("eval", "Score a dataset with a trained bundle");
    eval_cmd->add_option("bundle", eval_args.bundle_dir, "bundle directory")->required();
    eval_cmd->add_option("dataset", eval_args.dataset_csv, "NetFlow CSV path")->required();
    eval_cmd->add_option("--schema", eval_args.schema_path, "schema sidecar")->required();
    eval_cmd->add_option("--out", eval_args.output_dir, "output directory")->required();
    eval_cmd->add_option("--name", eval_args.dataset_name, "dataset name");
    eval_cmd->add_option("--direction", direction, "self|cross")
        ->check(CLI::IsMember({"self", "cross"}));
    eval_cmd->add_flag("--cross", eval_args.cross, "cross-domain scoring (whole dataset)");
    eval_cmd->add_flag("--self", "domain-specific scoring (held-out split)");
    eval_cmd->add_option("--seed", eval_args.seed, "split seed");
    eval_cmd->add_option("--test-split", eval_args.test_split, "held-out fraction");

    // report
    std::string ledger_path, report_out;
    bool with_reference = false;
    auto* report = app.add_subcommand("report", "Build comparison tables from the ledger");
    report->add_option("ledger", ledger_path, "results ledger (jsonl)")->required();
    report->add_option("--out", report_out, "output directory")->required();
    report->add_flag("--reference", with_reference, "print published reference values");

    // embed
    cli::EmbedArgs embed_args;
    auto* embed = app.add_subcommand("embed", "Export a 2-D embedding of two datasets");
    embed->add_option("source", embed_args.source_csv, "source CSV")->required();
    embed->add_option("target", embed_args.target_csv, "target CSV")->required();
    embed->add_option("--schema", embed_args.schema_path, "schema sidecar")->required();
    embed->add_option("--out", embed_args.output_csv, "output CSV path")->required();
    embed->add_option("--bundle", embed_args.bundle_dir,
                      "project through this bundle's feature extractor");
    embed->add_option("--sample", embed_args.sample_n, "rows to embed");
    embed->add_option("--seed", embed_args.seed, "sampling seed");

    CLI11_PARSE(app, argc, argv);

    if (*ingest) return cli::cmd_ingest(ingest_args);
    if (*train) {
        try {
            auto cfg = cli::parse_config_file(config_path);
            if (train_seed_set) cfg.pipeline.dann.sgd.seed = train_seed;
            if (train_subsample_set) cfg.subsample = train_subsample;
            if (lambda_fixed_set) {
                cfg.pipeline.dann.lambda.mode = dann::LambdaMode::fixed;
                cfg.pipeline.dann.lambda.fixed_value = lambda_fixed;
            }
            return cli::cmd_train(cfg);
        } catch (const std::exception& e) {
            std::cerr << "train: " << e.what() << "\n";
            return cli::kExitInputError;
        }
    }
    if (*eval_cmd) {
        if (direction == "cross") eval_args.cross = true;
        return cli::cmd_eval(eval_args);
    }
    if (*report) return cli::cmd_report(ledger_path, report_out, with_reference);
    if (*embed) return cli::cmd_embed(embed_args);
    return cli::kExitInputError;
}
