#include "dinids/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dinids::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

eval::PipelineKind pipeline_kind_from_string(const std::string& s) {
    if (s == "di_nids" || s == "di-nids") return eval::PipelineKind::di_nids;
    if (s == "dann") return eval::PipelineKind::dann_classifier;
    if (s == "feed_forward" || s == "ff") return eval::PipelineKind::feed_forward;
    if (s == "osvm") return eval::PipelineKind::osvm_raw;
    throw DataError("unknown pipeline kind: " + s);
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::ostringstream normalized;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError("config line is not key=value: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        normalized << key << "=" << value << "\n";

        try {
            if (key == "source.csv") cfg.source_csv = value;
            else if (key == "target.csv") cfg.target_csv = value;
            else if (key == "schema") cfg.schema_path = value;
            else if (key == "output.dir") cfg.output_dir = value;
            else if (key == "subsample.n") cfg.subsample = std::stoull(value);
            else if (key == "subsample.seed") cfg.subsample_seed = std::stoull(value);
            else if (key == "pipeline.kind") cfg.pipeline_kind = value;
            else if (key == "eval.test_split") cfg.test_split = std::stod(value);
            else if (key == "eval.folds") cfg.folds = std::stoi(value);
            else if (key == "dann.epochs") cfg.pipeline.dann.epochs = std::stoi(value);
            else if (key == "dann.learning_rate")
                cfg.pipeline.dann.sgd.learning_rate = std::stod(value);
            else if (key == "dann.batch_size")
                cfg.pipeline.dann.sgd.batch_size = std::stoi(value);
            else if (key == "dann.dropout")
                cfg.pipeline.dann.sgd.dropout_ratio = std::stod(value);
            else if (key == "dann.seed")
                cfg.pipeline.dann.sgd.seed = std::stoull(value);
            else if (key == "dann.validation_split")
                cfg.pipeline.dann.validation_split = std::stod(value);
            else if (key == "dann.folds") cfg.pipeline.dann.folds = std::stoi(value);
            else if (key == "dann.patience")
                cfg.pipeline.dann.early_stop_patience = std::stoi(value);
            else if (key == "dann.lambda_mode") {
                if (value == "fixed")
                    cfg.pipeline.dann.lambda.mode = dann::LambdaMode::fixed;
                else if (value == "scheduled")
                    cfg.pipeline.dann.lambda.mode = dann::LambdaMode::scheduled;
                else throw DataError("lambda_mode must be fixed|scheduled");
            } else if (key == "dann.lambda_fixed") {
                cfg.pipeline.dann.lambda.mode = dann::LambdaMode::fixed;
                cfg.pipeline.dann.lambda.fixed_value = std::stod(value);
            } else if (key == "dann.lambda_gamma_rate")
                cfg.pipeline.dann.lambda.gamma_rate = std::stod(value);
            else if (key == "osvm.nu") cfg.pipeline.osvm.nu = std::stod(value);
            else if (key == "osvm.gamma")
                cfg.pipeline.osvm.kernel.gamma = std::stod(value);
            else if (key == "osvm.tolerance")
                cfg.pipeline.osvm.tolerance = std::stod(value);
            else if (key == "osvm.max_passes")
                cfg.pipeline.osvm.max_passes = std::stoi(value);
            else if (key == "osvm.max_train")
                cfg.pipeline.osvm_max_train = std::stoull(value);
            else
                throw DataError("unknown config key: " + key);
        } catch (const std::invalid_argument&) {
            throw DataError("bad value for " + key + ": " + value);
        }
    }
    cfg.raw_text = normalized.str();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string config_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace dinids::cli
