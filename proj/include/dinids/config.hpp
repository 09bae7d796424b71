#pragma once

#include <string>

#include "dinids/eval.hpp"

namespace dinids::cli {

// Flat key=value run configuration with section prefixes, e.g. dann.epochs=50.
struct RunConfig {
    std::string source_csv;
    std::string target_csv;
    std::string schema_path;
    std::string output_dir = ".";
    std::size_t subsample = 0;  // 0 = use everything
    std::uint64_t subsample_seed = 1;
    std::string pipeline_kind = "di_nids";
    eval::PipelineConfig pipeline;
    double test_split = 0.3;
    int folds = 5;
    std::string raw_text;  // normalized text the hash is computed over
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

eval::PipelineKind pipeline_kind_from_string(const std::string& s);

// FNV-1a over the normalized config text.
std::string config_hash(const std::string& text);

}  // namespace dinids::cli
