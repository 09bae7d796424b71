#pragma once

#include <string>

#include "dinids/bundle.hpp"
#include "dinids/config.hpp"

namespace dinids::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitEmptyLedger = 3;
inline constexpr int kExitDivergence = 4;

struct IngestArgs {
    std::string dataset_csv;
    std::string schema_path;
    std::string output_dir;
    std::string name;
    std::size_t subsample = 0;
    std::uint64_t seed = 1;
};

struct EvalArgs {
    std::string bundle_dir;
    std::string dataset_csv;
    std::string schema_path;
    std::string output_dir;
    std::string dataset_name;
    bool cross = false;
    double test_split = 0.3;
    std::uint64_t seed = 1;
};

struct EmbedArgs {
    std::string bundle_dir;  // empty = embed raw scaled features
    std::string source_csv;
    std::string target_csv;
    std::string schema_path;
    std::string output_csv;
    std::size_t sample_n = 2000;
    std::uint64_t seed = 1;
};

// Each command returns an exit code and reports through stdout/stderr.
int cmd_ingest(const IngestArgs& args);
int cmd_train(const RunConfig& cfg);
int cmd_eval(const EvalArgs& args);
int cmd_report(const std::string& ledger_path, const std::string& output_dir,
               bool with_reference);
int cmd_embed(const EmbedArgs& args);

// Dataset root fallback used when a configured path does not exist as given.
std::string resolve_data_path(const std::string& path);

}  // namespace dinids::cli
