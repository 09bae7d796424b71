#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dinids/dann.hpp"
#include "dinids/dataset.hpp"
#include "dinids/osvm.hpp"

namespace dinids::cli {

struct Provenance {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string tool_version;
    std::string pipeline_kind;
    std::vector<dataset::DatasetMeta> dataset_metas;
};

struct ModelBundle {
    dataset::ScalerParams scaler;
    dann::DannModel dann_model;
    std::optional<osvm::OsvmModel> osvm_model;
    Provenance provenance;
};

// Bundle layout: a directory with a JSON manifest, one matrix file per DANN
// tensor, a text scaler file, and the OSVM as full-precision decimal text.
void save_bundle(const std::string& dir, const ModelBundle& bundle);
ModelBundle load_bundle(const std::string& dir);

}  // namespace dinids::cli
