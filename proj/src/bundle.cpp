#include "dinids/bundle.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace dinids::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void save_tensor(const fs::path& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write tensor: " + path.string());
    out << "dinids-matrix 1\nrows " << m.rows() << "\ncols " << m.cols()
        << "\nnames\ndata\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double v = m(r, c);
            out.write(reinterpret_cast<const char*>(&v), sizeof(double));
        }
}

Matrix load_tensor(const fs::path& path) {
    dataset::FeatureMatrix m = dataset::load_matrix(path.string());
    return m.values;
}

json network_manifest(const nn::DenseNetwork& net, const std::string& prefix) {
    json layers = json::array();
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
        const auto& l = net.layers()[i];
        json jl;
        jl["weights"] = prefix + "_w" + std::to_string(i) + ".mat";
        jl["bias"] = prefix + "_b" + std::to_string(i) + ".mat";
        jl["activation"] =
            l.activation == nn::Activation::sigmoid ? "sigmoid" : "identity";
        layers.push_back(jl);
    }
    return layers;
}

void save_network(const fs::path& dir, const nn::DenseNetwork& net,
                  const std::string& prefix) {
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
        const auto& l = net.layers()[i];
        save_tensor(dir / (prefix + "_w" + std::to_string(i) + ".mat"), l.weights);
        save_tensor(dir / (prefix + "_b" + std::to_string(i) + ".mat"), l.bias);
    }
}

nn::DenseNetwork load_network(const fs::path& dir, const json& layers) {
    std::vector<nn::DenseLayer> ls;
    for (const auto& jl : layers) {
        nn::DenseLayer l;
        l.weights = load_tensor(dir / jl.at("weights").get<std::string>());
        l.bias = load_tensor(dir / jl.at("bias").get<std::string>());
        l.activation = jl.at("activation").get<std::string>() == "identity"
                           ? nn::Activation::identity
                           : nn::Activation::sigmoid;
        ls.push_back(std::move(l));
    }
    return nn::DenseNetwork(std::move(ls));
}

}  // namespace

void save_bundle(const std::string& dir, const ModelBundle& bundle) {
    fs::create_directories(dir);
    const fs::path base(dir);

    save_network(base, bundle.dann_model.g_f, "g_f");
    save_network(base, bundle.dann_model.g_c, "g_c");
    save_network(base, bundle.dann_model.g_d, "g_d");

    {
        std::ofstream out(base / "scaler.txt");
        out << std::setprecision(17);
        out << bundle.scaler.min.size() << "\n";
        for (std::size_t i = 0; i < bundle.scaler.min.size(); ++i)
            out << bundle.scaler.min[i] << " " << bundle.scaler.max[i] << "\n";
    }

    if (bundle.osvm_model) {
        const auto& m = *bundle.osvm_model;
        std::ofstream out(base / "osvm.txt");
        out << std::setprecision(17);
        out << m.support_vectors.rows() << " " << m.support_vectors.cols() << "\n";
        out << m.rho << "\n" << m.kernel.gamma << "\n" << m.n_train << "\n";
        for (Eigen::Index i = 0; i < m.alphas.size(); ++i) out << m.alphas[i] << "\n";
        for (Eigen::Index i = 0; i < m.support_vectors.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.support_vectors.cols(); ++j)
                out << (j ? " " : "") << m.support_vectors(i, j);
            out << "\n";
        }
    }

    json manifest;
    manifest["format"] = "dinids-bundle";
    manifest["version"] = 1;
    manifest["g_f"] = network_manifest(bundle.dann_model.g_f, "g_f");
    manifest["g_c"] = network_manifest(bundle.dann_model.g_c, "g_c");
    manifest["g_d"] = network_manifest(bundle.dann_model.g_d, "g_d");
    manifest["scaler"] = "scaler.txt";
    manifest["osvm"] = bundle.osvm_model ? json("osvm.txt") : json(nullptr);
    manifest["provenance"] = {
        {"config_hash", bundle.provenance.config_hash},
        {"seed", bundle.provenance.seed},
        {"tool_version", bundle.provenance.tool_version},
        {"pipeline_kind", bundle.provenance.pipeline_kind},
    };
    json metas = json::array();
    for (const auto& m : bundle.provenance.dataset_metas)
        metas.push_back({{"name", m.name},
                         {"n_flows", m.n_flows},
                         {"benign_fraction", m.benign_fraction}});
    manifest["provenance"]["datasets"] = metas;

    std::ofstream out(base / "manifest.json");
    out << manifest.dump(2) << "\n";
    if (!out) throw DataError("cannot write manifest in " + dir);
}

ModelBundle load_bundle(const std::string& dir) {
    const fs::path base(dir);
    std::ifstream in(base / "manifest.json");
    if (!in) throw DataError("cannot open bundle manifest in " + dir);
    json manifest = json::parse(in);
    if (manifest.at("format") != "dinids-bundle")
        throw DataError("not a dinids bundle: " + dir);

    ModelBundle bundle;
    bundle.dann_model.g_f = load_network(base, manifest.at("g_f"));
    bundle.dann_model.g_c = load_network(base, manifest.at("g_c"));
    bundle.dann_model.g_d = load_network(base, manifest.at("g_d"));
    bundle.dann_model.validate();

    {
        std::ifstream sc(base / "scaler.txt");
        if (!sc) throw DataError("missing scaler.txt in bundle " + dir);
        std::size_t n;
        sc >> n;
        bundle.scaler.min.resize(n);
        bundle.scaler.max.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            sc >> bundle.scaler.min[i] >> bundle.scaler.max[i];
        if (!sc) throw DataError("malformed scaler.txt in bundle " + dir);
    }

    if (!manifest.at("osvm").is_null()) {
        std::ifstream os(base / "osvm.txt");
        if (!os) throw DataError("missing osvm.txt in bundle " + dir);
        Eigen::Index rows, cols;
        osvm::OsvmModel m;
        os >> rows >> cols >> m.rho >> m.kernel.gamma >> m.n_train;
        m.alphas.resize(rows);
        for (Eigen::Index i = 0; i < rows; ++i) os >> m.alphas[i];
        m.support_vectors.resize(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) os >> m.support_vectors(i, j);
        if (!os) throw DataError("malformed osvm.txt in bundle " + dir);
        m.validate();  // rejects tampered bundles before any scoring
        bundle.osvm_model = std::move(m);
    }

    const auto& prov = manifest.at("provenance");
    bundle.provenance.config_hash = prov.at("config_hash").get<std::string>();
    bundle.provenance.seed = prov.at("seed").get<std::uint64_t>();
    bundle.provenance.tool_version = prov.at("tool_version").get<std::string>();
    bundle.provenance.pipeline_kind = prov.at("pipeline_kind").get<std::string>();
    for (const auto& jm : prov.at("datasets")) {
        dataset::DatasetMeta meta;
        meta.name = jm.at("name").get<std::string>();
        meta.n_flows = jm.at("n_flows").get<std::size_t>();
        meta.benign_fraction = jm.at("benign_fraction").get<double>();
        bundle.provenance.dataset_metas.push_back(meta);
    }
    return bundle;
}

}  // namespace dinids::cli
