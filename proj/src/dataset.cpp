#include "dinids/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

namespace dinids::dataset {

namespace {

ColumnType parse_type(const std::string& s) {
    if (s == "numeric") return ColumnType::numeric;
    if (s == "categorical") return ColumnType::categorical;
    if (s == "label") return ColumnType::label;
    throw DataError("unknown column type in schema: " + s);
}

ColumnRole parse_role(const std::string& s) {
    if (s == "feature") return ColumnRole::feature;
    if (s == "identifier") return ColumnRole::identifier;
    if (s == "label") return ColumnRole::label;
    throw DataError("unknown column role in schema: " + s);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.emplace_back(line, start, i - start);
            start = i + 1;
        }
    }
    return out;
}

void strip_cr(std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
}

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    auto [p, ec] = std::from_chars(b, e, out);
    if (ec != std::errc()) return false;
    while (p < e && (*p == ' ' || *p == '\t')) ++p;
    return p == e && std::isfinite(out);
}

}  // namespace

Schema Schema::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open schema file: " + path);
    Schema schema;
    std::string line;
    while (std::getline(in, line)) {
        strip_cr(line);
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string name, type, role;
        if (!(ls >> name)) continue;
        if (!(ls >> type >> role))
            throw DataError("schema line needs <name> <type> <role>: " + line);
        schema.columns.push_back({name, parse_type(type), parse_role(role)});
    }
    if (schema.columns.empty()) throw DataError("empty schema: " + path);
    return schema;
}

std::size_t Schema::feature_count() const {
    std::size_t n = 0;
    for (const auto& c : columns)
        if (c.role == ColumnRole::feature) ++n;
    return n;
}

std::size_t Schema::class_label_index() const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].type == ColumnType::label) return i;
    throw DataError("schema has no class label column");
}

FlowTable load_netflow_csv(const std::string& path, const Schema& schema,
                           const LoadOptions& opts) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    strip_cr(line);
    auto header = split_csv_line(line);

    // Map every schema column to its position in the file.
    std::vector<std::size_t> file_pos(schema.columns.size());
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < schema.columns.size(); ++i) {
        auto it = std::find(header.begin(), header.end(), schema.columns[i].name);
        if (it == header.end())
            missing.push_back(schema.columns[i].name);
        else
            file_pos[i] = static_cast<std::size_t>(it - header.begin());
    }
    if (!missing.empty()) {
        std::string msg = "missing columns in " + path + ":";
        for (const auto& m : missing) msg += " " + m;
        throw DataError(msg);
    }

    std::vector<std::size_t> feature_cols, identifier_cols;
    for (std::size_t i = 0; i < schema.columns.size(); ++i) {
        if (schema.columns[i].role == ColumnRole::feature)
            feature_cols.push_back(i);
        else if (schema.columns[i].role == ColumnRole::identifier)
            identifier_cols.push_back(i);
    }
    const std::size_t label_col = schema.class_label_index();

    FlowTable table;
    table.schema = schema;
    for (auto c : feature_cols) table.feature_names.push_back(schema.columns[c].name);

    std::vector<double> values;  // row-major feature buffer
    std::size_t n_rows = 0, bad_rows = 0, line_no = 1;
    std::vector<double> row(feature_cols.size());

    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            ++bad_rows;
            continue;
        }
        bool ok = true;
        for (std::size_t k = 0; k < feature_cols.size(); ++k) {
            if (!parse_double(fields[file_pos[feature_cols[k]]], row[k])) {
                ok = false;
                break;
            }
        }
        const std::string& label = fields[file_pos[label_col]];
        if (label.empty()) ok = false;
        if (!ok) {
            ++bad_rows;
            continue;
        }
        values.insert(values.end(), row.begin(), row.end());
        std::vector<std::string> ids;
        ids.reserve(identifier_cols.size());
        for (auto c : identifier_cols) ids.push_back(fields[file_pos[c]]);
        table.identifiers.push_back(std::move(ids));
        table.labels.push_back(label);
        ++n_rows;
    }

    const std::size_t total = n_rows + bad_rows;
    if (total == 0) throw DataError("no data rows in " + path);
    if (static_cast<double>(bad_rows) >
        opts.max_bad_row_fraction * static_cast<double>(total))
        throw DataError("too many malformed rows in " + path + ": " +
                        std::to_string(bad_rows) + " of " + std::to_string(total));

    table.features = Eigen::Map<
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), static_cast<Eigen::Index>(n_rows),
        static_cast<Eigen::Index>(feature_cols.size()));

    table.meta.name = opts.dataset_name.empty() ? path : opts.dataset_name;
    table.meta.n_flows = n_rows;
    std::size_t benign = 0;
    for (const auto& l : table.labels) {
        if (l == "Benign")
            ++benign;
        else
            ++table.meta.attack_class_counts[l];
    }
    table.meta.benign_fraction =
        static_cast<double>(benign) / static_cast<double>(n_rows);
    return table;
}

void binarize_labels(FlowTable& table) {
    table.binary_labels.resize(table.labels.size());
    for (std::size_t i = 0; i < table.labels.size(); ++i) {
        if (table.labels[i].empty())
            throw DataError("empty label at row " + std::to_string(i));
        table.binary_labels[i] = (table.labels[i] == "Benign") ? 0 : 1;
    }
}

FeatureMatrix select_features(const FlowTable& table) {
    if (static_cast<std::size_t>(table.features.cols()) !=
        table.schema.feature_count())
        throw DataError("feature column count inconsistent with schema");
    return {table.features, table.feature_names};
}

ScalerParams fit_scaler(const FeatureMatrix& x) {
    if (x.rows() == 0) throw DataError("cannot fit scaler on empty matrix");
    ScalerParams p;
    p.min.resize(x.cols());
    p.max.resize(x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        p.min[c] = x.values.col(static_cast<Eigen::Index>(c)).minCoeff();
        p.max[c] = x.values.col(static_cast<Eigen::Index>(c)).maxCoeff();
    }
    return p;
}

FeatureMatrix apply_scaler(const ScalerParams& params, const FeatureMatrix& x) {
    if (params.min.size() != x.cols())
        throw ShapeError("scaler column count != matrix column count");
    FeatureMatrix out = x;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        const double lo = params.min[c], hi = params.max[c];
        auto col = out.values.col(static_cast<Eigen::Index>(c));
        if (hi <= lo) {
            col.setZero();
            continue;
        }
        col = ((col.array() - lo) / (hi - lo)).cwiseMax(0.0).cwiseMin(1.0);
    }
    return out;
}

FlowTable take_rows(const FlowTable& table, const std::vector<std::size_t>& idx) {
    FlowTable out;
    out.schema = table.schema;
    out.feature_names = table.feature_names;
    out.features.resize(static_cast<Eigen::Index>(idx.size()), table.features.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.features.row(static_cast<Eigen::Index>(i)) =
            table.features.row(static_cast<Eigen::Index>(idx[i]));
        out.identifiers.push_back(table.identifiers[idx[i]]);
        out.labels.push_back(table.labels[idx[i]]);
        if (!table.binary_labels.empty())
            out.binary_labels.push_back(table.binary_labels[idx[i]]);
    }
    out.meta.name = table.meta.name;
    out.meta.n_flows = idx.size();
    std::size_t benign = 0;
    for (const auto& l : out.labels) {
        if (l == "Benign")
            ++benign;
        else
            ++out.meta.attack_class_counts[l];
    }
    out.meta.benign_fraction =
        idx.empty() ? 0.0
                    : static_cast<double>(benign) / static_cast<double>(idx.size());
    return out;
}

FlowTable stratified_sample(const FlowTable& table, std::size_t n,
                            std::uint64_t seed) {
    if (n > table.rows())
        throw std::invalid_argument("sample size exceeds table size");

    // Group row indices by class label, in first-appearance order.
    std::vector<std::string> class_order;
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < table.rows(); ++i) {
        auto [it, inserted] = groups.try_emplace(table.labels[i]);
        if (inserted) class_order.push_back(table.labels[i]);
        it->second.push_back(i);
    }

    // Largest-remainder allocation of n across classes.
    const double total = static_cast<double>(table.rows());
    std::vector<std::size_t> alloc(class_order.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < class_order.size(); ++k) {
        const double exact =
            static_cast<double>(n) * static_cast<double>(groups[class_order[k]].size()) / total;
        alloc[k] = static_cast<std::size_t>(exact);
        assigned += alloc[k];
        remainders.push_back({exact - static_cast<double>(alloc[k]), k});
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t r = 0; assigned < n; ++r) {
        const std::size_t k = remainders[r % remainders.size()].second;
        if (alloc[k] < groups[class_order[k]].size()) {
            ++alloc[k];
            ++assigned;
        }
    }

    auto rng = make_rng(seed, RngStream::sampling);
    std::vector<std::size_t> picked;
    picked.reserve(n);
    for (std::size_t k = 0; k < class_order.size(); ++k) {
        auto idx = groups[class_order[k]];
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(std::min(alloc[k], idx.size()));
        picked.insert(picked.end(), idx.begin(), idx.end());
    }
    std::sort(picked.begin(), picked.end());  // keep file order
    return take_rows(table, picked);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double fraction, std::uint64_t seed) {
    if (fraction <= 0.0 || fraction >= 1.0)
        throw std::invalid_argument("split fraction must be in (0,1)");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    auto rng = make_rng(seed, RngStream::shuffle);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::size_t n_test =
        static_cast<std::size_t>(static_cast<double>(n) * fraction);
    if (n >= 2) n_test = std::max<std::size_t>(1, std::min(n_test, n - 1));
    std::vector<std::size_t> test(idx.begin(), idx.begin() + static_cast<long>(n_test));
    std::vector<std::size_t> train(idx.begin() + static_cast<long>(n_test), idx.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {train, test};
}

std::pair<FlowTable, FlowTable> split(const FlowTable& table, double fraction,
                                      std::uint64_t seed) {
    auto [train_idx, test_idx] = split_indices(table.rows(), fraction, seed);
    return {take_rows(table, train_idx), take_rows(table, test_idx)};
}

void save_matrix(const std::string& path, const FeatureMatrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write matrix file: " + path);
    out << "dinids-matrix 1\n";
    out << "rows " << m.rows() << "\n";
    out << "cols " << m.cols() << "\n";
    out << "names";
    for (const auto& n : m.column_names) out << " " << n;
    out << "\ndata\n";
    // row-major little-endian doubles
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const double v = m.values(static_cast<Eigen::Index>(r),
                                      static_cast<Eigen::Index>(c));
            out.write(reinterpret_cast<const char*>(&v), sizeof(double));
        }
    if (!out) throw DataError("write failed: " + path);
}

FeatureMatrix load_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open matrix file: " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "dinids-matrix" || version != 1)
        throw DataError("not a dinids matrix file: " + path);
    std::string key;
    std::size_t rows = 0, cols = 0;
    in >> key >> rows;
    if (key != "rows") throw DataError("malformed matrix header: " + path);
    in >> key >> cols;
    if (key != "cols") throw DataError("malformed matrix header: " + path);
    std::string names_line;
    std::getline(in, names_line);  // rest of cols line
    std::getline(in, names_line);
    FeatureMatrix m;
    {
        std::istringstream ns(names_line);
        std::string tok;
        ns >> tok;  // "names"
        while (ns >> tok) m.column_names.push_back(tok);
    }
    std::getline(in, names_line);  // "data"
    m.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            double v;
            in.read(reinterpret_cast<char*>(&v), sizeof(double));
            if (!in) throw DataError("truncated matrix payload: " + path);
            m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    return m;
}

}  // namespace dinids::dataset
