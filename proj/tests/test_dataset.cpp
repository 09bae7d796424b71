#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "dinids/dataset.hpp"

using namespace dinids;
using namespace dinids::dataset;

namespace {

const std::string kData = DINIDS_TEST_DATA_DIR;

std::string write_temp(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << text;
    return path.string();
}

// In-memory table for the sampling/splitting tests: n rows, two feature
// columns carrying the row index, class labels from `labels`.
FlowTable make_table(const std::vector<std::string>& labels) {
    FlowTable t;
    t.schema.columns = {{"f1", ColumnType::numeric, ColumnRole::feature},
                        {"f2", ColumnType::numeric, ColumnRole::feature},
                        {"Attack", ColumnType::label, ColumnRole::label}};
    t.feature_names = {"f1", "f2"};
    const auto n = static_cast<Eigen::Index>(labels.size());
    t.features.resize(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        t.features(i, 0) = static_cast<double>(i);
        t.features(i, 1) = static_cast<double>(i) * 0.5;
        t.identifiers.push_back({});
    }
    t.labels = labels;
    t.meta.n_flows = labels.size();
    return t;
}

}  // namespace

TEST_CASE("schema parsing") {
    const auto schema = Schema::load(kData + "/mini_schema.txt");
    REQUIRE(schema.columns.size() == 7);
    CHECK(schema.feature_count() == 3);
    CHECK(schema.class_label_index() == 6);
    CHECK(schema.columns[0].role == ColumnRole::identifier);
    CHECK(schema.columns[0].type == ColumnType::categorical);

    CHECK_THROWS_AS(Schema::load(kData + "/no_such_schema.txt"), DataError);
    const auto bad = write_temp("dinids_bad_schema.txt", "only_a_name\n");
    CHECK_THROWS_AS(Schema::load(bad), DataError);
    const auto empty = write_temp("dinids_empty_schema.txt", "# nothing\n");
    CHECK_THROWS_AS(Schema::load(empty), DataError);
}

TEST_CASE("full netflow schema shape") {
    const auto schema = Schema::load(kData + "/../../data/nfv2_schema.txt");
    CHECK(schema.columns.size() == 45);
    CHECK(schema.feature_count() == 39);
    std::size_t identifiers = 0;
    for (const auto& c : schema.columns)
        if (c.role == ColumnRole::identifier) ++identifiers;
    CHECK(identifiers == 4);
    CHECK(schema.columns[schema.class_label_index()].name == "Attack");
}

TEST_CASE("csv loading maps header positions to schema order") {
    const auto schema = Schema::load(kData + "/mini_schema.txt");
    const auto table = load_netflow_csv(kData + "/mini_flows.csv", schema);
    REQUIRE(table.rows() == 3);
    REQUIRE(table.features.cols() == 3);
    // file stores f2 before f1; schema order wins
    CHECK(table.feature_names == std::vector<std::string>{"f1", "f2", "f3"});
    CHECK(table.features(0, 0) == 1.0);
    CHECK(table.features(0, 1) == 2.0);
    CHECK(table.features(0, 2) == 3.0);
    CHECK(table.features(2, 0) == 7.0);
    CHECK(table.identifiers[1][0] == "10.0.0.2");
    CHECK(table.identifiers[1][1] == "443");
    CHECK(table.labels == std::vector<std::string>{"Benign", "DDoS", "Scan"});
    CHECK(table.meta.n_flows == 3);
    CHECK(table.meta.benign_fraction == doctest::Approx(1.0 / 3.0));
    CHECK(table.meta.attack_class_counts.at("DDoS") == 1);
    CHECK(table.meta.attack_class_counts.at("Scan") == 1);
}

TEST_CASE("csv loading: missing columns are listed in the error") {
    const auto schema = Schema::load(kData + "/mini_schema.txt");
    const auto path = write_temp("dinids_missing_cols.csv",
                                 "src_ip,f1,Label,Attack\n"
                                 "a,1.0,0,Benign\n");
    try {
        load_netflow_csv(path, schema);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("sport") != std::string::npos);
        CHECK(msg.find("f2") != std::string::npos);
        CHECK(msg.find("f3") != std::string::npos);
    }
}

TEST_CASE("csv loading: malformed-row budget") {
    const auto schema = Schema::load(kData + "/mini_schema.txt");
    const std::string header = "src_ip,sport,f1,f2,f3,Label,Attack\n";
    const std::string good = "a,1,0.1,0.2,0.3,0,Benign\n";

    // 1 bad row out of 2000 stays under the 0.1% budget
    std::string big = header;
    for (int i = 0; i < 1999; ++i) big += good;
    big += "a,1,not_a_number,0.2,0.3,0,Benign\n";
    const auto ok_path = write_temp("dinids_one_bad.csv", big);
    const auto table = load_netflow_csv(ok_path, schema);
    CHECK(table.rows() == 1999);

    // 1 bad row out of 3 aborts
    const auto bad_path = write_temp(
        "dinids_many_bad.csv", header + good + good + "a,1,oops,0.2,0.3,0,Benign\n");
    CHECK_THROWS_AS(load_netflow_csv(bad_path, schema), DataError);

    // rows with the wrong field count land in the same budget
    const auto short_path =
        write_temp("dinids_short_row.csv", header + good + "a,1,0.1\n");
    CHECK_THROWS_AS(load_netflow_csv(short_path, schema), DataError);

    const auto empty_path = write_temp("dinids_header_only.csv", header);
    CHECK_THROWS_AS(load_netflow_csv(empty_path, schema), DataError);
}

TEST_CASE("binarize_labels") {
    auto table = make_table({"Benign", "DDoS", "Benign", "injection", "benign"});
    binarize_labels(table);
    // case-sensitive: only the exact string "Benign" maps to 0
    CHECK(table.binary_labels == std::vector<int>{0, 1, 0, 1, 1});
}

TEST_CASE("select_features keeps schema order and width") {
    const auto schema = Schema::load(kData + "/mini_schema.txt");
    const auto table = load_netflow_csv(kData + "/mini_flows.csv", schema);
    const auto x = select_features(table);
    CHECK(x.cols() == 3);
    CHECK(x.rows() == 3);
    CHECK(x.column_names == table.feature_names);
    CHECK(x.values.cwiseEqual(table.features).all());
}

TEST_CASE("scaler") {
    FeatureMatrix x;
    x.values.resize(3, 3);
    x.values << 0.0, 5.0, 1.0,
                10.0, 5.0, 2.0,
                5.0, 5.0, 4.0;
    x.column_names = {"a", "b", "c"};
    const auto p = fit_scaler(x);
    CHECK(p.min == std::vector<double>{0.0, 5.0, 1.0});
    CHECK(p.max == std::vector<double>{10.0, 5.0, 4.0});

    const auto scaled = apply_scaler(p, x);
    CHECK(scaled.values(0, 0) == 0.0);
    CHECK(scaled.values(1, 0) == 1.0);
    CHECK(scaled.values(2, 0) == 0.5);
    // constant column maps to zero
    CHECK(scaled.values.col(1).isZero(0.0));
    CHECK(scaled.values(1, 2) == doctest::Approx(1.0 / 3.0));

    // rows outside the fitted range clip to [0,1]
    FeatureMatrix outside;
    outside.values.resize(1, 3);
    outside.values << -5.0, 7.0, 100.0;
    const auto clipped = apply_scaler(p, outside);
    CHECK(clipped.values(0, 0) == 0.0);
    CHECK(clipped.values(0, 2) == 1.0);

    FeatureMatrix wrong;
    wrong.values.resize(1, 2);
    CHECK_THROWS_AS(apply_scaler(p, wrong), ShapeError);
    FeatureMatrix empty;
    empty.values.resize(0, 3);
    CHECK_THROWS_AS(fit_scaler(empty), DataError);

    // idempotence on already-scaled data: min 0, max 1 per varying column
    const auto p2 = fit_scaler(scaled);
    const auto rescaled = apply_scaler(p2, scaled);
    CHECK(rescaled.values.col(0).cwiseEqual(scaled.values.col(0)).all());
    CHECK(rescaled.values.col(2).isApprox(scaled.values.col(2), 1e-15));
}

TEST_CASE("stratified_sample follows class proportions") {
    std::vector<std::string> labels;
    for (int i = 0; i < 960; ++i) labels.push_back("Benign");
    for (int i = 0; i < 30; ++i) labels.push_back("DDoS");
    for (int i = 0; i < 10; ++i) labels.push_back("Scan");
    auto table = make_table(labels);

    const auto sample = stratified_sample(table, 100, 7);
    REQUIRE(sample.rows() == 100);
    std::map<std::string, int> counts;
    for (const auto& l : sample.labels) ++counts[l];
    CHECK(counts["Benign"] == 96);
    CHECK(counts["DDoS"] == 3);
    CHECK(counts["Scan"] == 1);

    // determinism under the seed; row order follows the original file
    const auto again = stratified_sample(table, 100, 7);
    CHECK(sample.features.cwiseEqual(again.features).all());
    CHECK(std::is_sorted(sample.features.col(0).data(),
                         sample.features.col(0).data() + 100));
    const auto other = stratified_sample(table, 100, 8);
    CHECK_FALSE(sample.features.cwiseEqual(other.features).all());

    CHECK_THROWS_AS(stratified_sample(table, 2000, 1), std::invalid_argument);
    // n == rows returns everything
    CHECK(stratified_sample(table, 1000, 1).rows() == 1000);
}

TEST_CASE("split_indices") {
    auto [train, test] = split_indices(10, 0.3, 4);
    CHECK(train.size() == 7);
    CHECK(test.size() == 3);
    CHECK(std::is_sorted(train.begin(), train.end()));
    CHECK(std::is_sorted(test.begin(), test.end()));
    std::vector<std::size_t> all = train;
    all.insert(all.end(), test.begin(), test.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < 10; ++i) CHECK(all[i] == i);

    auto [train2, test2] = split_indices(10, 0.3, 4);
    CHECK(train == train2);
    CHECK(test == test2);

    // extreme fractions still leave both sides non-empty
    auto tiny = split_indices(5, 0.01, 1);
    CHECK(tiny.second.size() == 1);
    auto huge = split_indices(5, 0.99, 1);
    CHECK(huge.first.size() == 1);
    CHECK_THROWS_AS(split_indices(5, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(split_indices(5, 1.0, 1), std::invalid_argument);
}

TEST_CASE("take_rows recomputes metadata") {
    auto table = make_table({"Benign", "DDoS", "Benign", "Scan"});
    const auto sub = take_rows(table, {1, 3});
    REQUIRE(sub.rows() == 2);
    CHECK(sub.labels == std::vector<std::string>{"DDoS", "Scan"});
    CHECK(sub.features(0, 0) == 1.0);
    CHECK(sub.features(1, 0) == 3.0);
    CHECK(sub.meta.benign_fraction == 0.0);
    CHECK(sub.meta.attack_class_counts.size() == 2);
}

TEST_CASE("matrix files round-trip bit-exact") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    FeatureMatrix m;
    m.values = Matrix::NullaryExpr(17, 5, [&] { return u(rng); });
    m.values(0, 0) = 1e-300;
    m.values(0, 1) = -0.1;  // not exactly representable; must survive as-is
    m.column_names = {"a", "b", "c", "d", "e"};

    const auto path =
        (std::filesystem::temp_directory_path() / "dinids_roundtrip.mat").string();
    save_matrix(path, m);
    const auto back = load_matrix(path);
    CHECK(back.column_names == m.column_names);
    REQUIRE(back.values.rows() == 17);
    REQUIRE(back.values.cols() == 5);
    CHECK(std::memcmp(back.values.data(), m.values.data(),
                      sizeof(double) * 17 * 5) == 0);

    const auto junk = write_temp("dinids_junk.mat", "not a matrix\n");
    CHECK_THROWS_AS(load_matrix(junk), DataError);
    CHECK_THROWS_AS(load_matrix("/no/such/file.mat"), DataError);
}
