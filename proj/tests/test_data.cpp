#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <unistd.h>

#include "fnnsel/data.hpp"
#include "fnnsel/errors.hpp"
#include "fnnsel/random.hpp"
#include "test_support.hpp"

using namespace fnnsel;
namespace fs = std::filesystem;

namespace {

struct TempCsv {
    fs::path path;
    explicit TempCsv(const std::string& contents) {
        static int counter = 0;
        path = fs::temp_directory_path() / ("fnnsel_data_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".csv");
        std::ofstream(path, std::ios::binary) << contents;
    }
    ~TempCsv() { fs::remove(path); }
};

fs::path fixture(const char* name) { return fs::path(FNNSEL_DATA_DIR) / name; }

// Identifies rows by their (unique) response value.
std::multiset<double> responses(const Dataset& d) { return {d.y().begin(), d.y().end()}; }

}  // namespace

TEST_CASE("load_csv reads a well-formed file") {
    TempCsv f("a,b,y\n1,2,3\n4,5,6\n7.5,-8e-1,9\n");
    const auto r = load_csv(f.path, "y");
    CHECK(r.data.rows() == 3);
    CHECK(r.rows_read == 3);
    CHECK(r.rows_rejected == 0);
    CHECK(r.data.covariates() == 2);
    CHECK(r.data.covariate_names() == std::vector<std::string>{"a", "b"});
    CHECK(r.data.response_name() == "y");
    CHECK(r.data.x()(2, 1) == -0.8);
    CHECK(r.data.y()(2) == 9.0);
}

TEST_CASE("load_csv keeps values exactly as written") {
    TempCsv f("y,x\n0.1,1e-300\n2.5,123456789.123456789\n");
    const auto r = load_csv(f.path, "y");
    CHECK(r.data.y()(0) == 0.1);
    CHECK(r.data.x()(0, 0) == 1e-300);
    CHECK(r.data.x()(1, 0) == 123456789.123456789);
}

TEST_CASE("load_csv rejects rows with bad cells and counts them") {
    TempCsv f("a,b,y\n1,2,3\n4,oops,6\n7,8,9\n");
    const auto r = load_csv(f.path, "y");
    CHECK(r.data.rows() == 2);
    CHECK(r.rows_rejected == 1);
    CHECK(r.rows_read == 3);

    TempCsv g("a,y\n1,\n,2\n3,4\n5,6,7\n");
    const auto s = load_csv(g.path, "y");
    CHECK(s.data.rows() == 1);
    CHECK(s.rows_rejected == 3);
}

TEST_CASE("load_csv handles quoted headers and a byte order mark") {
    TempCsv f("\xEF\xBB\xBF\"first col\",\"y\"\n1,2\n");
    const auto r = load_csv(f.path, "y");
    CHECK(r.data.covariate_names() == std::vector<std::string>{"first col"});
    CHECK(r.data.rows() == 1);
}

TEST_CASE("load_csv errors") {
    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", "y"), DataError);
    TempCsv f("a,b\n1,2\n");
    CHECK_THROWS_AS(load_csv(f.path, "y"), DataError);
    TempCsv empty("");
    CHECK_THROWS_AS(load_csv(empty.path, "y"), DataError);
}

TEST_CASE("bundled fixtures") {
    const auto boston = load_csv(fixture("boston.csv"), "medv");
    CHECK(boston.data.rows() == 506);
    CHECK(boston.data.covariates() == 12);
    CHECK(boston.rows_rejected == 0);

    const auto red = load_csv(fixture("red_wine.csv"), "quality");
    CHECK(red.data.rows() == 1599);
    CHECK(red.data.covariates() == 11);
    CHECK(red.rows_rejected == 0);
}

TEST_CASE("split sizes") {
    const auto d10 = test_support::random_dataset(10, 2, 1);
    auto [train, test] = split(d10, 0.1, 3);
    CHECK(train.rows() == 9);
    CHECK(test.rows() == 1);

    const auto d506 = test_support::random_dataset(506, 1, 1);
    auto [tr, te] = split(d506, 0.1, 3);
    CHECK(tr.rows() == 455);
    CHECK(te.rows() == 51);

    // 0.25 * 10 = 2.5 rounds half up
    auto [a, b] = split(d10, 0.25, 3);
    CHECK(b.rows() == 3);
}

TEST_CASE("split is reproducible and seed-dependent") {
    const auto d = test_support::random_dataset(100, 1, 4);
    CHECK(test_rows(100, 0.1, 8) == test_rows(100, 0.1, 8));
    CHECK(test_rows(100, 0.1, 8) != test_rows(100, 0.1, 9));
    auto [t1, s1] = split(d, 0.1, 8);
    auto [t2, s2] = split(d, 0.1, 8);
    CHECK(s1.y() == s2.y());
    CHECK(t1.y() == t2.y());
}

TEST_CASE("split partitions the rows: random n and seeds") {
    Rng rng(2718);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.below(300);
        const double f = rng.uniform(0.01, 0.99);
        const auto expected_test = static_cast<std::size_t>(std::floor(f * static_cast<double>(n) + 0.5));
        const auto d = test_support::random_dataset(n, 1, rng.next());
        const std::uint64_t seed = rng.next();
        if (expected_test == 0 || expected_test >= n) {
            CHECK_THROWS_AS(split(d, f, seed), InvalidArgument);
            continue;
        }
        auto [train, test] = split(d, f, seed);
        CHECK(test.rows() == expected_test);
        CHECK(train.rows() + test.rows() == n);
        auto all = responses(train);
        const auto t = responses(test);
        all.insert(t.begin(), t.end());
        CHECK(all == responses(d));

        const auto idx = test_rows(n, f, seed);
        CHECK(std::is_sorted(idx.begin(), idx.end()));
        CHECK(std::adjacent_find(idx.begin(), idx.end()) == idx.end());
        for (std::size_t i = 0; i < idx.size(); ++i) CHECK(test.y()(static_cast<Eigen::Index>(i)) == d.y()(static_cast<Eigen::Index>(idx[i])));
    }
}

TEST_CASE("split errors") {
    const auto d = test_support::random_dataset(10, 1, 1);
    CHECK_THROWS_AS(split(d, 0.0, 1), InvalidArgument);
    CHECK_THROWS_AS(split(d, 1.0, 1), InvalidArgument);
    CHECK_THROWS_AS(split(d, 0.01, 1), InvalidArgument);  // rounds to an empty test part
    CHECK_THROWS_AS(split(test_support::random_dataset(1, 1, 1), 0.5, 1), InvalidArgument);
}

TEST_CASE("scaler examples") {
    Eigen::MatrixXd x(3, 1);
    x << 0, 5, 10;
    Eigen::VectorXd y(3);
    y << 1, 2, 3;
    const Dataset train({"a"}, "y", x, y);
    const auto s = fit_scaler(train);
    const auto t = apply_scaler(s, train);
    CHECK(t.x()(0, 0) == 0.0);
    CHECK(t.x()(1, 0) == 0.5);
    CHECK(t.x()(2, 0) == 1.0);
    CHECK(t.y()(1) == 0.5);

    Eigen::MatrixXd xt(1, 1);
    xt << 12;
    Eigen::VectorXd yt(1);
    yt << 0;
    const auto u = apply_scaler(s, Dataset({"a"}, "y", xt, yt));
    CHECK(u.x()(0, 0) == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(u.y()(0) == -0.5);
}

TEST_CASE("scaler round trip and idempotence on training data") {
    Rng rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.below(50), p = 1 + rng.below(5);
        Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
        for (auto& v : x.reshaped()) v = rng.uniform(-1e3, 1e3);
        Eigen::VectorXd y(static_cast<Eigen::Index>(n));
        for (auto& v : y) v = rng.normal() * 50.0 + 7.0;
        std::vector<std::string> names(p);
        for (std::size_t j = 0; j < p; ++j) names[j] = "c" + std::to_string(j);
        const Dataset d(names, "y", x, y);
        const auto s = fit_scaler(d);
        const auto t = apply_scaler(s, d);
        for (Eigen::Index j = 0; j < t.x().cols(); ++j) {
            CHECK(t.x().col(j).minCoeff() == 0.0);
            CHECK(t.x().col(j).maxCoeff() == 1.0);
        }
        CHECK(t.y().minCoeff() == 0.0);
        CHECK(t.y().maxCoeff() == 1.0);

        const auto back = s.invert(t);
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double a = back.x().reshaped()(i), b = x.reshaped()(i);
            CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)));
        }
        for (Eigen::Index i = 0; i < y.size(); ++i)
            CHECK(std::abs(back.y()(i) - y(i)) <= 1e-12 * std::max(1.0, std::abs(y(i))));
    }
}

TEST_CASE("scaler rejects constant columns") {
    Eigen::MatrixXd x(3, 2);
    x << 1, 4, 2, 4, 3, 4;
    Eigen::VectorXd y(3);
    y << 1, 2, 3;
    CHECK_THROWS_AS(fit_scaler(Dataset({"a", "b"}, "y", x, y)), DataError);
    Eigen::VectorXd flat = Eigen::VectorXd::Constant(3, 5.0);
    CHECK_THROWS_AS(fit_scaler(Dataset({"a", "b"}, "y", x.leftCols(1), flat)), DataError);
}

TEST_CASE("Dataset basics") {
    const auto d = test_support::random_dataset(5, 3, 2);
    CHECK(d.covariate_index("c2") == 2);
    CHECK_THROWS_AS(d.covariate_index("nope"), DataError);
    const std::vector<std::size_t> rows{4, 0};
    const auto s = d.subset(rows);
    CHECK(s.rows() == 2);
    CHECK(s.y()(0) == d.y()(4));
    CHECK(s.x()(1, 2) == d.x()(0, 2));
    CHECK_THROWS_AS(Dataset({"a"}, "y", Eigen::MatrixXd(2, 1), Eigen::VectorXd(3)), DataError);
}
