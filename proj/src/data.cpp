#include "fnnsel/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "fnnsel/errors.hpp"
#include "fnnsel/random.hpp"

namespace fnnsel {

Dataset::Dataset(std::vector<std::string> covariate_names, std::string response_name, Eigen::MatrixXd x,
                 Eigen::VectorXd y)
    : names_(std::move(covariate_names)), response_(std::move(response_name)), x_(std::move(x)), y_(std::move(y)) {
    if (x_.rows() != y_.size()) throw DataError("covariate and response lengths differ");
    if (static_cast<std::size_t>(x_.cols()) != names_.size()) throw DataError("covariate name count mismatch");
}

std::size_t Dataset::covariate_index(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw DataError("unknown covariate '" + name + "'");
    return static_cast<std::size_t>(it - names_.begin());
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Eigen::MatrixXd xs(static_cast<Eigen::Index>(rows.size()), x_.cols());
    Eigen::VectorXd ys(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= this->rows()) throw InvalidArgument("row index out of range");
        const auto r = static_cast<Eigen::Index>(rows[i]);
        xs.row(static_cast<Eigen::Index>(i)) = x_.row(r);
        ys(static_cast<Eigen::Index>(i)) = y_(r);
    }
    return Dataset(names_, response_, std::move(xs), std::move(ys));
}

namespace {

std::string trim(std::string_view s) {
    auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

// Splits one line on commas, honoring double-quoted fields.
std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.data();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

LoadResult load_csv(const std::filesystem::path& path, const std::string& response_name) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line)) throw DataError("'" + path.string() + "' has no header row");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const auto header = split_fields(line);

    auto response_it = std::find(header.begin(), header.end(), response_name);
    if (response_it == header.end()) throw DataError("response column '" + response_name + "' not found");
    const auto response_col = static_cast<std::size_t>(response_it - header.begin());

    std::vector<std::string> names;
    for (std::size_t c = 0; c < header.size(); ++c)
        if (c != response_col) names.push_back(header[c]);

    std::vector<double> values;  // row-major, header.size() per row
    LoadResult result;
    std::vector<double> row(header.size());
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++result.rows_read;
        const auto fields = split_fields(line);
        bool ok = fields.size() == header.size();
        for (std::size_t c = 0; ok && c < fields.size(); ++c) ok = parse_number(fields[c], row[c]);
        if (!ok) {
            ++result.rows_rejected;
            continue;
        }
        values.insert(values.end(), row.begin(), row.end());
    }

    const std::size_t n = values.size() / header.size();
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(names.size()));
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::Index out_col = 0;
        for (std::size_t c = 0; c < header.size(); ++c) {
            const double v = values[i * header.size() + c];
            if (c == response_col)
                y(static_cast<Eigen::Index>(i)) = v;
            else
                x(static_cast<Eigen::Index>(i), out_col++) = v;
        }
    }
    result.data = Dataset(std::move(names), response_name, std::move(x), std::move(y));
    return result;
}

namespace {

// Partial Fisher-Yates: the first n_test slots become the sampled rows.
std::vector<std::size_t> sample_rows(std::size_t n, std::size_t n_test, std::uint64_t seed) {
    if (n_test == 0 || n_test >= n) throw InvalidArgument("split leaves an empty part");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = 0; i < n_test; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(perm[i], perm[j]);
    }
    perm.resize(n_test);
    std::sort(perm.begin(), perm.end());
    return perm;
}

std::pair<Dataset, Dataset> partition(const Dataset& data, const std::vector<std::size_t>& test) {
    std::vector<std::size_t> train;
    train.reserve(data.rows() - test.size());
    std::size_t t = 0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        if (t < test.size() && test[t] == i)
            ++t;
        else
            train.push_back(i);
    }
    return {data.subset(train), data.subset(test)};
}

}  // namespace

std::vector<std::size_t> test_rows(std::size_t n, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw InvalidArgument("test fraction must lie in (0, 1)");
    if (n < 2) throw InvalidArgument("split needs at least two rows");
    const auto n_test = static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(n) + 0.5));
    return sample_rows(n, n_test, seed);
}

std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction, std::uint64_t seed) {
    return partition(data, test_rows(data.rows(), test_fraction, seed));
}

std::pair<Dataset, Dataset> split_count(const Dataset& data, std::size_t n_test, std::uint64_t seed) {
    return partition(data, sample_rows(data.rows(), n_test, seed));
}

Scaler::Scaler(std::vector<Range> covariates, Range response)
    : covariates_(std::move(covariates)), response_(response) {
    auto check = [](const Range& r) {
        if (!(r.max > r.min)) throw DataError("scaler range must satisfy max > min");
    };
    for (const auto& r : covariates_) check(r);
    check(response_);
}

Dataset Scaler::apply(const Dataset& data) const {
    if (data.covariates() != covariates_.size()) throw InvalidArgument("scaler column count mismatch");
    Eigen::MatrixXd x = data.x();
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const auto& r = covariates_[static_cast<std::size_t>(c)];
        x.col(c) = (x.col(c).array() - r.min) / (r.max - r.min);
    }
    Eigen::VectorXd y = (data.y().array() - response_.min) / (response_.max - response_.min);
    return Dataset(data.covariate_names(), data.response_name(), std::move(x), std::move(y));
}

Dataset Scaler::invert(const Dataset& data) const {
    if (data.covariates() != covariates_.size()) throw InvalidArgument("scaler column count mismatch");
    Eigen::MatrixXd x = data.x();
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const auto& r = covariates_[static_cast<std::size_t>(c)];
        x.col(c) = x.col(c).array() * (r.max - r.min) + r.min;
    }
    Eigen::VectorXd y = data.y().array() * (response_.max - response_.min) + response_.min;
    return Dataset(data.covariate_names(), data.response_name(), std::move(x), std::move(y));
}

Scaler fit_scaler(const Dataset& train) {
    if (train.rows() == 0) throw DataError("cannot fit a scaler on an empty dataset");
    std::vector<Scaler::Range> ranges;
    for (Eigen::Index c = 0; c < train.x().cols(); ++c) {
        Scaler::Range r{train.x().col(c).minCoeff(), train.x().col(c).maxCoeff()};
        if (!(r.max > r.min))
            throw DataError("column '" + train.covariate_names()[static_cast<std::size_t>(c)] + "' is constant");
        ranges.push_back(r);
    }
    Scaler::Range response{train.y().minCoeff(), train.y().maxCoeff()};
    if (!(response.max > response.min)) throw DataError("response column is constant");
    return Scaler(std::move(ranges), response);
}

Dataset apply_scaler(const Scaler& scaler, const Dataset& data) { return scaler.apply(data); }

}  // namespace fnnsel
