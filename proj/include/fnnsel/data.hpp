#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace fnnsel {

/// Numeric design matrix plus response, with column names.
///
/// Covariates are stored column-major in `x` (n rows, one column per
/// covariate); the response lives separately in `y` and never appears among
/// the covariates.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<std::string> covariate_names, std::string response_name, Eigen::MatrixXd x,
            Eigen::VectorXd y);

    std::size_t rows() const noexcept { return static_cast<std::size_t>(x_.rows()); }
    std::size_t covariates() const noexcept { return static_cast<std::size_t>(x_.cols()); }

    const Eigen::MatrixXd& x() const noexcept { return x_; }
    const Eigen::VectorXd& y() const noexcept { return y_; }
    const std::vector<std::string>& covariate_names() const noexcept { return names_; }
    const std::string& response_name() const noexcept { return response_; }

    /// Index of a covariate by name; throws DataError when absent.
    std::size_t covariate_index(const std::string& name) const;

    /// New dataset holding the given rows, in the given order.
    Dataset subset(std::span<const std::size_t> rows) const;

private:
    std::vector<std::string> names_;
    std::string response_;
    Eigen::MatrixXd x_;
    Eigen::VectorXd y_;
};

struct LoadResult {
    Dataset data;
    std::size_t rows_read = 0;      // data rows present in the file
    std::size_t rows_rejected = 0;  // rows dropped for missing or non-numeric cells
};

/// Reads a comma-separated file with a header row. Rows containing an empty or
/// non-numeric cell are dropped and counted; values are never altered.
LoadResult load_csv(const std::filesystem::path& path, const std::string& response_name);

/// Seeded uniform partition. The test part has round-half-up(test_fraction * n)
/// rows; both parts keep the original row order.
std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction, std::uint64_t seed);

/// Row indices of the test part of split(), ascending. Exposed for reporting.
std::vector<std::size_t> test_rows(std::size_t n, double test_fraction, std::uint64_t seed);

/// Seeded partition with exactly `n_test` rows in the second part.
std::pair<Dataset, Dataset> split_count(const Dataset& data, std::size_t n_test, std::uint64_t seed);

/// Per-column min-max transform learned from training rows. The response is
/// scaled along with the covariates.
class Scaler {
public:
    struct Range {
        double min = 0.0;
        double max = 1.0;
    };

    Scaler(std::vector<Range> covariates, Range response);

    const std::vector<Range>& covariate_ranges() const noexcept { return covariates_; }
    const Range& response_range() const noexcept { return response_; }

    Dataset apply(const Dataset& data) const;
    Dataset invert(const Dataset& data) const;

private:
    std::vector<Range> covariates_;
    Range response_;
};

/// Learns per-column (min, max); throws DataError on a constant column.
Scaler fit_scaler(const Dataset& train);

/// (x - min) / (max - min) per column. Values outside the training range are
/// not clipped.
Dataset apply_scaler(const Scaler& scaler, const Dataset& data);

}  // namespace fnnsel
