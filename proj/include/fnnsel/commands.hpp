#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fnnsel/selector.hpp"
#include "fnnsel/simlab.hpp"
#include "fnnsel/trainer.hpp"

namespace fnnsel {

// Application pipeline shared by `fit` and `select`: load, split, scale
// using the training rows only.
struct PreparedData {
    std::size_t rows_read = 0;
    std::size_t rows_rejected = 0;
    Dataset train;  // scaled
    Dataset test;   // scaled; empty when test_fraction == 0
};

/// `test_fraction` may be 0, in which case every row is used for training.
PreparedData prepare_data(const std::filesystem::path& path, const std::string& response, double test_fraction,
                          std::uint64_t seed);

/// Seed of the train/test split derived from the run seed.
std::uint64_t split_seed(std::uint64_t seed) noexcept;

struct SelectCommand {
    std::filesystem::path data;
    std::string response;
    SelectionConfig selection;  // selection.fit.seed is the run seed
    double test_fraction = 0.1;
};

struct ModelReport {
    FittedModel model;
    std::vector<std::string> input_names;
    std::optional<double> test_oos;
};

struct SelectOutcome {
    PreparedData data;
    SelectionResult result;
    ModelReport selected;
    ModelReport full;  // all covariates, q_max hidden nodes, same training rows
    double wall_time = 0.0;
    std::string report;
    std::string trace_csv;
};

SelectOutcome run_select(const SelectCommand& command);

struct FitCommand {
    std::filesystem::path data;
    std::string response;
    std::vector<std::string> inputs;  // covariate names
    std::size_t q = 1;
    FitConfig fit;
    double test_fraction = 0.1;
};

struct FitOutcome {
    PreparedData data;
    ModelReport model;
    double wall_time = 0.0;
    std::string report;
};

FitOutcome run_fit(const FitCommand& command);

struct SimulateOutcome {
    SimulationResult result;
    double wall_time = 0.0;
    std::string report;
};

SimulateOutcome run_simulate(const SimulationPlan& plan);

/// Trace as a flat CSV table with a header row.
std::vector<std::string> trace_header();
std::vector<std::vector<std::string>> trace_rows(const SelectionTrace& trace, const std::vector<std::string>& names);

}  // namespace fnnsel
