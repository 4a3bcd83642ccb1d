#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "reqslice/backend.hpp"
#include "reqslice/prompt.hpp"
#include "reqslice/verdict.hpp"

namespace reqslice {

struct ExperimentPlan {
    std::string model_path;
    std::string requirements_path;
    std::string training_path;  // may be empty when only zero-shot runs
    std::vector<Verbosity> verbosities{Verbosity::High, Verbosity::Medium, Verbosity::Low};
    std::vector<Strategy> strategies{Strategy::ChainOfThought, Strategy::NShot,
                                     Strategy::ZeroShot};
    int repetitions = 3;
    BackendConfig backend;
    int suite_size = 40;
    int steps = 50;
    uint64_t seed = 0;
    int n_examples = 1;
    int token_limit = 128000;
    std::string out_dir;
    int max_workers = 4;
};

// Plan file: JSON mirroring ExperimentPlan; relative paths resolve against
// the plan file's directory.
ExperimentPlan load_plan(const std::string& path);

struct CellResult {
    std::string config_code;  // "H-CT" ... "L-ZS"
    std::string requirement_id;
    std::vector<Outcome> iteration_outcomes;
    std::vector<int> iteration_sizes;
    std::vector<std::set<int>> iteration_kept;
    std::optional<Outcome> union_outcome;  // present iff repetitions > 1
    std::optional<int> union_size;
    std::set<int> union_kept;
    std::string error;  // nonempty when the cell failed; other cells still run
    std::vector<std::string> log_lines;
};

struct ExperimentReport {
    std::vector<std::string> config_codes;     // row order
    std::vector<std::string> requirement_ids;  // column group order
    int repetitions = 1;
    uint64_t seed = 0;
    std::vector<CellResult> cells;  // config-major, requirement-minor

    int iteration_slice_count() const;
    int union_slice_count() const;
};

ExperimentReport run_experiment(const ExperimentPlan& plan);

std::string render_accuracy_markdown(const ExperimentReport& r);
std::string render_accuracy_csv(const ExperimentReport& r);
std::string render_size_markdown(const ExperimentReport& r);
std::string render_size_csv(const ExperimentReport& r);

// Writes report_accuracy.md/.csv, report_size.md/.csv and run.log into the
// plan's out_dir (slices are written while the grid runs).
void write_report_files(const ExperimentReport& r, const std::string& out_dir);

}  // namespace reqslice
