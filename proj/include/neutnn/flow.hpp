#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "neutnn/ppa.hpp"

namespace neutnn {

enum class Stage { Train, Eval, Prune, Sweep, Netlist, Forecast, Placecell };

std::string stage_name(Stage s);

/// Parsed central configuration file. Stages always execute in canonical
/// order (train, eval, prune, sweep, netlist, forecast, placecell)
/// regardless of how `flow` lists them.
struct FlowConfig {
    std::vector<Stage> flow;
    std::optional<Pdk> node;          // required when forecast is requested
    std::string model_path;
    std::string dataset_path;         // UCR text file or MNIST IDX directory
    std::string dataset_kind = "ucr"; // ucr | mnist
    uint64_t seed = 0;
    std::string out_dir = "out";
    int epochs = 5;
    bool dual_rail = true;            // UCR encoding
    int absent_threshold = 1;         // MNIST encoding
    int sample_limit = 0;             // 0 = no limit
    int prune_threshold = -1;         // -1 = default ceil(w_max/2)
    bool prune_binarize = true;
    std::string prune_mode = "remove_zero";
    std::vector<int> sweep_taus;      // empty = 0..w_max+1
    int pc_rows = 5;
    int pc_cols = 5;
    int pc_features = 4;
    int pc_environments = 3;
    int pc_trials = 50;
    int pc_epochs = 12;

    bool has_stage(Stage s) const;
    /// Effective configuration echoed as key=value lines.
    std::string echo() const;
};

/// key=value lines, '#' comments, unknown keys rejected with their line
/// number. Missing required fields and invalid enum values are errors.
FlowConfig parse_config(const std::string& text);
FlowConfig load_config(const std::string& path);

/// Runs the configured stages in canonical order. All artifacts land under
/// cfg.out_dir (the NEUTNN_OUT_DIR environment variable overrides it).
/// Returns 0 on success; stage errors are reported with the stage name
/// prefixed and yield a nonzero status.
int run_flow(const FlowConfig& cfg, std::ostream& log);

}  // namespace neutnn
