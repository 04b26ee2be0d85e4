#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iabsim/agent.hpp"
#include "iabsim/config.hpp"
#include "iabsim/env.hpp"

namespace iabsim {

struct EpisodeRecord {
    int episode = 0;        // 1-based
    int train_reward = 0;
    double moving_avg = 0.0;
    double epsilon_end = 0.0;
    double mean_throughput_gbps = 0.0;  // per-interval aggregate allocated DL+UL

    bool operator==(const EpisodeRecord&) const = default;
};

struct TrainingReport {
    int hidden_layers = 0;
    int hidden_width = 0;
    std::uint64_t seed = 0;
    double stop_threshold = 0.0;

    std::vector<EpisodeRecord> episodes;
    std::optional<int> episodes_to_target;  // empty = did not converge
    int last_episode_reward = 0;
    double final_window_avg = 0.0;
    int validation_reward = 0;
    int test_reward = 0;
    int full_day_reward = 0;  // greedy rollout over all 288 steps
    int oracle_full_day = 0;
    double mean_demand_gbps = 0.0;  // full-day aggregate DL+UL demand mean
};

struct SweepCell {
    int hidden_layers = 0;
    int hidden_width = 0;
    TrainingReport report;
};

struct SweepResult {
    std::vector<SweepCell> cells;
};

/// Environment for a run: topology from the config, profiles generated
/// from profile_seed or loaded from profiles_dir.
SlicingEnv make_env(const RunConfig& config);

/// Greedy rollout over a split with exploration and learning off.
int evaluate(const Agent& agent, SlicingEnv& env, Split split);

/// Sequential feasibility search: at every step take the first feasible
/// choice, preferring the wired link, then donors tightest-fit first.
/// On the default profiles this attains the split maximum.
int oracle_max_reward(SlicingEnv env, Split split);

/// Trains with early stopping (window moving average >= fraction x train
/// maximum), then evaluates the greedy policy on the validation, test and
/// full-day splits. Writes episodes.csv, report.json and the agent
/// checkpoint into config.out_dir when set.
TrainingReport run_training(const RunConfig& config);

/// Runs the config's layers x widths grid, one independent seed per cell;
/// failed cells are recorded as DNC. Writes sweep.csv plus per-cell
/// subdirectories under config.out_dir when set.
SweepResult run_sweep(const RunConfig& config);

/// Writes episodes.csv and report.json for one report.
void export_outputs(const TrainingReport& report, const std::string& dir);

void write_sweep_csv(const SweepResult& result, const std::string& path);

std::vector<EpisodeRecord> parse_episodes_csv(const std::string& path);

std::string report_to_json(const TrainingReport& report);

}  // namespace iabsim
