#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iabsim/agent.hpp"

namespace iabsim {

struct EarlyStopConfig {
    int window = 10;          // moving-average window, episodes
    double fraction = 0.975;  // of the split's maximum reward
    int max_episodes = 200;   // give up past this, report DNC
};

/// Everything one training run needs. Parsed from a flat key = value file;
/// see parse_run_config for the key list.
struct RunConfig {
    int n_bs = 7;
    double wired_mbps = 1000.0;
    double wireless_mbps = 1000.0;

    std::uint64_t profile_seed = 42;  // used when profiles_dir is empty
    std::string profiles_dir;         // load slices.csv / loads.csv from here instead

    int hidden_layers = 1;
    int hidden_width = 32;
    Hyperparameters hp;

    EarlyStopConfig stop;
    std::uint64_t seed = 1;
    std::string out_dir;

    // Architecture sweep grid.
    std::vector<int> sweep_layers{1, 3, 5};
    std::vector<int> sweep_widths{8, 16, 24, 32, 40, 48};
    int jobs = 0;  // sweep parallelism; 0 = hardware concurrency
};

/// Reads `key = value` lines ('#' comments, blank lines allowed). Unknown
/// keys are errors. Recognized keys:
///   n_bs, wired_mbps, wireless_mbps, profile_seed, profiles_dir,
///   hidden_layers, hidden_width, alpha, gamma, epsilon_init,
///   epsilon_decay, epsilon_min, minibatch, buffer_capacity,
///   target_sync_period, target_smooth_tau, clip_gradients, clip_norm,
///   stop_window, stop_fraction, max_episodes, seed, out_dir,
///   sweep_layers, sweep_widths, jobs
RunConfig parse_run_config(const std::string& path);

void validate_run_config(const RunConfig& config);

}  // namespace iabsim
