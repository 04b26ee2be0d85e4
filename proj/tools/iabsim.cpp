#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "iabsim/config.hpp"
#include "iabsim/harness.hpp"

namespace {

using namespace iabsim;

int cmd_gen_profiles(std::uint64_t seed, const std::string& out_dir) {
    ProfileGenConfig gen;
    gen.seed = seed;
    const ProfileSet profiles = generate_default_profiles(gen);
    save_profiles_csv(profiles, out_dir);
    std::cout << "wrote " << (std::filesystem::path(out_dir) / "slices.csv").string() << " and "
              << (std::filesystem::path(out_dir) / "loads.csv").string() << "\n";
    return 0;
}

RunConfig load_config(const std::string& config_path, const std::string& out_dir, bool seed_given,
                      std::uint64_t seed) {
    RunConfig config = config_path.empty() ? RunConfig{} : parse_run_config(config_path);
    if (seed_given) config.seed = seed;
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (config.out_dir.empty()) throw std::runtime_error("no output directory (pass --out or set out_dir)");
    validate_run_config(config);
    return config;
}

int cmd_train(const RunConfig& config) {
    const TrainingReport report = run_training(config);
    if (report.episodes_to_target) {
        std::cout << "converged after " << *report.episodes_to_target << " episodes (moving avg "
                  << report.final_window_avg << " >= " << report.stop_threshold << ")\n";
    } else {
        std::cout << "did not converge within " << config.stop.max_episodes << " episodes\n";
    }
    std::cout << "validation " << report.validation_reward << "/27, test " << report.test_reward
              << "/60, full day " << report.full_day_reward << "/288\n"
              << "outputs in " << config.out_dir << "\n";
    return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& split_text,
             const std::string& profiles_dir) {
    const Agent agent = Agent::load_checkpoint(checkpoint_path);
    RunConfig config;
    config.profiles_dir = profiles_dir;
    SlicingEnv env = make_env(config);
    const Split split = split_from_name(split_text);
    const int reward = evaluate(agent, env, split);
    std::cout << split_text << " reward " << reward << "/" << env.max_episode_reward(split) << "\n";
    return 0;
}

int cmd_sweep(const RunConfig& config) {
    const SweepResult result = run_sweep(config);
    for (const SweepCell& cell : result.cells) {
        std::cout << cell.hidden_layers << " x " << cell.hidden_width << ": ";
        if (cell.report.episodes_to_target) {
            std::cout << *cell.report.episodes_to_target << " episodes, validation "
                      << cell.report.validation_reward << ", test " << cell.report.test_reward << "\n";
        } else {
            std::cout << "DNC\n";
        }
    }
    std::cout << "sweep table in " << (std::filesystem::path(config.out_dir) / "sweep.csv").string() << "\n";
    return 0;
}

int cmd_oracle(const std::string& profiles_dir, const std::string& split_text) {
    RunConfig config;
    config.profiles_dir = profiles_dir;
    SlicingEnv env = make_env(config);
    const Split split = split_from_name(split_text);
    const int reward = oracle_max_reward(env, split);
    std::cout << "oracle " << split_text << " reward " << reward << "/" << env.max_episode_reward(split)
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"IAB backhaul slicing simulator and DDQN training harness"};
    app.require_subcommand(1);

    std::uint64_t seed = 42;
    std::string out_dir;
    std::string config_path;
    std::string checkpoint_path;
    std::string profiles_dir;
    std::string split_text = "full";

    CLI::App* gen = app.add_subcommand("gen-profiles", "Generate the reference traffic day as CSV");
    gen->add_option("--seed", seed, "Generator seed")->required();
    gen->add_option("--out", out_dir, "Output directory")->required();

    CLI::App* train = app.add_subcommand("train", "Train a DDQN agent with early stopping");
    train->add_option("--config", config_path, "Run config file (key = value lines)")->required();
    std::uint64_t train_seed = 0;
    CLI::Option* train_seed_opt = train->add_option("--seed", train_seed, "Override the config seed");
    train->add_option("--out", out_dir, "Output directory (overrides out_dir in the config)")->required();

    CLI::App* eval_cmd = app.add_subcommand("eval", "Greedy evaluation of a checkpoint on one split");
    eval_cmd->add_option("--checkpoint", checkpoint_path, "agent_checkpoint.json path")->required();
    eval_cmd->add_option("--split", split_text, "train|val|test|full")->required();
    eval_cmd->add_option("--profiles", profiles_dir, "Directory holding slices.csv and loads.csv")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "Run the layers x widths architecture sweep");
    sweep->add_option("--config", config_path, "Run config file")->required();
    sweep->add_option("--out", out_dir, "Output directory (overrides out_dir in the config)")->required();
    int jobs = -1;
    sweep->add_option("--jobs", jobs, "Parallel cells (0 = hardware concurrency)");

    CLI::App* oracle = app.add_subcommand("oracle", "Sequential feasibility bound for one split");
    oracle->add_option("--profiles", profiles_dir, "Directory holding slices.csv and loads.csv")->required();
    oracle->add_option("--split", split_text, "train|val|test|full")->required();

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return cmd_gen_profiles(seed, out_dir);
        if (train->parsed()) {
            return cmd_train(load_config(config_path, out_dir, train_seed_opt->count() > 0, train_seed));
        }
        if (eval_cmd->parsed()) return cmd_eval(checkpoint_path, split_text, profiles_dir);
        if (sweep->parsed()) {
            RunConfig config = load_config(config_path, out_dir, false, 0);
            if (jobs >= 0) config.jobs = jobs;
            return cmd_sweep(config);
        }
        if (oracle->parsed()) return cmd_oracle(profiles_dir, split_text);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
