#include "iabsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "iabsim/util.hpp"

namespace iabsim {

SlicingEnv make_env(const RunConfig& config) {
    std::shared_ptr<const ProfileSet> profiles;
    if (config.profiles_dir.empty()) {
        ProfileGenConfig gen;
        gen.seed = config.profile_seed;
        gen.wired_capacity_mbps = config.wired_mbps;
        gen.wireless_capacity_mbps = config.wireless_mbps;
        profiles = std::make_shared<const ProfileSet>(generate_default_profiles(gen));
    } else {
        profiles = std::make_shared<const ProfileSet>(load_profiles_csv(config.profiles_dir));
    }
    return SlicingEnv(build_topology(config.n_bs, config.wired_mbps, config.wireless_mbps), std::move(profiles));
}

int evaluate(const Agent& agent, SlicingEnv& env, Split split) {
    env.reset(split);
    int total = 0;
    while (!env.done()) {
        const int action = agent.greedy_action(env.observe());
        total += env.step(Action::from_index(action, env.action_count())).reward;
    }
    return total;
}

namespace {

// Bottleneck residual of a choice's path toward the core, per direction.
MbpsPair path_residual(const SlicingEnv& env, int choice_bs) {
    MbpsPair res{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    for (std::size_t link_index : env.topology().candidate_path(choice_bs)) {
        res.dl = std::min(res.dl, env.topology().residual(link_index, Direction::dl));
        res.ul = std::min(res.ul, env.topology().residual(link_index, Direction::ul));
    }
    return res;
}

}  // namespace

int oracle_max_reward(SlicingEnv env, Split split) {
    env.reset(split);
    int total = 0;
    while (!env.done()) {
        const MbpsPair demand = env.profiles().slice_demand(env.current_interval(), env.current_slice());
        const std::set<int> feasible = env.feasible_choices();

        int pick = 0;  // infeasible steps fall through to the wired link for reward 0
        if (feasible.count(0) != 0) {
            pick = 0;
        } else if (!feasible.empty()) {
            // Tightest feasible donor first, ties toward the lower BS id.
            double best_spare = std::numeric_limits<double>::max();
            for (int choice : feasible) {
                const MbpsPair res = path_residual(env, choice + 1);
                const double spare = std::min(res.dl - demand.dl, res.ul - demand.ul);
                if (spare < best_spare) {
                    best_spare = spare;
                    pick = choice;
                }
            }
        }
        total += env.step(Action::from_index(pick, env.action_count())).reward;
    }
    return total;
}

namespace {

double mean_full_day_demand_gbps(const SlicingEnv& env) {
    const ProfileSet& profiles = env.profiles();
    double total_mbps = 0.0;
    for (int t = 0; t < profiles.interval_count(); ++t) {
        for (int s = 1; s <= profiles.slice_count(); ++s) {
            const MbpsPair demand = profiles.slice_demand(t, s);
            total_mbps += demand.dl + demand.ul;
        }
    }
    return total_mbps / profiles.interval_count() / 1000.0;
}

}  // namespace

TrainingReport run_training(const RunConfig& config) {
    validate_run_config(config);
    SlicingEnv env = make_env(config);

    TrainingReport report;
    report.hidden_layers = config.hidden_layers;
    report.hidden_width = config.hidden_width;
    report.seed = config.seed;
    report.oracle_full_day = oracle_max_reward(env, Split::full_day);
    report.mean_demand_gbps = mean_full_day_demand_gbps(env);

    const int train_max = env.max_episode_reward(Split::train);
    const double threshold = config.stop.fraction * train_max;
    report.stop_threshold = threshold;
    const int train_intervals = train_max / env.profiles().slice_count();

    Agent agent(env.observation_size(), env.action_count(), config.hidden_layers, config.hidden_width,
                config.hp, config.seed);

    for (int episode = 1; episode <= config.stop.max_episodes; ++episode) {
        env.reset(Split::train);
        int episode_reward = 0;
        double allocated_mbps = 0.0;
        while (!env.done()) {
            const StepOutcome outcome = agent.interact(env);
            episode_reward += outcome.reward;
            allocated_mbps += outcome.allocated_mbps.dl + outcome.allocated_mbps.ul;
        }

        EpisodeRecord record;
        record.episode = episode;
        record.train_reward = episode_reward;
        record.epsilon_end = agent.epsilon();
        record.mean_throughput_gbps = allocated_mbps / train_intervals / 1000.0;
        const int window = std::min<int>(config.stop.window, static_cast<int>(report.episodes.size()) + 1);
        double sum = episode_reward;
        for (int k = 0; k < window - 1; ++k) {
            sum += report.episodes[report.episodes.size() - 1 - static_cast<std::size_t>(k)].train_reward;
        }
        record.moving_avg = sum / window;
        report.episodes.push_back(record);

        // The stop test arms only once a full window exists.
        if (episode >= config.stop.window && record.moving_avg >= threshold) {
            report.episodes_to_target = episode;
            break;
        }
    }

    if (!report.episodes.empty()) {
        report.last_episode_reward = report.episodes.back().train_reward;
        report.final_window_avg = report.episodes.back().moving_avg;
    }
    report.validation_reward = evaluate(agent, env, Split::validation);
    report.test_reward = evaluate(agent, env, Split::test);
    report.full_day_reward = evaluate(agent, env, Split::full_day);

    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        export_outputs(report, config.out_dir);
        agent.save_checkpoint((std::filesystem::path(config.out_dir) / "agent_checkpoint.json").string());
    }
    return report;
}

SweepResult run_sweep(const RunConfig& config) {
    validate_run_config(config);
    SweepResult result;
    for (int layers : config.sweep_layers) {
        for (int width : config.sweep_widths) {
            SweepCell cell;
            cell.hidden_layers = layers;
            cell.hidden_width = width;
            result.cells.push_back(cell);
        }
    }

    const int cell_count = static_cast<int>(result.cells.size());
    int jobs = config.jobs > 0 ? config.jobs : static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::clamp(jobs, 1, std::max(1, cell_count));

    std::atomic<int> next{0};
    const auto worker = [&]() {
        while (true) {
            const int index = next.fetch_add(1);
            if (index >= cell_count) return;
            SweepCell& cell = result.cells[static_cast<std::size_t>(index)];

            RunConfig cell_config = config;
            cell_config.hidden_layers = cell.hidden_layers;
            cell_config.hidden_width = cell.hidden_width;
            // Independent yet reproducible stream per cell.
            cell_config.seed = mix_seed(config.seed ^ mix_seed(static_cast<std::uint64_t>(cell.hidden_layers) << 32 |
                                                               static_cast<std::uint64_t>(cell.hidden_width)));
            if (!config.out_dir.empty()) {
                cell_config.out_dir = (std::filesystem::path(config.out_dir) /
                                       ("cell_" + std::to_string(cell.hidden_layers) + "x" +
                                        std::to_string(cell.hidden_width)))
                                          .string();
            } else {
                cell_config.out_dir.clear();
            }
            try {
                cell.report = run_training(cell_config);
            } catch (const std::exception&) {
                cell.report = TrainingReport{};
                cell.report.hidden_layers = cell.hidden_layers;
                cell.report.hidden_width = cell.hidden_width;
                cell.report.episodes_to_target = std::nullopt;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        write_sweep_csv(result, (std::filesystem::path(config.out_dir) / "sweep.csv").string());
    }
    return result;
}

void export_outputs(const TrainingReport& report, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::string episodes_path = (std::filesystem::path(dir) / "episodes.csv").string();
    std::ofstream episodes(episodes_path);
    if (!episodes) throw std::runtime_error("cannot write " + episodes_path);
    episodes << "episode,train_reward,moving_avg,epsilon,mean_throughput_gbps\n";
    for (const EpisodeRecord& r : report.episodes) {
        episodes << r.episode << ',' << r.train_reward << ',' << format_double(r.moving_avg) << ','
                 << format_double(r.epsilon_end) << ',' << format_double(r.mean_throughput_gbps) << '\n';
    }

    const std::string report_path = (std::filesystem::path(dir) / "report.json").string();
    std::ofstream out(report_path);
    if (!out) throw std::runtime_error("cannot write " + report_path);
    out << report_to_json(report) << '\n';
}

std::string report_to_json(const TrainingReport& report) {
    nlohmann::json doc;
    doc["format"] = "iabsim-report-v1";
    doc["hidden_layers"] = report.hidden_layers;
    doc["hidden_width"] = report.hidden_width;
    doc["seed"] = report.seed;
    doc["stop_threshold"] = report.stop_threshold;
    doc["converged"] = report.episodes_to_target.has_value();
    if (report.episodes_to_target) {
        doc["episodes_to_target"] = *report.episodes_to_target;
    } else {
        doc["episodes_to_target"] = nullptr;
    }
    doc["last_episode_reward"] = report.last_episode_reward;
    doc["final_window_avg"] = report.final_window_avg;
    doc["validation_reward"] = report.validation_reward;
    doc["test_reward"] = report.test_reward;
    doc["full_day_reward"] = report.full_day_reward;
    doc["oracle_full_day"] = report.oracle_full_day;
    doc["mean_demand_gbps"] = report.mean_demand_gbps;
    nlohmann::json episodes = nlohmann::json::array();
    for (const EpisodeRecord& r : report.episodes) {
        episodes.push_back({{"episode", r.episode},
                            {"train_reward", r.train_reward},
                            {"moving_avg", r.moving_avg},
                            {"epsilon", r.epsilon_end},
                            {"mean_throughput_gbps", r.mean_throughput_gbps}});
    }
    doc["episodes"] = std::move(episodes);
    return doc.dump(2);
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "hidden_layers,hidden_width,training_episodes,last_episode_reward,average_episode_reward,"
           "validation_reward,testing_reward,full_day_reward\n";
    for (const SweepCell& cell : result.cells) {
        out << cell.hidden_layers << ',' << cell.hidden_width << ',';
        if (cell.report.episodes_to_target) {
            out << *cell.report.episodes_to_target;
        } else {
            out << "DNC";
        }
        out << ',' << cell.report.last_episode_reward << ',' << format_double(cell.report.final_window_avg)
            << ',' << cell.report.validation_reward << ',' << cell.report.test_reward << ','
            << cell.report.full_day_reward << '\n';
    }
}

std::vector<EpisodeRecord> parse_episodes_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line) || line != "episode,train_reward,moving_avg,epsilon,mean_throughput_gbps") {
        throw std::runtime_error(path + ":1: unexpected episodes.csv header");
    }
    std::vector<EpisodeRecord> records;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 5) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 5 fields");
        }
        EpisodeRecord r;
        r.episode = static_cast<int>(parse_double(fields[0]));
        r.train_reward = static_cast<int>(parse_double(fields[1]));
        r.moving_avg = parse_double(fields[2]);
        r.epsilon_end = parse_double(fields[3]);
        r.mean_throughput_gbps = parse_double(fields[4]);
        records.push_back(r);
    }
    return records;
}

}  // namespace iabsim
