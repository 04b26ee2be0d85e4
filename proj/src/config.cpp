#include "iabsim/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "iabsim/util.hpp"

namespace iabsim {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void config_fail(const std::string& path, int line_no, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

long to_long(const std::string& path, int line_no, const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::logic_error&) {
        config_fail(path, line_no, key + " expects an integer, got '" + value + "'");
    }
}

std::uint64_t to_u64(const std::string& path, int line_no, const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::logic_error&) {
        config_fail(path, line_no, key + " expects an unsigned integer, got '" + value + "'");
    }
}

double to_double(const std::string& path, int line_no, const std::string& key, const std::string& value) {
    try {
        return parse_double(value);
    } catch (const std::invalid_argument&) {
        config_fail(path, line_no, key + " expects a number, got '" + value + "'");
    }
}

bool to_bool(const std::string& path, int line_no, const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    config_fail(path, line_no, key + " expects true or false, got '" + value + "'");
}

std::vector<int> to_int_list(const std::string& path, int line_no, const std::string& key,
                             const std::string& value) {
    std::vector<int> items;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        items.push_back(static_cast<int>(to_long(path, line_no, key, trim(item))));
    }
    if (items.empty()) config_fail(path, line_no, key + " expects a comma-separated integer list");
    return items;
}

}  // namespace

RunConfig parse_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file " + path);

    RunConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) config_fail(path, line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "n_bs") config.n_bs = static_cast<int>(to_long(path, line_no, key, value));
        else if (key == "wired_mbps") config.wired_mbps = to_double(path, line_no, key, value);
        else if (key == "wireless_mbps") config.wireless_mbps = to_double(path, line_no, key, value);
        else if (key == "profile_seed") config.profile_seed = to_u64(path, line_no, key, value);
        else if (key == "profiles_dir") config.profiles_dir = value;
        else if (key == "hidden_layers") config.hidden_layers = static_cast<int>(to_long(path, line_no, key, value));
        else if (key == "hidden_width") config.hidden_width = static_cast<int>(to_long(path, line_no, key, value));
        else if (key == "alpha") config.hp.alpha = to_double(path, line_no, key, value);
        else if (key == "gamma") config.hp.gamma = to_double(path, line_no, key, value);
        else if (key == "epsilon_init") config.hp.epsilon_init = to_double(path, line_no, key, value);
        else if (key == "epsilon_decay") config.hp.epsilon_decay = to_double(path, line_no, key, value);
        else if (key == "epsilon_min") config.hp.epsilon_min = to_double(path, line_no, key, value);
        else if (key == "minibatch") config.hp.minibatch = static_cast<int>(to_long(path, line_no, key, value));
        else if (key == "buffer_capacity") config.hp.buffer_capacity = static_cast<int>(to_long(path, line_no, key, value));
        else if (key == "target_sync_period") config.hp.target_sync_period = static_cast<int>(to_long(path, line_no, key, value));
        else if (key == "target_smooth_tau") config.hp.target_smooth_tau = to_double(path, line_no, key, value);
        else if (key == "clip_gradients") config.hp.clip_gradients = to_bool(path, line_no, key, value);
        else if (key == "clip_norm") config.hp.clip_norm = to_double(path, line_no, key, value);
        else if (key == "stop_window") config.stop.window = static_cast<int>(to_long(path, line_no, key, value));
        else if (key == "stop_fraction") config.stop.fraction = to_double(path, line_no, key, value);
        else if (key == "max_episodes") config.stop.max_episodes = static_cast<int>(to_long(path, line_no, key, value));
        else if (key == "seed") config.seed = to_u64(path, line_no, key, value);
        else if (key == "out_dir") config.out_dir = value;
        else if (key == "sweep_layers") config.sweep_layers = to_int_list(path, line_no, key, value);
        else if (key == "sweep_widths") config.sweep_widths = to_int_list(path, line_no, key, value);
        else if (key == "jobs") config.jobs = static_cast<int>(to_long(path, line_no, key, value));
        else config_fail(path, line_no, "unknown key '" + key + "'");
    }
    validate_run_config(config);
    return config;
}

void validate_run_config(const RunConfig& config) {
    if (config.n_bs < 2) throw std::runtime_error("n_bs must be >= 2");
    if (config.stop.window < 1) throw std::runtime_error("stop_window must be >= 1");
    if (!(config.stop.fraction > 0.0 && config.stop.fraction <= 1.0)) {
        throw std::runtime_error("stop_fraction must be in (0, 1]");
    }
    if (config.stop.max_episodes < 0) throw std::runtime_error("max_episodes must be >= 0");
    if (config.hidden_layers < 1 || config.hidden_width < 1) {
        throw std::runtime_error("network needs at least one hidden layer and one neuron");
    }
    if (config.hp.buffer_capacity < 1) throw std::runtime_error("buffer_capacity must be >= 1");
    if (config.hp.minibatch < 1 || config.hp.minibatch > config.hp.buffer_capacity) {
        throw std::runtime_error("minibatch must be in 1..buffer_capacity");
    }
    if (!(config.hp.alpha > 0.0)) throw std::runtime_error("alpha must be positive");
    if (!(config.hp.gamma >= 0.0 && config.hp.gamma <= 1.0)) throw std::runtime_error("gamma must be in [0, 1]");
    if (!(config.hp.epsilon_init >= 0.0 && config.hp.epsilon_init <= 1.0)) {
        throw std::runtime_error("epsilon_init must be in [0, 1]");
    }
    if (!(config.hp.epsilon_decay >= 0.0 && config.hp.epsilon_decay <= 1.0)) {
        throw std::runtime_error("epsilon_decay must be in [0, 1]");
    }
    if (config.hp.epsilon_min < 0.0) throw std::runtime_error("epsilon_min must be >= 0");
    if (config.hp.target_sync_period < 1) throw std::runtime_error("target_sync_period must be >= 1");
    if (!(config.hp.target_smooth_tau > 0.0 && config.hp.target_smooth_tau <= 1.0)) {
        throw std::runtime_error("target_smooth_tau must be in (0, 1]");
    }
    for (int l : config.sweep_layers) {
        if (l < 1) throw std::runtime_error("sweep_layers entries must be >= 1");
    }
    for (int w : config.sweep_widths) {
        if (w < 1) throw std::runtime_error("sweep_widths entries must be >= 1");
    }
}

}  // namespace iabsim
