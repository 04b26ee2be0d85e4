#include "iabsim/agent.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "iabsim/util.hpp"

namespace iabsim {

void ReplayBuffer::push(Transition transition) {
    if (ring_.size() == capacity_) ring_.pop_front();
    ring_.push_back(std::move(transition));
    ++insertions_;
}

namespace {

int argmax_lowest_tie(const std::vector<double>& values) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(values.size()); ++k) {
        if (values[static_cast<std::size_t>(k)] > values[static_cast<std::size_t>(best)]) best = k;
    }
    return best;
}

}  // namespace

Agent::Agent(int observation_size, int action_count, int hidden_layers, int hidden_width,
             Hyperparameters hp, std::uint64_t seed)
    : hp_(hp),
      action_count_(action_count),
      online_(init_network(NetSpec{observation_size + action_count, hidden_layers, hidden_width, 1},
                           mix_seed(seed))),
      target_(online_),
      buffer_(static_cast<std::size_t>(hp.buffer_capacity)),
      epsilon_(hp.epsilon_init),
      rng_(mix_seed(seed ^ 0x5eedULL)) {
    if (action_count < 1) throw std::invalid_argument("agent needs at least one action");
    if (hp.minibatch < 1 || hp.minibatch > hp.buffer_capacity) {
        throw std::invalid_argument("minibatch size must be in 1..buffer capacity");
    }
}

Agent::Agent(QNetwork online, QNetwork target, Hyperparameters hp, double epsilon, long step_counter)
    : hp_(hp),
      action_count_(0),
      online_(std::move(online)),
      target_(std::move(target)),
      buffer_(static_cast<std::size_t>(hp.buffer_capacity)),
      epsilon_(epsilon),
      step_counter_(step_counter),
      rng_(mix_seed(0)) {}

int Agent::greedy_action(const Observation& observation) const {
    return argmax_lowest_tie(q_all_actions(online_, observation.values));
}

int Agent::select_action(const Observation& observation, bool greedy) {
    if (greedy) return greedy_action(observation);
    if (uniform01(rng_) >= epsilon_) return greedy_action(observation);
    return uniform_int(rng_, action_count_);
}

std::vector<double> Agent::compute_targets(const std::vector<Transition>& batch) const {
    if (batch.empty()) throw std::invalid_argument("target batch is empty");
    std::vector<double> targets;
    targets.reserve(batch.size());
    for (const Transition& tr : batch) {
        if (tr.terminal) {
            targets.push_back(tr.reward);
            continue;
        }
        // Double-Q decoupling: the online net picks the action, the target
        // net prices it.
        const int best = argmax_lowest_tie(q_all_actions(online_, tr.next_state));
        const std::vector<double> target_q = q_all_actions(target_, tr.next_state);
        targets.push_back(tr.reward + hp_.gamma * target_q[static_cast<std::size_t>(best)]);
    }
    return targets;
}

std::optional<double> Agent::learn_step() {
    std::optional<double> loss;
    if (buffer_.size() >= static_cast<std::size_t>(hp_.minibatch)) {
        // Uniform sample without replacement (partial Fisher-Yates).
        std::vector<std::size_t> indices(buffer_.size());
        std::iota(indices.begin(), indices.end(), std::size_t{0});
        std::vector<Transition> batch;
        batch.reserve(static_cast<std::size_t>(hp_.minibatch));
        for (int k = 0; k < hp_.minibatch; ++k) {
            const int j = k + uniform_int(rng_, static_cast<int>(indices.size()) - k);
            std::swap(indices[static_cast<std::size_t>(k)], indices[static_cast<std::size_t>(j)]);
            batch.push_back(buffer_.at(indices[static_cast<std::size_t>(k)]));
        }

        const std::vector<double> targets = compute_targets(batch);
        std::vector<TrainingSample> samples;
        samples.reserve(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            TrainingSample sample;
            sample.input = batch[i].state;
            sample.input.resize(static_cast<std::size_t>(online_.spec.input_size), 0.0);
            sample.input[batch[i].state.size() + static_cast<std::size_t>(batch[i].action)] = 1.0;
            sample.target = targets[i];
            samples.push_back(std::move(sample));
        }
        auto [batch_loss, grads] = loss_and_gradients(online_, samples);
        OptimizerConfig opt;
        opt.alpha = hp_.alpha;
        opt.clip_gradients = hp_.clip_gradients;
        opt.clip_norm = hp_.clip_norm;
        adam_step(online_, grads, opt);
        loss = batch_loss;
    }

    if (hp_.target_sync_period > 0 && step_counter_ % hp_.target_sync_period == 0) {
        blend_parameters(online_, target_, hp_.target_smooth_tau);
    }
    return loss;
}

void Agent::decay_epsilon() {
    epsilon_ = std::max(hp_.epsilon_min, epsilon_ * (1.0 - hp_.epsilon_decay));
}

StepOutcome Agent::interact(SlicingEnv& env) {
    const Observation state = env.observe();
    const int action = select_action(state, false);
    StepOutcome outcome = env.step(Action::from_index(action, action_count_));

    Transition tr;
    tr.state = state.values;
    tr.action = action;
    tr.reward = static_cast<double>(outcome.reward);
    tr.next_state = outcome.observation.values;
    tr.terminal = outcome.done;
    buffer_.push(std::move(tr));

    ++step_counter_;
    decay_epsilon();
    learn_step();
    return outcome;
}

namespace {
constexpr const char* kAgentFormat = "iabsim-agent-v1";
}

void Agent::save_checkpoint(const std::string& path) const {
    nlohmann::json doc;
    doc["format"] = kAgentFormat;
    doc["hyperparameters"] = {{"alpha", to_hex_float(hp_.alpha)},
                              {"gamma", to_hex_float(hp_.gamma)},
                              {"epsilon_init", to_hex_float(hp_.epsilon_init)},
                              {"epsilon_decay", to_hex_float(hp_.epsilon_decay)},
                              {"epsilon_min", to_hex_float(hp_.epsilon_min)},
                              {"minibatch", hp_.minibatch},
                              {"buffer_capacity", hp_.buffer_capacity},
                              {"target_sync_period", hp_.target_sync_period},
                              {"target_smooth_tau", to_hex_float(hp_.target_smooth_tau)},
                              {"clip_gradients", hp_.clip_gradients},
                              {"clip_norm", to_hex_float(hp_.clip_norm)}};
    doc["epsilon"] = to_hex_float(epsilon_);
    doc["step_counter"] = step_counter_;
    doc["action_count"] = action_count_;
    doc["online"] = nlohmann::json::parse(network_to_json(online_));
    doc["target"] = nlohmann::json::parse(network_to_json(target_));

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << doc.dump(2) << '\n';
}

Agent Agent::load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const nlohmann::json doc = nlohmann::json::parse(ss.str());
    if (doc.at("format").get<std::string>() != kAgentFormat) {
        throw std::runtime_error("unsupported checkpoint format");
    }

    const nlohmann::json& hj = doc.at("hyperparameters");
    Hyperparameters hp;
    hp.alpha = from_hex_float(hj.at("alpha").get<std::string>());
    hp.gamma = from_hex_float(hj.at("gamma").get<std::string>());
    hp.epsilon_init = from_hex_float(hj.at("epsilon_init").get<std::string>());
    hp.epsilon_decay = from_hex_float(hj.at("epsilon_decay").get<std::string>());
    hp.epsilon_min = from_hex_float(hj.at("epsilon_min").get<std::string>());
    hp.minibatch = hj.at("minibatch").get<int>();
    hp.buffer_capacity = hj.at("buffer_capacity").get<int>();
    hp.target_sync_period = hj.at("target_sync_period").get<int>();
    hp.target_smooth_tau = from_hex_float(hj.at("target_smooth_tau").get<std::string>());
    hp.clip_gradients = hj.at("clip_gradients").get<bool>();
    hp.clip_norm = from_hex_float(hj.at("clip_norm").get<std::string>());

    Agent agent(network_from_json(doc.at("online").dump()), network_from_json(doc.at("target").dump()), hp,
                from_hex_float(doc.at("epsilon").get<std::string>()), doc.at("step_counter").get<long>());
    agent.action_count_ = doc.at("action_count").get<int>();
    if (!(agent.online_.spec == agent.target_.spec)) {
        throw std::runtime_error("checkpoint online/target specs differ");
    }
    return agent;
}

}  // namespace iabsim
