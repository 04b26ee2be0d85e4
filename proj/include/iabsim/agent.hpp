#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <vector>

#include "iabsim/env.hpp"
#include "iabsim/qnet.hpp"

namespace iabsim {

struct Hyperparameters {
    double alpha = 0.0001;          // learning rate
    double gamma = 0.99;            // discount factor
    double epsilon_init = 0.99;     // initial exploration probability
    double epsilon_decay = 0.01;    // per-step multiplicative decay rate
    double epsilon_min = 0.01;      // exploration floor
    int minibatch = 64;             // M
    int buffer_capacity = 10000;    // N
    int target_sync_period = 4;     // C, in environment steps
    double target_smooth_tau = 0.001;  // Polyak factor per sync; 1 = full copy
    bool clip_gradients = false;
    double clip_norm = 10.0;

    bool operator==(const Hyperparameters&) const = default;
};

struct Transition {
    std::vector<double> state;
    int action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
    bool terminal = false;
};

/// Bounded FIFO store of past transitions; oldest evicted first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

    void push(Transition transition);
    std::size_t size() const { return ring_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::size_t insertion_count() const { return insertions_; }
    const Transition& at(std::size_t i) const { return ring_[i]; }

private:
    std::size_t capacity_;
    std::size_t insertions_ = 0;
    std::deque<Transition> ring_;
};

/// Double DQN agent: epsilon-greedy interaction, uniform replay sampling,
/// decoupled-argmax targets (argmax from the online net, value from the
/// target net), and target sync every C environment steps.
class Agent {
public:
    Agent(int observation_size, int action_count, int hidden_layers, int hidden_width,
          Hyperparameters hp, std::uint64_t seed);

    /// Epsilon-greedy action. Greedy mode never touches the RNG and breaks
    /// Q-value ties toward the lowest index.
    int select_action(const Observation& observation, bool greedy);

    /// Pure greedy argmax; usable on a const agent during evaluation.
    int greedy_action(const Observation& observation) const;

    /// Double-Q regression targets y for a batch of transitions.
    std::vector<double> compute_targets(const std::vector<Transition>& batch) const;

    /// One minibatch update (returns the loss), or nullopt while the buffer
    /// holds fewer than M transitions. Also nudges the target net toward
    /// the online net (Polyak factor tau, full copy at tau = 1) when the
    /// environment step counter is a multiple of C.
    std::optional<double> learn_step();

    /// epsilon <- max(epsilon_min, epsilon * (1 - epsilon_decay)).
    void decay_epsilon();

    /// One exploration step: act on env, store the transition, decay
    /// epsilon, learn.
    StepOutcome interact(SlicingEnv& env);

    double epsilon() const { return epsilon_; }
    long step_counter() const { return step_counter_; }
    int action_count() const { return action_count_; }
    const Hyperparameters& hyperparameters() const { return hp_; }
    QNetwork& online() { return online_; }
    const QNetwork& online() const { return online_; }
    QNetwork& target() { return target_; }
    const QNetwork& target() const { return target_; }
    ReplayBuffer& buffer() { return buffer_; }
    const ReplayBuffer& buffer() const { return buffer_; }

    /// Checkpoint: both networks plus hyperparameters, epsilon and the step
    /// counter, in one versioned file.
    void save_checkpoint(const std::string& path) const;
    static Agent load_checkpoint(const std::string& path);

private:
    Agent(QNetwork online, QNetwork target, Hyperparameters hp, double epsilon, long step_counter);

    Hyperparameters hp_;
    int action_count_;
    QNetwork online_;
    QNetwork target_;
    ReplayBuffer buffer_;
    double epsilon_;
    long step_counter_ = 0;
    std::mt19937_64 rng_;
};

}  // namespace iabsim
