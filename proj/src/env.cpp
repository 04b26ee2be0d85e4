#include "iabsim/env.hpp"

#include <algorithm>
#include <stdexcept>

namespace iabsim {

const char* split_name(Split split) {
    switch (split) {
        case Split::train: return "train";
        case Split::validation: return "val";
        case Split::test: return "test";
        case Split::full_day: return "full";
    }
    throw std::invalid_argument("unknown split");
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::train;
    if (name == "val" || name == "validation") return Split::validation;
    if (name == "test") return Split::test;
    if (name == "full" || name == "full_day") return Split::full_day;
    throw std::invalid_argument("unknown split '" + name + "' (expected train|val|test|full)");
}

Action Action::from_index(int index, int n_choices) {
    if (index < 0 || index >= n_choices) throw std::invalid_argument("action index out of range");
    Action action;
    action.onehot.assign(static_cast<std::size_t>(n_choices), 0);
    action.onehot[static_cast<std::size_t>(index)] = 1;
    return action;
}

int Action::index() const {
    int found = -1;
    for (std::size_t k = 0; k < onehot.size(); ++k) {
        if (!onehot[k]) continue;
        if (found >= 0) throw std::invalid_argument("action vector has more than one TRUE element");
        found = static_cast<int>(k);
    }
    if (found < 0) throw std::invalid_argument("action vector has no TRUE element");
    return found;
}

SlicingEnv::SlicingEnv(Topology topology, std::shared_ptr<const ProfileSet> profiles)
    : topology_(std::move(topology)), profiles_(std::move(profiles)) {
    if (!profiles_) throw std::invalid_argument("environment needs a profile set");
    for (const Link& link : topology_.links()) {
        norm_divisor_mbps_ = std::max({norm_divisor_mbps_, link.capacity_dl_mbps, link.capacity_ul_mbps});
    }
}

std::pair<int, int> SlicingEnv::split_steps(Split split) const {
    const int slices = profiles_->slice_count();
    const int intervals = profiles_->interval_count();
    const int train_intervals = intervals * 7 / 10;
    const int validation_intervals = intervals / 10;
    switch (split) {
        case Split::full_day: return {0, intervals * slices};
        case Split::train: return {0, train_intervals * slices};
        case Split::validation: return {train_intervals * slices, (train_intervals + validation_intervals) * slices};
        case Split::test: return {(train_intervals + validation_intervals) * slices, intervals * slices};
    }
    throw std::invalid_argument("unknown split");
}

int SlicingEnv::max_episode_reward(Split split) const {
    const auto [begin, end] = split_steps(split);
    return end - begin;
}

void SlicingEnv::apply_interval_loads(int interval) {
    std::map<int, MbpsPair> loads;
    for (int bs = 2; bs <= topology_.bs_count(); ++bs) {
        loads[bs] = profiles_->bs_load(bs, interval);
    }
    topology_.set_bs_loads(loads);
}

Observation SlicingEnv::reset(Split split) {
    const auto [begin, end] = split_steps(split);
    step_index_ = begin;
    split_end_ = end;
    done_ = false;
    topology_.release_interval();
    apply_interval_loads(current_interval());
    return observe();
}

Observation SlicingEnv::observe() const {
    if (done_) throw std::logic_error("observe called on a finished episode");
    const MbpsPair demand = profiles_->slice_demand(current_interval(), current_slice());

    Observation obs;
    obs.values.reserve(static_cast<std::size_t>(observation_size()));
    const auto normalized = [this](double mbps) { return std::clamp(mbps / norm_divisor_mbps_, 0.0, 1.0); };
    obs.values.push_back(normalized(demand.dl));
    obs.values.push_back(normalized(demand.ul));
    for (int choice = 1; choice <= topology_.bs_count(); ++choice) {
        double free_dl = norm_divisor_mbps_;
        double free_ul = norm_divisor_mbps_;
        for (std::size_t link_index : topology_.candidate_path(choice)) {
            free_dl = std::min(free_dl, topology_.residual(link_index, Direction::dl));
            free_ul = std::min(free_ul, topology_.residual(link_index, Direction::ul));
        }
        obs.values.push_back(normalized(free_dl));
        obs.values.push_back(normalized(free_ul));
    }
    return obs;
}

std::set<int> SlicingEnv::feasible_choices() const {
    if (done_) throw std::logic_error("feasible_choices called on a finished episode");
    const MbpsPair demand = profiles_->slice_demand(current_interval(), current_slice());
    std::set<int> feasible;
    for (int choice = 1; choice <= topology_.bs_count(); ++choice) {
        bool fits = true;
        for (std::size_t link_index : topology_.candidate_path(choice)) {
            if (topology_.residual(link_index, Direction::dl) < demand.dl ||
                topology_.residual(link_index, Direction::ul) < demand.ul) {
                fits = false;
                break;
            }
        }
        if (fits) feasible.insert(choice - 1);
    }
    return feasible;
}

StepOutcome SlicingEnv::step(const Action& action) {
    if (done_) throw std::logic_error("step called on a finished episode");
    if (action.onehot.size() != static_cast<std::size_t>(action_count())) {
        throw std::invalid_argument("action vector has wrong length");
    }
    const int choice_bs = action.index() + 1;
    const int interval = current_interval();
    const MbpsPair demand = profiles_->slice_demand(interval, current_slice());

    StepOutcome outcome;
    const AllocationResult result =
        topology_.try_allocate(current_slice(), choice_bs, demand.dl, demand.ul, interval);
    if (result == AllocationResult::accepted) {
        outcome.reward = 1;
        outcome.allocated_mbps = demand;
    }

    ++step_index_;
    done_ = step_index_ >= split_end_;
    outcome.done = done_;
    if (!done_) {
        if (current_interval() != interval) {
            topology_.release_interval();
            apply_interval_loads(current_interval());
        }
        outcome.observation = observe();
    } else {
        outcome.observation.values.assign(static_cast<std::size_t>(observation_size()), 0.0);
    }
    return outcome;
}

}  // namespace iabsim
