#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <vector>

#include "iabsim/profiles.hpp"
#include "iabsim/topology.hpp"

namespace iabsim {

enum class Split { train, validation, test, full_day };

const char* split_name(Split split);
Split split_from_name(const std::string& name);

/// One-hot backhaul selection over {BS1 wired, BS2..BSN wireless}.
struct Action {
    std::vector<std::uint8_t> onehot;

    static Action from_index(int index, int n_choices);

    /// The single TRUE position; throws unless exactly one element is set.
    int index() const;
};

/// Flat observation vector: [req_dl, req_ul, free_dl_1, free_ul_1, ...,
/// free_dl_N, free_ul_N], every component normalized into [0, 1].
struct Observation {
    std::vector<double> values;

    bool operator==(const Observation&) const = default;
};

struct StepOutcome {
    Observation observation;  // next state; zeroed when done
    int reward = 0;           // 1 if the slice was allocated, else 0
    bool done = false;
    MbpsPair allocated_mbps;  // equals the demand on reward 1, (0,0) on reward 0
};

/// Sequences per-slice backhaul decisions over (a split of) the 96-interval
/// day. Step index k decides slice (k mod S)+1 of interval k div S; at each
/// interval boundary all leases are released and donor loads refreshed.
class SlicingEnv {
public:
    SlicingEnv(Topology topology, std::shared_ptr<const ProfileSet> profiles);

    Observation reset(Split split);
    StepOutcome step(const Action& action);

    /// Observation for the current step; pure.
    Observation observe() const;

    /// Reward ceiling for a split: one point per decision step.
    int max_episode_reward(Split split) const;

    /// Action indices whose candidate path can carry the current slice's
    /// demand in both directions; pure.
    std::set<int> feasible_choices() const;

    bool done() const { return done_; }
    int step_index() const { return step_index_; }
    int current_interval() const { return step_index_ / profiles_->slice_count(); }
    int current_slice() const { return step_index_ % profiles_->slice_count() + 1; }
    int action_count() const { return topology_.bs_count(); }
    int observation_size() const { return 2 + 2 * topology_.bs_count(); }
    const Topology& topology() const { return topology_; }
    const ProfileSet& profiles() const { return *profiles_; }

    /// First/one-past-last step index of a split. The day is cut
    /// contiguously at interval boundaries into 70/10/20 percent.
    std::pair<int, int> split_steps(Split split) const;

private:
    void apply_interval_loads(int interval);

    Topology topology_;
    std::shared_ptr<const ProfileSet> profiles_;
    double norm_divisor_mbps_ = 1.0;
    int step_index_ = 0;
    int split_end_ = 0;
    bool done_ = true;
};

}  // namespace iabsim
