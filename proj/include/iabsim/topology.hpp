#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace iabsim {

enum class LinkKind { wired, wireless };
enum class Direction { dl, ul };

/// A DL/UL throughput pair in Mbps.
struct MbpsPair {
    double dl = 0.0;
    double ul = 0.0;

    bool operator==(const MbpsPair&) const = default;
};

struct Coordinates {
    double x_m = 0.0;
    double y_m = 0.0;
};

/// Node 0 is the core network; nodes 1..N are base stations.
struct Node {
    int id = 0;
    std::string name;
    std::optional<Coordinates> location;
};

/// One backhaul edge with independent per-direction capacities
/// (wired links carry one fiber per direction).
struct Link {
    LinkKind kind = LinkKind::wired;
    int source = 0;
    int target = 0;
    double capacity_dl_mbps = 0.0;
    double capacity_ul_mbps = 0.0;

    double capacity(Direction d) const { return d == Direction::dl ? capacity_dl_mbps : capacity_ul_mbps; }
};

/// A slice's backhaul lease over one 15-minute interval. The path is a
/// sequence of link indices ending at the core (node 0).
struct Allocation {
    int slice_id = 0;
    std::vector<std::size_t> link_path;
    double demand_dl_mbps = 0.0;
    double demand_ul_mbps = 0.0;
    int interval_index = 0;
};

enum class AllocationResult { accepted, rejected };

/// Directed capacity graph of the backhaul network: one wired link per BS
/// down to the core, plus donor wireless links from BS1 to each of BS2..BSN.
///
/// Residuals are recomputed on demand from loads and active allocations,
/// never cached, so a rejected try_allocate cannot leave any trace.
class Topology {
public:
    int bs_count() const { return bs_count_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Link>& links() const { return links_; }
    const std::vector<Allocation>& active_allocations() const { return allocations_; }

    /// Replaces the per-BS access loads (BS ids 2..N). BSs absent from the
    /// map are reset to zero load.
    void set_bs_loads(const std::map<int, MbpsPair>& loads);

    MbpsPair bs_load(int bs) const;

    /// Link indices from BS1 to the core for the given choice: choice 1 is
    /// the single wired hop, choice k>=2 is wireless BS1->BSk then wired
    /// BSk->core.
    std::vector<std::size_t> candidate_path(int choice_bs) const;

    /// Free bandwidth on a link in one direction: capacity minus the owning
    /// BS's access load (links touching BS2..BSN) minus all active
    /// allocation demands riding the link. Clamped at zero.
    double residual(std::size_t link_index, Direction d) const;

    /// Admits the slice iff every path link has residual >= demand in both
    /// directions; on accept the allocation is recorded atomically, on
    /// reject the topology is untouched.
    AllocationResult try_allocate(int slice_id, int choice_bs, double demand_dl_mbps,
                                  double demand_ul_mbps, int interval_index);

    /// Drops all allocations at the end of a 15-minute interval.
    void release_interval();

    std::size_t wired_link_index(int bs) const;
    std::size_t wireless_link_index(int bs) const;

    friend Topology build_topology(int n_bs, double wired_mbps, double wireless_mbps);

private:
    int bs_count_ = 0;
    std::vector<Node> nodes_;
    std::vector<Link> links_;
    std::vector<Allocation> allocations_;
    std::vector<MbpsPair> bs_loads_;  // indexed by node id, [0] and [1] unused
};

/// Builds the N-BS star-of-stars of the reference scenario. Throws
/// std::invalid_argument for n_bs < 2 or negative capacities.
Topology build_topology(int n_bs, double wired_mbps, double wireless_mbps);

}  // namespace iabsim
