#include "iabsim/topology.hpp"

#include <algorithm>
#include <stdexcept>

namespace iabsim {

Topology build_topology(int n_bs, double wired_mbps, double wireless_mbps) {
    if (n_bs < 2) {
        throw std::invalid_argument("topology needs at least 2 base stations, got " + std::to_string(n_bs));
    }
    if (wired_mbps < 0.0 || wireless_mbps < 0.0) {
        throw std::invalid_argument("link capacities must be non-negative");
    }

    Topology topo;
    topo.bs_count_ = n_bs;
    topo.nodes_.push_back(Node{0, "core", std::nullopt});
    for (int bs = 1; bs <= n_bs; ++bs) {
        topo.nodes_.push_back(Node{bs, "BS" + std::to_string(bs), std::nullopt});
    }
    // Wired links first (BS1..BSN to core), then the donor wireless links.
    for (int bs = 1; bs <= n_bs; ++bs) {
        topo.links_.push_back(Link{LinkKind::wired, bs, 0, wired_mbps, wired_mbps});
    }
    for (int bs = 2; bs <= n_bs; ++bs) {
        topo.links_.push_back(Link{LinkKind::wireless, 1, bs, wireless_mbps, wireless_mbps});
    }
    topo.bs_loads_.assign(static_cast<std::size_t>(n_bs) + 1, MbpsPair{});
    return topo;
}

std::size_t Topology::wired_link_index(int bs) const {
    if (bs < 1 || bs > bs_count_) throw std::invalid_argument("unknown BS id " + std::to_string(bs));
    return static_cast<std::size_t>(bs - 1);
}

std::size_t Topology::wireless_link_index(int bs) const {
    if (bs < 2 || bs > bs_count_) throw std::invalid_argument("no wireless link for BS id " + std::to_string(bs));
    return static_cast<std::size_t>(bs_count_ + bs - 2);
}

void Topology::set_bs_loads(const std::map<int, MbpsPair>& loads) {
    for (const auto& [bs, load] : loads) {
        if (bs < 2 || bs > bs_count_) {
            throw std::invalid_argument("load given for unknown BS id " + std::to_string(bs));
        }
        if (load.dl < 0.0 || load.ul < 0.0) {
            throw std::invalid_argument("negative load for BS id " + std::to_string(bs));
        }
    }
    std::fill(bs_loads_.begin(), bs_loads_.end(), MbpsPair{});
    for (const auto& [bs, load] : loads) {
        bs_loads_[static_cast<std::size_t>(bs)] = load;
    }
}

MbpsPair Topology::bs_load(int bs) const {
    if (bs < 1 || bs > bs_count_) throw std::invalid_argument("unknown BS id " + std::to_string(bs));
    return bs_loads_[static_cast<std::size_t>(bs)];
}

std::vector<std::size_t> Topology::candidate_path(int choice_bs) const {
    if (choice_bs < 1 || choice_bs > bs_count_) {
        throw std::invalid_argument("backhaul choice must name a BS in 1.." + std::to_string(bs_count_) +
                                    ", got " + std::to_string(choice_bs));
    }
    if (choice_bs == 1) return {wired_link_index(1)};
    return {wireless_link_index(choice_bs), wired_link_index(choice_bs)};
}

double Topology::residual(std::size_t link_index, Direction d) const {
    if (link_index >= links_.size()) throw std::invalid_argument("link index out of range");
    const Link& link = links_[link_index];

    double used = 0.0;
    // Access load of the BS that owns the link's air/fiber resource. BS1's
    // wired link carries no access load of its own; it is consumed only by
    // the slice traffic already routed over it (the allocations below).
    const int owner = link.kind == LinkKind::wireless ? link.target : link.source;
    if (owner >= 2) {
        const MbpsPair& load = bs_loads_[static_cast<std::size_t>(owner)];
        used += d == Direction::dl ? load.dl : load.ul;
    }
    for (const Allocation& alloc : allocations_) {
        const bool on_link = std::find(alloc.link_path.begin(), alloc.link_path.end(), link_index) !=
                             alloc.link_path.end();
        if (on_link) used += d == Direction::dl ? alloc.demand_dl_mbps : alloc.demand_ul_mbps;
    }
    return std::max(0.0, link.capacity(d) - used);
}

AllocationResult Topology::try_allocate(int slice_id, int choice_bs, double demand_dl_mbps,
                                        double demand_ul_mbps, int interval_index) {
    if (demand_dl_mbps < 0.0 || demand_ul_mbps < 0.0) {
        throw std::invalid_argument("allocation demands must be non-negative");
    }
    const std::vector<std::size_t> path = candidate_path(choice_bs);
    for (std::size_t link_index : path) {
        if (residual(link_index, Direction::dl) < demand_dl_mbps) return AllocationResult::rejected;
        if (residual(link_index, Direction::ul) < demand_ul_mbps) return AllocationResult::rejected;
    }
    allocations_.push_back(Allocation{slice_id, path, demand_dl_mbps, demand_ul_mbps, interval_index});
    return AllocationResult::accepted;
}

void Topology::release_interval() {
    allocations_.clear();
}

}  // namespace iabsim
