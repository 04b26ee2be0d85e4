#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "iabsim/topology.hpp"

namespace iabsim {

/// One row of the slice demand timetable: slice s at BS i needs
/// (thdl, thul) Mbps during interval t.
struct SliceProfileEntry {
    int t = 0;
    int serving_bs = 1;
    int slice_id = 1;
    double thdl_mbps = 0.0;
    double thul_mbps = 0.0;

    bool operator==(const SliceProfileEntry&) const = default;
};

/// One row of a BS load timetable.
struct BsLoadEntry {
    int t = 0;
    double thdl_mbps = 0.0;
    double thul_mbps = 0.0;

    bool operator==(const BsLoadEntry&) const = default;
};

/// Parameters for the deterministic profile generator. The defaults
/// reproduce the reference day: aggregate UL over all slices exceeds the
/// wired capacity exactly on intervals [22,50) (05:30-12:30), aggregate DL
/// exceeds it on [58,74) (14:30-18:30), and every slice stays routable at
/// every interval under sequential allocation.
struct ProfileGenConfig {
    int slice_count = 3;
    int interval_count = 96;  // 15-minute intervals over 24 h
    double wired_capacity_mbps = 1000.0;
    double wireless_capacity_mbps = 1000.0;
    std::uint64_t seed = 42;

    // Aggregate slice demand curves (Mbps). The defaults put the mean
    // aggregate DL+UL demand at ~1.479 Gbps over the day.
    double ul_base = 400.0;      // overnight UL floor
    double ul_swell = 700.0;     // rise toward the morning window
    double ul_swell_sigma = 18.0;
    double ul_over = 400.0;      // peak excess over capacity inside the UL window
    double dl_base = 435.0;
    double dl_swell = 450.0;
    double dl_swell_sigma = 20.0;
    double dl_over = 400.0;

    // Congestion windows, half-open interval ranges.
    int ul_window_begin = 22;  // 05:30
    int ul_window_end = 50;    // 12:30
    int dl_window_begin = 58;  // 14:30
    int dl_window_end = 74;    // 18:30

    // The DL overload is front-loaded: a steep arch up to dl_arch_end, then
    // a mild overflow tail ramping between the two levels below.
    int dl_arch_end = 67;  // 16:45
    double dl_tail_over_begin = 80.0;
    double dl_tail_over_end = 30.0;

    // Donor load curves (Mbps): short bursts / moderate / heavy at noon.
    double burst_base = 250.0, burst_amp = 700.0, burst_sigma = 2.0;
    double burst_center_1 = 30.0;  // 07:30
    double burst_center_2 = 54.0;  // 13:30
    double moderate_base = 420.0, moderate_amp = 80.0;
    double noon_base = 300.0, noon_amp = 650.0, noon_sigma = 8.0;

    double jitter = 0.015;      // seeded relative wobble on curve amplitudes
    double demand_scale = 1.0;  // > 1 stresses the network beyond the calibrated margins
    bool guarantee_feasible = true;  // run the capacity sanity check after generation
};

/// Immutable day of traffic: per-slice demand tables and the three donor
/// load profiles. Donor assignment is always recomputed from the BS id,
/// never stored.
class ProfileSet {
public:
    ProfileSet(std::vector<SliceProfileEntry> slice_profiles,
               std::map<int, std::vector<BsLoadEntry>> load_profiles);

    int slice_count() const { return slice_count_; }
    int interval_count() const { return interval_count_; }

    /// Demand of slice s during interval t. Throws std::out_of_range for
    /// unknown (t, s).
    MbpsPair slice_demand(int t, int s) const;

    /// Access load of donor BS bs (2..N) during interval t, via the
    /// bs -> profile assignment.
    MbpsPair bs_load(int bs, int t) const;

    std::map<int, int> bs_assignment(int n_bs) const;

    const std::vector<SliceProfileEntry>& slice_profiles() const { return slice_profiles_; }
    const std::map<int, std::vector<BsLoadEntry>>& load_profiles() const { return load_profiles_; }

    bool operator==(const ProfileSet&) const = default;

private:
    int slice_count_ = 0;
    int interval_count_ = 0;
    std::vector<SliceProfileEntry> slice_profiles_;  // sorted by (t, s)
    std::map<int, std::vector<BsLoadEntry>> load_profiles_;
};

/// Donor profile assignment p = ((bs - 1) mod 3) + 1. Throws for bs < 2.
int assign_profile(int bs);

/// Deterministic generator for the reference day (see ProfileGenConfig).
/// Throws std::runtime_error when the configured demands cannot fit the
/// network and guarantee_feasible is set.
ProfileSet generate_default_profiles(const ProfileGenConfig& config = {});

/// CSV persistence: dir/slices.csv (t,i,s,thdl_mbps,thul_mbps) and
/// dir/loads.csv (profile,t,thdl_mbps,thul_mbps). Round-trips exactly.
void save_profiles_csv(const ProfileSet& profiles, const std::string& dir);
ProfileSet load_profiles_csv(const std::string& dir);

}  // namespace iabsim
