#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "iabsim/profiles.hpp"

using namespace iabsim;

namespace {

ProfileSet zero_profiles(int slices) {
    std::vector<SliceProfileEntry> rows;
    for (int t = 0; t < 96; ++t) {
        for (int s = 1; s <= slices; ++s) rows.push_back({t, 1, s, 0.0, 0.0});
    }
    std::map<int, std::vector<BsLoadEntry>> loads;
    for (int p = 1; p <= 3; ++p) {
        for (int t = 0; t < 96; ++t) loads[p].push_back({t, 0.0, 0.0});
    }
    return ProfileSet(std::move(rows), std::move(loads));
}

MbpsPair aggregate_demand(const ProfileSet& profiles, int t) {
    MbpsPair sum;
    for (int s = 1; s <= profiles.slice_count(); ++s) {
        const MbpsPair d = profiles.slice_demand(t, s);
        sum.dl += d.dl;
        sum.ul += d.ul;
    }
    return sum;
}

std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "iabsim_tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE("profiles") {

TEST_CASE("assign_profile follows the modulo rule") {
    CHECK(assign_profile(2) == 2);
    CHECK(assign_profile(5) == 2);
    CHECK(assign_profile(4) == 1);
    CHECK(assign_profile(7) == 1);
    CHECK(assign_profile(3) == 3);
    CHECK(assign_profile(6) == 3);
    CHECK_THROWS_AS(assign_profile(1), std::invalid_argument);

    const ProfileSet profiles = generate_default_profiles();
    const std::map<int, int> expected{{2, 2}, {3, 3}, {4, 1}, {5, 2}, {6, 3}, {7, 1}};
    CHECK(profiles.bs_assignment(7) == expected);
}

TEST_CASE("congestion windows are exact") {
    const ProfileSet profiles = generate_default_profiles();
    for (int t = 0; t < 96; ++t) {
        const MbpsPair agg = aggregate_demand(profiles, t);
        const bool ul_window = t >= 22 && t < 50;
        const bool dl_window = t >= 58 && t < 74;
        INFO("interval ", t);
        CHECK(ul_window == (agg.ul > 1000.0));
        CHECK(dl_window == (agg.dl > 1000.0));
    }
    // interval 30 (07:30) sits inside the UL window, midnight outside both
    CHECK(aggregate_demand(profiles, 30).ul > 1000.0);
    CHECK(aggregate_demand(profiles, 0).dl <= 1000.0);
    CHECK(aggregate_demand(profiles, 0).ul <= 1000.0);
}

TEST_CASE("generation is deterministic per seed") {
    ProfileGenConfig config;
    config.seed = 7;
    const ProfileSet a = generate_default_profiles(config);
    const ProfileSet b = generate_default_profiles(config);
    CHECK(a == b);

    config.seed = 8;
    const ProfileSet c = generate_default_profiles(config);
    CHECK_FALSE(a == c);
}

TEST_CASE("donor load shapes match their roles") {
    const ProfileSet profiles = generate_default_profiles();

    // BS2 and BS5 share profile 2 at every interval.
    for (int t = 0; t < 96; ++t) {
        CHECK(profiles.bs_load(2, t) == profiles.bs_load(5, t));
        CHECK(profiles.bs_load(4, t) == profiles.bs_load(7, t));
        CHECK(profiles.bs_load(3, t) == profiles.bs_load(6, t));
    }

    // Profile 1 (BS4): heavy only in short bursts.
    int heavy = 0;
    for (int t = 0; t < 96; ++t) {
        if (profiles.bs_load(4, t).dl > 700.0) ++heavy;
    }
    CHECK(heavy >= 2);
    CHECK(heavy <= 10);

    // Profile 2 (BS2): moderate all day.
    for (int t = 0; t < 96; ++t) {
        CHECK(profiles.bs_load(2, t).dl > 250.0);
        CHECK(profiles.bs_load(2, t).dl < 600.0);
    }

    // Profile 3 (BS3): heavy around noon, light at midnight.
    CHECK(profiles.bs_load(3, 48).dl > 850.0);
    CHECK(profiles.bs_load(3, 0).dl < 400.0);

    // BS4 off-burst sits below the moderate profile.
    CHECK(profiles.bs_load(4, 0).dl < profiles.bs_load(2, 0).dl);

    CHECK_THROWS_AS(profiles.bs_load(1, 0), std::invalid_argument);
    CHECK_THROWS_AS(profiles.bs_load(2, 96), std::out_of_range);
}

TEST_CASE("slice_demand lookups and bounds") {
    const ProfileSet profiles = generate_default_profiles();
    // Frozen generator output for the default seed: interval 30 (07:30) is
    // deep inside the UL congestion window, so slice 1 demands far more UL
    // than DL.
    const MbpsPair d = profiles.slice_demand(30, 1);
    CHECK(d.dl == 253.43520131369968);
    CHECK(d.ul == 615.00986535698325);
    CHECK(d.ul > 300.0);

    // Mean aggregate DL+UL demand over the day, fixed by the defaults.
    double total = 0.0;
    for (int t = 0; t < 96; ++t) {
        const MbpsPair agg = aggregate_demand(profiles, t);
        total += agg.dl + agg.ul;
    }
    CHECK(total / 96.0 / 1000.0 == doctest::Approx(1.479).epsilon(0.01));
    CHECK_THROWS_AS(profiles.slice_demand(96, 1), std::out_of_range);
    CHECK_THROWS_AS(profiles.slice_demand(0, 4), std::out_of_range);

    const ProfileSet zeros = zero_profiles(1);
    CHECK(zeros.slice_demand(10, 1) == MbpsPair{0.0, 0.0});
    CHECK(zeros.bs_load(6, 95) == MbpsPair{0.0, 0.0});
}

TEST_CASE("csv round trip is exact") {
    const ProfileSet profiles = generate_default_profiles();
    const auto dir = temp_dir("csv_roundtrip");
    save_profiles_csv(profiles, dir.string());
    const ProfileSet loaded = load_profiles_csv(dir.string());
    CHECK(loaded == profiles);
}

TEST_CASE("csv loader rejects malformed input") {
    const ProfileSet profiles = generate_default_profiles();
    const auto dir = temp_dir("csv_errors");
    save_profiles_csv(profiles, dir.string());

    SUBCASE("missing interval") {
        // Drop the last row of slices.csv: one slice ends up with 95 intervals.
        std::ifstream in(dir / "slices.csv");
        std::vector<std::string> lines;
        std::string line;
        while (std::getline(in, line)) lines.push_back(line);
        in.close();
        std::ofstream out(dir / "slices.csv", std::ios::trunc);
        for (std::size_t i = 0; i + 1 < lines.size(); ++i) out << lines[i] << '\n';
        out.close();
        CHECK_THROWS_AS(load_profiles_csv(dir.string()), std::runtime_error);
    }

    SUBCASE("negative throughput") {
        std::ofstream out(dir / "slices.csv", std::ios::app);
        out << "95,1,3,-4.5,0\n";
        out.close();
        CHECK_THROWS_WITH_AS(load_profiles_csv(dir.string()),
                             doctest::Contains("negative throughput"), std::runtime_error);
    }

    SUBCASE("duplicate entry carries a line number") {
        std::ofstream out(dir / "slices.csv", std::ios::app);
        out << "0,1,1,5,5\n";
        out.close();
        CHECK_THROWS_WITH_AS(load_profiles_csv(dir.string()), doctest::Contains(":290:"),
                             std::runtime_error);
    }

    SUBCASE("bad header") {
        std::ofstream out(dir / "loads.csv", std::ios::trunc);
        out << "profile,t,dl,ul\n";
        out.close();
        CHECK_THROWS_AS(load_profiles_csv(dir.string()), std::runtime_error);
    }
}

TEST_CASE("infeasible generator configs are rejected") {
    ProfileGenConfig config;
    config.demand_scale = 20.0;
    CHECK_THROWS_AS(generate_default_profiles(config), std::runtime_error);

    config.guarantee_feasible = false;
    CHECK_NOTHROW(generate_default_profiles(config));
}

}  // TEST_SUITE
