#include "iabsim/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "iabsim/util.hpp"

namespace iabsim {

namespace {

double gaussian_bump(double t, double center, double sigma) {
    const double z = (t - center) / sigma;
    return std::exp(-0.5 * z * z);
}

[[noreturn]] void parse_fail(const std::string& path, int line_no, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

}  // namespace

int assign_profile(int bs) {
    if (bs < 2) throw std::invalid_argument("donor profile assignment needs bs >= 2, got " + std::to_string(bs));
    return (bs - 1) % 3 + 1;
}

ProfileSet::ProfileSet(std::vector<SliceProfileEntry> slice_profiles,
                       std::map<int, std::vector<BsLoadEntry>> load_profiles)
    : slice_profiles_(std::move(slice_profiles)), load_profiles_(std::move(load_profiles)) {
    if (slice_profiles_.empty()) throw std::invalid_argument("slice profile table is empty");

    int max_t = 0;
    int max_s = 0;
    for (const SliceProfileEntry& e : slice_profiles_) {
        if (e.thdl_mbps < 0.0 || e.thul_mbps < 0.0) throw std::invalid_argument("negative slice demand");
        if (e.t < 0 || e.slice_id < 1) throw std::invalid_argument("bad slice profile key");
        max_t = std::max(max_t, e.t);
        max_s = std::max(max_s, e.slice_id);
    }
    interval_count_ = max_t + 1;
    slice_count_ = max_s;

    std::sort(slice_profiles_.begin(), slice_profiles_.end(),
              [](const SliceProfileEntry& a, const SliceProfileEntry& b) {
                  return std::tie(a.t, a.slice_id) < std::tie(b.t, b.slice_id);
              });
    if (slice_profiles_.size() != static_cast<std::size_t>(interval_count_) * slice_count_) {
        throw std::invalid_argument("slice profile table must cover every (t, s) exactly once");
    }
    for (int t = 0; t < interval_count_; ++t) {
        for (int s = 1; s <= slice_count_; ++s) {
            const SliceProfileEntry& e = slice_profiles_[static_cast<std::size_t>(t) * slice_count_ + s - 1];
            if (e.t != t || e.slice_id != s) {
                throw std::invalid_argument("slice profile table has duplicate or missing (t, s) entries");
            }
        }
    }

    for (const auto& [profile_id, rows] : load_profiles_) {
        if (profile_id < 1) throw std::invalid_argument("load profile ids must be >= 1");
        if (rows.size() != static_cast<std::size_t>(interval_count_)) {
            throw std::invalid_argument("load profile " + std::to_string(profile_id) + " must cover " +
                                        std::to_string(interval_count_) + " intervals");
        }
        for (int t = 0; t < interval_count_; ++t) {
            if (rows[static_cast<std::size_t>(t)].t != t) {
                throw std::invalid_argument("load profile " + std::to_string(profile_id) +
                                            " has duplicate or missing intervals");
            }
            if (rows[static_cast<std::size_t>(t)].thdl_mbps < 0.0 || rows[static_cast<std::size_t>(t)].thul_mbps < 0.0) {
                throw std::invalid_argument("negative load value");
            }
        }
    }
}

MbpsPair ProfileSet::slice_demand(int t, int s) const {
    if (t < 0 || t >= interval_count_ || s < 1 || s > slice_count_) {
        throw std::out_of_range("no slice profile entry for t=" + std::to_string(t) + " s=" + std::to_string(s));
    }
    const SliceProfileEntry& e = slice_profiles_[static_cast<std::size_t>(t) * slice_count_ + s - 1];
    return MbpsPair{e.thdl_mbps, e.thul_mbps};
}

MbpsPair ProfileSet::bs_load(int bs, int t) const {
    if (t < 0 || t >= interval_count_) throw std::out_of_range("interval index out of range: " + std::to_string(t));
    const int profile_id = assign_profile(bs);
    auto it = load_profiles_.find(profile_id);
    if (it == load_profiles_.end()) {
        throw std::out_of_range("no load profile " + std::to_string(profile_id) + " for BS" + std::to_string(bs));
    }
    const BsLoadEntry& e = it->second[static_cast<std::size_t>(t)];
    return MbpsPair{e.thdl_mbps, e.thul_mbps};
}

std::map<int, int> ProfileSet::bs_assignment(int n_bs) const {
    std::map<int, int> assignment;
    for (int bs = 2; bs <= n_bs; ++bs) assignment[bs] = assign_profile(bs);
    return assignment;
}

ProfileSet generate_default_profiles(const ProfileGenConfig& config) {
    if (config.slice_count < 1) throw std::runtime_error("profile generation needs at least one slice");
    if (config.interval_count != 96) throw std::runtime_error("the reference day is 96 fifteen-minute intervals");
    if (config.demand_scale <= 0.0) throw std::runtime_error("demand_scale must be positive");

    const int intervals = config.interval_count;
    const int slices = config.slice_count;
    const double cap = config.wired_capacity_mbps;
    constexpr double pi = std::numbers::pi;

    std::mt19937_64 rng(config.seed);
    const auto wobble = [&](double amplitude) {
        return amplitude * (1.0 + config.jitter * (2.0 * uniform01(rng) - 1.0));
    };
    const double ul_swell = wobble(config.ul_swell);
    const double ul_over = wobble(config.ul_over);
    const double dl_swell = wobble(config.dl_swell);
    const double dl_over = wobble(config.dl_over);
    const double burst_amp = wobble(config.burst_amp);
    const double moderate_amp = wobble(config.moderate_amp);
    const double noon_amp = wobble(config.noon_amp);

    // Aggregate demand over all slices, per direction. Inside a congestion
    // window the curve sits strictly above the wired capacity (a raised
    // sine arch, optionally followed by a mild overflow tail); outside it
    // follows a sub-capacity diurnal swell clamped at 95% of capacity so
    // the window boundaries are exact by construction.
    const auto aggregate = [&](int t, int begin, int end, int arch_end, double base, double swell,
                               double sigma, double over, double tail_begin, double tail_end) {
        if (t >= begin && t < arch_end) {
            const double u = (static_cast<double>(t) - begin + 0.5) / (arch_end - begin);
            const double arch = std::sin(pi * u);
            return cap + over * (0.12 + 0.88 * arch * arch);
        }
        if (t >= arch_end && t < end) {
            const double u = (static_cast<double>(t) - arch_end) / std::max(1, end - 1 - arch_end);
            return cap + tail_begin + (tail_end - tail_begin) * u;
        }
        const double mid = 0.5 * (begin + end - 1);
        const double value = base + swell * gaussian_bump(static_cast<double>(t), mid, sigma);
        return std::min(0.95 * cap, value);
    };

    // Triangular slice weights with a small phase-shifted wobble per slice,
    // renormalized so the aggregate is preserved exactly.
    const auto slice_fraction = [&](int t, int s) {
        double sum = 0.0;
        double mine = 0.0;
        for (int r = 1; r <= slices; ++r) {
            const double weight = 2.0 * (slices - r + 1) / (static_cast<double>(slices) * (slices + 1));
            const double phase = 2.0 * pi * t / intervals + 2.0 * pi * r / 3.0;
            const double f = weight * (1.0 + 0.08 * std::sin(phase));
            sum += f;
            if (r == s) mine = f;
        }
        return mine / sum;
    };

    std::vector<SliceProfileEntry> slice_rows;
    slice_rows.reserve(static_cast<std::size_t>(intervals) * slices);
    const double tail_scale = wobble(1.0);
    for (int t = 0; t < intervals; ++t) {
        const double agg_dl = config.demand_scale *
                              aggregate(t, config.dl_window_begin, config.dl_window_end, config.dl_arch_end,
                                        config.dl_base, dl_swell, config.dl_swell_sigma, dl_over,
                                        tail_scale * config.dl_tail_over_begin,
                                        tail_scale * config.dl_tail_over_end);
        const double agg_ul = config.demand_scale *
                              aggregate(t, config.ul_window_begin, config.ul_window_end, config.ul_window_end,
                                        config.ul_base, ul_swell, config.ul_swell_sigma, ul_over, 0.0, 0.0);
        for (int s = 1; s <= slices; ++s) {
            const double f = slice_fraction(t, s);
            slice_rows.push_back(SliceProfileEntry{t, 1, s, f * agg_dl, f * agg_ul});
        }
    }

    const auto clamp_load = [&](double v) { return std::clamp(v, 0.0, cap); };
    std::map<int, std::vector<BsLoadEntry>> load_rows;
    for (int t = 0; t < intervals; ++t) {
        const double td = static_cast<double>(t);
        const double bursty = clamp_load(config.burst_base +
                                         burst_amp * (gaussian_bump(td, config.burst_center_1, config.burst_sigma) +
                                                      gaussian_bump(td, config.burst_center_2, config.burst_sigma)));
        const double moderate = clamp_load(config.moderate_base - moderate_amp * std::sin(2.0 * pi * td / intervals));
        const double noon = clamp_load(config.noon_base + noon_amp * gaussian_bump(td, 48.0, config.noon_sigma));
        load_rows[1].push_back(BsLoadEntry{t, bursty, bursty});
        load_rows[2].push_back(BsLoadEntry{t, moderate, moderate});
        load_rows[3].push_back(BsLoadEntry{t, noon, noon});
    }

    ProfileSet profiles(std::move(slice_rows), std::move(load_rows));

    if (config.guarantee_feasible) {
        // Necessary capacity conditions; the sequential-allocation oracle in
        // the harness is the sufficient check.
        const double donor_cap = std::min(cap, config.wireless_capacity_mbps);
        for (int t = 0; t < intervals; ++t) {
            double agg_dl = 0.0;
            double agg_ul = 0.0;
            for (int s = 1; s <= slices; ++s) {
                const MbpsPair demand = profiles.slice_demand(t, s);
                if (demand.dl > cap || demand.ul > cap) {
                    throw std::runtime_error("generated profiles are infeasible: slice " + std::to_string(s) +
                                             " exceeds a single path at interval " + std::to_string(t));
                }
                agg_dl += demand.dl;
                agg_ul += demand.ul;
            }
            double spare_dl = cap;
            double spare_ul = cap;
            for (int profile_id = 1; profile_id <= 3; ++profile_id) {
                const BsLoadEntry& load = profiles.load_profiles().at(profile_id)[static_cast<std::size_t>(t)];
                // Two donors carry each profile in the 7-BS scenario.
                spare_dl += 2.0 * std::max(0.0, donor_cap - load.thdl_mbps);
                spare_ul += 2.0 * std::max(0.0, donor_cap - load.thul_mbps);
            }
            if (agg_dl > spare_dl || agg_ul > spare_ul) {
                throw std::runtime_error("generated profiles are infeasible: aggregate demand exceeds network "
                                         "capacity at interval " + std::to_string(t));
            }
        }
    }
    return profiles;
}

void save_profiles_csv(const ProfileSet& profiles, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::string slices_path = (std::filesystem::path(dir) / "slices.csv").string();
    const std::string loads_path = (std::filesystem::path(dir) / "loads.csv").string();

    std::ofstream slices(slices_path);
    if (!slices) throw std::runtime_error("cannot write " + slices_path);
    slices << "t,i,s,thdl_mbps,thul_mbps\n";
    for (const SliceProfileEntry& e : profiles.slice_profiles()) {
        slices << e.t << ',' << e.serving_bs << ',' << e.slice_id << ',' << format_double(e.thdl_mbps) << ','
               << format_double(e.thul_mbps) << '\n';
    }

    std::ofstream loads(loads_path);
    if (!loads) throw std::runtime_error("cannot write " + loads_path);
    loads << "profile,t,thdl_mbps,thul_mbps\n";
    for (const auto& [profile_id, rows] : profiles.load_profiles()) {
        for (const BsLoadEntry& e : rows) {
            loads << profile_id << ',' << e.t << ',' << format_double(e.thdl_mbps) << ','
                  << format_double(e.thul_mbps) << '\n';
        }
    }
}

namespace {

long parse_int_field(const std::string& path, int line_no, const std::string& text, const char* what) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(text, &pos);
        if (pos != text.size()) parse_fail(path, line_no, std::string("malformed ") + what + ": '" + text + "'");
        return v;
    } catch (const std::logic_error&) {
        parse_fail(path, line_no, std::string("malformed ") + what + ": '" + text + "'");
    }
}

double parse_throughput_field(const std::string& path, int line_no, const std::string& text) {
    double v = 0.0;
    try {
        v = parse_double(text);
    } catch (const std::invalid_argument&) {
        parse_fail(path, line_no, "malformed throughput: '" + text + "'");
    }
    if (!(v >= 0.0)) parse_fail(path, line_no, "negative throughput: '" + text + "'");
    return v;
}

}  // namespace

ProfileSet load_profiles_csv(const std::string& dir) {
    const std::string slices_path = (std::filesystem::path(dir) / "slices.csv").string();
    const std::string loads_path = (std::filesystem::path(dir) / "loads.csv").string();

    std::ifstream slices(slices_path);
    if (!slices) throw std::runtime_error("cannot read " + slices_path);
    std::string line;
    int line_no = 1;
    if (!std::getline(slices, line) || line != "t,i,s,thdl_mbps,thul_mbps") {
        parse_fail(slices_path, 1, "expected header 't,i,s,thdl_mbps,thul_mbps'");
    }
    std::vector<SliceProfileEntry> slice_rows;
    std::set<std::pair<int, int>> seen;
    while (std::getline(slices, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_row(line);
        if (fields.size() != 5) parse_fail(slices_path, line_no, "expected 5 fields");
        SliceProfileEntry e;
        e.t = static_cast<int>(parse_int_field(slices_path, line_no, fields[0], "interval index"));
        e.serving_bs = static_cast<int>(parse_int_field(slices_path, line_no, fields[1], "node id"));
        e.slice_id = static_cast<int>(parse_int_field(slices_path, line_no, fields[2], "slice id"));
        e.thdl_mbps = parse_throughput_field(slices_path, line_no, fields[3]);
        e.thul_mbps = parse_throughput_field(slices_path, line_no, fields[4]);
        if (!seen.insert({e.t, e.slice_id}).second) {
            parse_fail(slices_path, line_no, "duplicate entry for (t=" + std::to_string(e.t) + ", s=" +
                                                 std::to_string(e.slice_id) + ")");
        }
        slice_rows.push_back(e);
    }

    std::ifstream loads(loads_path);
    if (!loads) throw std::runtime_error("cannot read " + loads_path);
    line_no = 1;
    if (!std::getline(loads, line) || line != "profile,t,thdl_mbps,thul_mbps") {
        parse_fail(loads_path, 1, "expected header 'profile,t,thdl_mbps,thul_mbps'");
    }
    std::map<int, std::vector<BsLoadEntry>> load_rows;
    std::set<std::pair<int, int>> seen_loads;
    while (std::getline(loads, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_row(line);
        if (fields.size() != 4) parse_fail(loads_path, line_no, "expected 4 fields");
        const int profile_id = static_cast<int>(parse_int_field(loads_path, line_no, fields[0], "profile id"));
        BsLoadEntry e;
        e.t = static_cast<int>(parse_int_field(loads_path, line_no, fields[1], "interval index"));
        e.thdl_mbps = parse_throughput_field(loads_path, line_no, fields[2]);
        e.thul_mbps = parse_throughput_field(loads_path, line_no, fields[3]);
        if (!seen_loads.insert({profile_id, e.t}).second) {
            parse_fail(loads_path, line_no, "duplicate entry for (profile=" + std::to_string(profile_id) +
                                                ", t=" + std::to_string(e.t) + ")");
        }
        load_rows[profile_id].push_back(e);
    }
    for (auto& [profile_id, rows] : load_rows) {
        std::sort(rows.begin(), rows.end(), [](const BsLoadEntry& a, const BsLoadEntry& b) { return a.t < b.t; });
    }

    try {
        return ProfileSet(std::move(slice_rows), std::move(load_rows));
    } catch (const std::invalid_argument& err) {
        throw std::runtime_error(dir + ": " + err.what());
    }
}

}  // namespace iabsim
