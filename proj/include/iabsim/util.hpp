#pragma once

#include <charconv>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace iabsim {

// Uniform double in [0, 1) from the top 53 bits of one engine draw.
// Avoids std::uniform_real_distribution, whose output is implementation-defined.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection, so the draw sequence is portable.
inline int uniform_int(std::mt19937_64& rng, int n) {
    const std::uint64_t bound = std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);
    std::uint64_t x = rng();
    while (x >= bound) x = rng();
    return static_cast<int>(x % static_cast<std::uint64_t>(n));
}

// splitmix64, used to derive independent stream seeds from a root seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& text) {
    double value = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("not a number: '" + text + "'");
    }
    return value;
}

// Hex-float encoding for bit-exact serialization of doubles.
std::string to_hex_float(double value);
double from_hex_float(const std::string& text);

}  // namespace iabsim
