#pragma once

#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace specdec {

struct LatencyModel {
    enum class Kind { Fixed, Linear, Empirical };
    Kind kind = Kind::Fixed;
    double fixed_rounds = 1.0;  // Fixed; may be expressed in units of d via fixed_per_d
    bool fixed_per_d = false;   // "fixed:2d" means 2 * d rounds
    double r = 1.0;             // Linear: t = r * v / d^2 rounds
    std::map<int, std::vector<double>> buckets;  // Empirical: volume multiple -> samples (rounds)

    static LatencyModel fixed(double rounds) { return {Kind::Fixed, rounds, false, 1.0, {}}; }
    static LatencyModel fixed_d(double multiple) { return {Kind::Fixed, multiple, true, 1.0, {}}; }
    static LatencyModel linear(double r) { return {Kind::Linear, 1.0, false, r, {}}; }
};

// "fixed:X", "fixed:Xd", "linear:R" or "empirical:FILE". Throws std::invalid_argument.
LatencyModel parse_latency_model(std::string_view text);
LatencyModel load_empirical_latency(const std::string& path);
std::string describe(const LatencyModel& m);

// Volume in units of d^3, rounded up to a whole multiple before lookup. Always >= 1 round.
int decode_latency(double volume, int d, const LatencyModel& m, std::mt19937_64& rng);

}  // namespace specdec
