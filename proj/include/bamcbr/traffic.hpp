#pragma once

#include "bamcbr/bam.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bamcbr {

enum class LoadLevel { Low, Medium, High };
enum class LoadRegime { UnderNinety, AtLeastNinety };

std::string_view to_string(LoadLevel level);
LoadLevel parse_load_level(std::string_view text);
std::string_view to_string(LoadRegime regime);
LoadRegime parse_load_regime(std::string_view text);

struct TrafficPattern {
    std::string name;
    std::vector<LoadLevel> levels; ///< one per class
    double duration = 0.0;         ///< seconds
    LoadRegime regime = LoadRegime::UnderNinety;

    bool operator==(const TrafficPattern&) const = default;
};

/// Offered load of each level as a fraction of the class BC.
struct LoadLevels {
    double low = 0.3;
    double medium = 0.7;
    double high = 1.2;
    /// AtLeastNinety patterns scale their High classes up until total offered load reaches this share of capacity.
    double overload_floor = 0.9;

    double factor(LoadLevel level) const;
    bool operator==(const LoadLevels&) const = default;
};

struct DemandModel {
    std::vector<Mbps> sizes{10, 25, 50}; ///< drawn uniformly
    double mean_holding = 120.0;         ///< exponential, seconds

    double mean_size() const;
    bool operator==(const DemandModel&) const = default;
};

struct Arrival {
    double time = 0.0;
    int class_index = 0;
    Mbps bandwidth = 0;
    double holding_time = 0.0;

    bool operator==(const Arrival&) const = default;
};

/// Mean offered load (Mbps) per class for a pattern.
std::vector<double> offered_loads(const TrafficPattern& pattern, std::span<const TrafficClassConfig> classes,
                                  const LoadLevels& levels, Mbps capacity);

/// Poisson arrivals per class over [start, start + duration), merged in time
/// order. Each class draws from its own stream derived from `seed`.
std::vector<Arrival> generate_arrivals(const TrafficPattern& pattern, std::span<const TrafficClassConfig> classes,
                                       const LoadLevels& levels, const DemandModel& demand, Mbps capacity,
                                       std::uint64_t seed, double start = 0.0);

} // namespace bamcbr
