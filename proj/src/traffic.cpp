#include "bamcbr/traffic.hpp"

#include "bamcbr/errors.hpp"
#include "bamcbr/rng.hpp"

#include <algorithm>
#include <numeric>

namespace bamcbr {

std::string_view to_string(LoadLevel level) {
    switch (level) {
    case LoadLevel::Low: return "Low";
    case LoadLevel::Medium: return "Medium";
    case LoadLevel::High: return "High";
    }
    return "Low";
}

LoadLevel parse_load_level(std::string_view text) {
    if (text == "Low" || text == "low") return LoadLevel::Low;
    if (text == "Medium" || text == "medium") return LoadLevel::Medium;
    if (text == "High" || text == "high") return LoadLevel::High;
    throw ConfigError("unknown load level '" + std::string(text) + "'");
}

std::string_view to_string(LoadRegime regime) {
    return regime == LoadRegime::UnderNinety ? "UnderNinety" : "AtLeastNinety";
}

LoadRegime parse_load_regime(std::string_view text) {
    if (text == "UnderNinety" || text == "<90%") return LoadRegime::UnderNinety;
    if (text == "AtLeastNinety" || text == ">=90%") return LoadRegime::AtLeastNinety;
    throw ConfigError("unknown load regime '" + std::string(text) + "'");
}

double LoadLevels::factor(LoadLevel level) const {
    switch (level) {
    case LoadLevel::Low: return low;
    case LoadLevel::Medium: return medium;
    case LoadLevel::High: return high;
    }
    return low;
}

double DemandModel::mean_size() const {
    if (sizes.empty()) return 0.0;
    return static_cast<double>(std::accumulate(sizes.begin(), sizes.end(), Mbps{0})) /
           static_cast<double>(sizes.size());
}

std::vector<double> offered_loads(const TrafficPattern& pattern, std::span<const TrafficClassConfig> classes,
                                  const LoadLevels& levels, Mbps capacity) {
    std::vector<double> load(classes.size(), 0.0);
    double high = 0.0;
    double rest = 0.0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const LoadLevel level = c < pattern.levels.size() ? pattern.levels[c] : LoadLevel::Low;
        load[c] = levels.factor(level) * static_cast<double>(classes[c].bc);
        (level == LoadLevel::High ? high : rest) += load[c];
    }
    if (pattern.regime == LoadRegime::AtLeastNinety && high > 0.0) {
        const double floor = levels.overload_floor * static_cast<double>(capacity);
        if (high + rest < floor) {
            const double scale = (floor - rest) / high;
            for (std::size_t c = 0; c < classes.size(); ++c)
                if (pattern.levels[c] == LoadLevel::High) load[c] *= scale;
        }
    }
    return load;
}

std::vector<Arrival> generate_arrivals(const TrafficPattern& pattern, std::span<const TrafficClassConfig> classes,
                                       const LoadLevels& levels, const DemandModel& demand, Mbps capacity,
                                       std::uint64_t seed, double start) {
    std::vector<Arrival> out;
    if (pattern.duration <= 0.0 || demand.sizes.empty() || demand.mean_holding <= 0.0) return out;
    const auto load = offered_loads(pattern, classes, levels, capacity);
    const double per_lsp = demand.mean_size() * demand.mean_holding;

    for (std::size_t c = 0; c < classes.size(); ++c) {
        const double rate = load[c] / per_lsp;
        if (rate <= 0.0) continue;
        Rng rng(derive_seed(seed, 0xA77, c));
        double t = exponential(rng, 1.0 / rate);
        while (t < pattern.duration) {
            const Mbps size = demand.sizes[uniform_index(rng, demand.sizes.size())];
            const double holding = exponential(rng, demand.mean_holding);
            out.push_back({start + t, static_cast<int>(c), size, holding});
            t += exponential(rng, 1.0 / rate);
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Arrival& a, const Arrival& b) {
        return a.time != b.time ? a.time < b.time : a.class_index < b.class_index;
    });
    return out;
}

} // namespace bamcbr
