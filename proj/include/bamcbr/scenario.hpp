#pragma once

#include "bamcbr/bam.hpp"
#include "bamcbr/cbr.hpp"
#include "bamcbr/policy.hpp"
#include "bamcbr/traffic.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bamcbr {

enum class RunKind { Static, Cognitive };
enum class EventDetail { Control, Full };

struct RunMode {
    RunKind kind = RunKind::Cognitive;
    Model model = Model::MAM; ///< the static model, or the initial model of a cognitive run

    bool operator==(const RunMode&) const = default;
};

struct ScenarioConfig {
    std::string label; ///< row name in comparisons; derived from the mode when empty
    Mbps capacity = 1000;
    std::vector<TrafficClassConfig> classes;
    std::vector<TrafficPattern> patterns;
    int repetitions = 4;
    bool replay_repetitions = true; ///< every repetition replays the same arrival stream
    std::uint64_t seed = 1;
    RunMode mode;
    double window_length = 1800.0;
    double revision_timer = 1800.0;
    double proactive_interval = 1800.0; ///< 0 disables proactive triggers
    double guard_tolerance = 0.20;
    CbrSettings cbr;
    PolicyThresholds thresholds;
    std::vector<PolicyRule> policies;
    DemandModel demand;
    LoadLevels levels;
    EventDetail events = EventDetail::Control;

    double repetition_length() const;
    double duration() const { return repetition_length() * repetitions; }
    std::string run_label() const;

    bool operator==(const ScenarioConfig&) const = default;
};

/// The six standard one-hour load patterns repeated four times on a 1G link with
/// BC0/BC1/BC2 = 400/350/250, cognitive mode starting on MAM.
ScenarioConfig default_scenario();

/// The same structure compressed to ten-minute patterns with five-minute windows.
ScenarioConfig desk_scenario();

ScenarioConfig with_static_model(ScenarioConfig cfg, Model model);
ScenarioConfig with_cognitive(ScenarioConfig cfg, Model initial = Model::MAM);

/// Every violated constraint, phrased with the offending field path.
std::vector<std::string> scenario_issues(const ScenarioConfig& cfg);

/// Throws ConfigError carrying every issue.
void validate_scenario(const ScenarioConfig& cfg);

/// Missing sections take defaults. Throws ConfigError naming each malformed field.
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig load_scenario(const std::string& path);
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

/// FNV-1a over the canonical JSON of everything that shapes the traffic
/// (link, classes, demand, load levels, schedule, seed).
std::string schedule_hash(const ScenarioConfig& cfg);
/// FNV-1a over the whole canonical configuration.
std::string config_hash(const ScenarioConfig& cfg);

std::string fnv1a_hex(std::string_view bytes);

} // namespace bamcbr
