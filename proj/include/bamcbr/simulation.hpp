#pragma once

// Discrete-event loop over one link: seeded arrivals, departures, tumbling
// measurement windows and, in cognitive mode, the CBR triggers.

#include "bamcbr/bam.hpp"
#include "bamcbr/cbr.hpp"
#include "bamcbr/measurements.hpp"
#include "bamcbr/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bamcbr {

struct WindowRecord {
    std::int64_t index = 0;
    int repetition = 0; ///< 0-based
    std::string pattern;
    double start = 0.0;
    double end = 0.0;
    Model model = Model::MAM; ///< active at window close
    MetricCounters counters;
    Measurements measurements; ///< utilization time-averaged over the window
    std::string symptom;       ///< first matching rule at close, cognitive runs only

    bool operator==(const WindowRecord&) const = default;
};

struct TimelineEntry {
    double time = 0.0;
    int repetition = 0;
    double offset = 0.0; ///< time since the repetition started
    Model model = Model::MAM;
    std::string cause; ///< "initial" or the proposal source

    bool operator==(const TimelineEntry&) const = default;
};

enum class ControlKind { Cycle, Revision, Suppressed };
std::string_view to_string(ControlKind k);

struct ControlRecord {
    double time = 0.0;
    int repetition = 0;
    ControlKind kind = ControlKind::Cycle;
    Trigger trigger = Trigger::Reactive;
    std::string result; ///< NoAction / Applied / Suppressed or the verdict
    std::optional<Model> solution;
    std::string source;
    std::string symptom;
    double score = 0.0;
    bool retained = false;
    std::string note;

    bool operator==(const ControlRecord&) const = default;
};

struct TriggerStats {
    std::int64_t reactive_fired = 0;
    std::int64_t reactive_suppressed = 0;
    std::int64_t proactive_fired = 0;
    std::int64_t proactive_suppressed = 0;

    bool operator==(const TriggerStats&) const = default;
};

struct CaseBaseStats {
    std::int64_t positive = 0;
    std::int64_t negative = 0;
    EngineStats engine;
    std::vector<std::int64_t> retained_per_repetition;

    bool operator==(const CaseBaseStats&) const = default;
};

struct RepetitionSummary {
    int repetition = 0;
    MetricCounters counters;
    std::int64_t retained = 0;
    std::vector<TimelineEntry> timeline;

    bool operator==(const RepetitionSummary&) const = default;
};

struct SimulationReport {
    std::string label;
    std::uint64_t seed = 0;
    std::string schedule_hash;
    std::string config_hash;
    RunMode mode;
    int repetitions = 0;
    double repetition_length = 0.0;
    std::vector<std::string> class_names;

    MetricCounters totals;
    std::int64_t active_at_end = 0;
    std::vector<MetricCounters> repetition_counters; ///< one per repetition
    std::vector<WindowRecord> windows;
    std::vector<TimelineEntry> timeline;
    std::vector<ControlRecord> control;
    std::vector<LinkEvent> events;
    TriggerStats triggers;
    CaseBaseStats cases;

    std::int64_t victimized() const { return totals.total_preemption() + totals.total_devolution(); }

    bool operator==(const SimulationReport&) const = default;
};

/// Per-repetition counters, retained-case counts and model timelines.
std::vector<RepetitionSummary> split_by_repetition(const SimulationReport& report);

class Simulation {
public:
    /// Throws ConfigError when the scenario is invalid.
    explicit Simulation(ScenarioConfig cfg);

    void run();
    const SimulationReport& report() const noexcept { return report_; }
    const LinkState& link() const noexcept { return link_; }
    const std::optional<CbrEngine>& engine() const noexcept { return engine_; }
    const ScenarioConfig& config() const noexcept { return cfg_; }

private:
    enum class EventKind { WindowClose, ProactiveTick, Arrival, Departure };
    using Ticks = std::int64_t; ///< microseconds
    struct Event {
        Ticks time = 0;
        std::uint64_t seq = 0;
        EventKind kind = EventKind::Arrival;
        std::size_t payload = 0; ///< arrival index or LSP id
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    static double seconds(Ticks t) { return static_cast<double>(t) / 1e6; }
    static Ticks ticks(double s);

    void advance_to(Ticks t);
    void close_window(Ticks close);
    void proactive_tick(Ticks t);
    void fire_trigger(Trigger trigger, const Measurements& m, double t);
    void record_cycle(const CycleOutcome& out, double t);
    void drain_link_events();
    int repetition_at(double t) const;
    std::string pattern_at(double t) const;

    ScenarioConfig cfg_;
    LinkState link_;
    std::optional<CbrEngine> engine_;
    ProfileGuard guard_;
    std::vector<Arrival> arrivals_;
    std::vector<Ticks> arrival_ticks_;
    std::vector<Ticks> holding_ticks_;
    SimulationReport report_;

    Ticks clock_ = 0;
    Ticks window_start_ = 0;
    std::int64_t used_area_ = 0; ///< Mbps x microseconds
    std::vector<std::int64_t> lender_area_;
    MetricCounters window_base_;
    MetricCounters repetition_base_;
    int current_repetition_ = 0;
    std::optional<Measurements> last_window_;
    bool ran_ = false;
};

/// Validates, runs to the end of the schedule and returns the report.
SimulationReport run_scenario(const ScenarioConfig& cfg);

} // namespace bamcbr
