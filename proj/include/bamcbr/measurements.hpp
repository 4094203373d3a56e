#pragma once

#include "bamcbr/bam.hpp"

#include <cstdint>
#include <vector>

namespace bamcbr {

/// Snapshot of a link over one measurement window.
struct Measurements {
    double duration = 0.0;                 ///< window length in seconds
    double utilization = 0.0;              ///< occupied / capacity
    std::vector<double> class_utilization; ///< BC occupancy / BC
    std::int64_t arrivals = 0;
    std::int64_t established = 0;
    std::int64_t blocking = 0;
    std::int64_t preemption = 0;
    std::int64_t devolution = 0;
    std::int64_t unbroken = 0;
    std::int64_t active = 0;
    std::vector<std::int64_t> class_arrivals;

    /// count / arrivals, 0 when nothing arrived.
    double rate(std::int64_t count) const {
        return arrivals > 0 ? static_cast<double>(count) / static_cast<double>(arrivals) : 0.0;
    }

    /// Look up a counter by its goal name ("preemption", "devolution", "blocking",
    /// "unbroken", "established", "arrivals"). Throws std::out_of_range otherwise.
    std::int64_t metric(const std::string& name) const;

    bool operator==(const Measurements&) const = default;
};

/// Instantaneous occupancy of `state` combined with the counters of the current window.
Measurements snapshot_measurements(const LinkState& state, const MetricCounters& window);

} // namespace bamcbr
