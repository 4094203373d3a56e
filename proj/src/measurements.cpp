#include "bamcbr/measurements.hpp"

#include <stdexcept>

namespace bamcbr {

std::int64_t Measurements::metric(const std::string& name) const {
    if (name == "preemption") return preemption;
    if (name == "devolution") return devolution;
    if (name == "blocking") return blocking;
    if (name == "unbroken") return unbroken;
    if (name == "established") return established;
    if (name == "arrivals") return arrivals;
    throw std::out_of_range("unknown metric '" + name + "'");
}

Measurements snapshot_measurements(const LinkState& state, const MetricCounters& window) {
    Measurements m;
    const auto n = state.class_count();
    m.class_utilization.resize(n);
    for (std::size_t l = 0; l < n; ++l)
        m.class_utilization[l] =
            static_cast<double>(state.used_per_lender[l]) / static_cast<double>(state.classes[l].bc);
    m.utilization = state.capacity > 0 ? static_cast<double>(state.total_used()) / static_cast<double>(state.capacity)
                                       : 0.0;
    m.arrivals = window.total_arrivals();
    m.established = window.total_established();
    m.blocking = window.total_blocking();
    m.preemption = window.total_preemption();
    m.devolution = window.total_devolution();
    m.unbroken = window.total_unbroken();
    m.active = static_cast<std::int64_t>(state.active_lsps.size());
    m.class_arrivals = window.arrivals;
    m.class_arrivals.resize(n, 0);
    return m;
}

} // namespace bamcbr
