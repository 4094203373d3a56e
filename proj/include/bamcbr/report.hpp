#pragma once

// Report files and comparison tables. A report is JSON Lines: one header,
// then window, timeline, control, event and repetition records, then one summary.

#include "bamcbr/simulation.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace bamcbr {

inline constexpr int kReportFormat = 1;

std::string emit_report(const SimulationReport& report);
void write_report(const SimulationReport& report, std::ostream& out);
void write_report_file(const SimulationReport& report, const std::string& path);

/// Throws FormatError with the offending line number.
SimulationReport parse_report(std::string_view text);
SimulationReport read_report_file(const std::string& path);

struct ComparisonRow {
    std::string label;
    std::int64_t preemption = 0;
    std::int64_t devolution = 0;
    std::int64_t blocking = 0;
    std::int64_t unbroken = 0;
    std::string config_hash;

    bool operator==(const ComparisonRow&) const = default;
};

struct ComparisonReport {
    std::string schedule_hash;
    std::uint64_t seed = 0;
    int repetitions = 0;
    double repetition_length = 0.0;
    bool by_repetition = false;
    std::vector<ComparisonRow> rows;

    bool operator==(const ComparisonReport&) const = default;
};

/// One row per report, or with `by_repetition` one row per repetition ("BAMCBR 2/4").
/// Throws ComparabilityError for fewer than two reports (one is enough when
/// splitting by repetition) or when the schedule hashes differ.
ComparisonReport compare_reports(std::span<const SimulationReport> reports, bool by_repetition = false);

std::string format_comparison_human(const ComparisonReport& cmp);
nlohmann::json comparison_to_json(const ComparisonReport& cmp);
ComparisonReport comparison_from_json(const nlohmann::json& doc);

/// Short plain-text digest of one run: totals, timeline, trigger and case counts.
std::string format_run_human(const SimulationReport& report);

} // namespace bamcbr
