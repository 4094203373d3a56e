#pragma once

// nlohmann::json converters for the record types that reports and case bases persist.

#include "bamcbr/bam.hpp"
#include "bamcbr/cbr.hpp"
#include "bamcbr/measurements.hpp"
#include "bamcbr/simulation.hpp"

#include "json.hpp"

namespace bamcbr {

void to_json(nlohmann::json& j, const MetricCounters& c);
void from_json(const nlohmann::json& j, MetricCounters& c);

void to_json(nlohmann::json& j, const Measurements& m);
void from_json(const nlohmann::json& j, Measurements& m);

/// {"value", "lo", "hi"}; a string value marks a categorical attribute.
void to_json(nlohmann::json& j, const Attribute& a);
void from_json(const nlohmann::json& j, Attribute& a);

void to_json(nlohmann::json& j, const ProblemDescriptor& p);
void from_json(const nlohmann::json& j, ProblemDescriptor& p);

void to_json(nlohmann::json& j, const Case& c);
void from_json(const nlohmann::json& j, Case& c);

void to_json(nlohmann::json& j, const LinkEvent& e);
void from_json(const nlohmann::json& j, LinkEvent& e);

void to_json(nlohmann::json& j, const WindowRecord& w);
void from_json(const nlohmann::json& j, WindowRecord& w);

void to_json(nlohmann::json& j, const TimelineEntry& t);
void from_json(const nlohmann::json& j, TimelineEntry& t);

void to_json(nlohmann::json& j, const ControlRecord& r);
void from_json(const nlohmann::json& j, ControlRecord& r);

void to_json(nlohmann::json& j, const TriggerStats& s);
void from_json(const nlohmann::json& j, TriggerStats& s);

void to_json(nlohmann::json& j, const EngineStats& s);
void from_json(const nlohmann::json& j, EngineStats& s);

LinkEventKind parse_link_event_kind(std::string_view text);
Trigger parse_trigger(std::string_view text);
ControlKind parse_control_kind(std::string_view text);
RunKind parse_run_kind(std::string_view text);
std::string_view to_string(RunKind k);

} // namespace bamcbr
