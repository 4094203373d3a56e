#include "bamcbr/json_io.hpp"

#include "bamcbr/errors.hpp"

#include <initializer_list>

namespace bamcbr {

using nlohmann::json;

namespace {

template <class E>
E parse_enum(std::string_view text, std::initializer_list<E> values, const char* what) {
    for (E v : values)
        if (to_string(v) == text) return v;
    throw FormatError(std::string("unknown ") + what + " '" + std::string(text) + "'");
}

std::optional<Model> optional_model(const json& j) {
    if (j.is_null()) return std::nullopt;
    return parse_model(j.get<std::string>());
}

json model_or_null(const std::optional<Model>& m) {
    return m ? json(std::string(to_string(*m))) : json(nullptr);
}

} // namespace

LinkEventKind parse_link_event_kind(std::string_view text) {
    using K = LinkEventKind;
    return parse_enum(text, {K::Admit, K::Block, K::Preempt, K::Devolve, K::Release, K::Reconfigure, K::Warning},
                      "event kind");
}

Trigger parse_trigger(std::string_view text) {
    return parse_enum(text, {Trigger::Reactive, Trigger::Proactive}, "trigger");
}

ControlKind parse_control_kind(std::string_view text) {
    return parse_enum(text, {ControlKind::Cycle, ControlKind::Revision, ControlKind::Suppressed}, "control kind");
}

std::string_view to_string(RunKind k) { return k == RunKind::Static ? "static" : "cognitive"; }

RunKind parse_run_kind(std::string_view text) {
    return parse_enum(text, {RunKind::Static, RunKind::Cognitive}, "run kind");
}

void to_json(json& j, const MetricCounters& c) {
    j = {{"window_id", c.window_id},   {"arrivals", c.arrivals},     {"established", c.established},
         {"blocking", c.blocking},     {"preemption", c.preemption}, {"devolution", c.devolution},
         {"unbroken", c.unbroken}};
}

void from_json(const json& j, MetricCounters& c) {
    j.at("window_id").get_to(c.window_id);
    j.at("arrivals").get_to(c.arrivals);
    j.at("established").get_to(c.established);
    j.at("blocking").get_to(c.blocking);
    j.at("preemption").get_to(c.preemption);
    j.at("devolution").get_to(c.devolution);
    j.at("unbroken").get_to(c.unbroken);
}

void to_json(json& j, const Measurements& m) {
    j = {{"duration", m.duration},       {"utilization", m.utilization},
         {"class_utilization", m.class_utilization},
         {"arrivals", m.arrivals},       {"established", m.established},
         {"blocking", m.blocking},       {"preemption", m.preemption},
         {"devolution", m.devolution},   {"unbroken", m.unbroken},
         {"active", m.active},           {"class_arrivals", m.class_arrivals}};
}

void from_json(const json& j, Measurements& m) {
    j.at("duration").get_to(m.duration);
    j.at("utilization").get_to(m.utilization);
    j.at("class_utilization").get_to(m.class_utilization);
    j.at("arrivals").get_to(m.arrivals);
    j.at("established").get_to(m.established);
    j.at("blocking").get_to(m.blocking);
    j.at("preemption").get_to(m.preemption);
    j.at("devolution").get_to(m.devolution);
    j.at("unbroken").get_to(m.unbroken);
    j.at("active").get_to(m.active);
    j.at("class_arrivals").get_to(m.class_arrivals);
}

void to_json(json& j, const Attribute& a) {
    if (a.kind() == AttributeKind::Categorical)
        j = {{"value", a.text()}, {"lo", a.lo}, {"hi", a.hi}};
    else
        j = {{"value", a.number()}, {"lo", a.lo}, {"hi", a.hi}};
}

void from_json(const json& j, Attribute& a) {
    const json& v = j.at("value");
    if (v.is_string())
        a.value = v.get<std::string>();
    else if (v.is_number())
        a.value = v.get<double>();
    else
        throw FormatError("attribute value must be a string or a number");
    j.at("lo").get_to(a.lo);
    j.at("hi").get_to(a.hi);
}

void to_json(json& j, const ProblemDescriptor& p) {
    j = {{"symptom", p.symptom}, {"contextual", p.contextual}, {"measurements", p.measurements}};
}

void from_json(const json& j, ProblemDescriptor& p) {
    j.at("symptom").get_to(p.symptom);
    j.at("contextual").get_to(p.contextual);
    j.at("measurements").get_to(p.measurements);
}

void to_json(json& j, const Case& c) {
    j = {{"id", c.id},
         {"status", std::string(to_string(c.status))},
         {"solution", std::string(to_string(c.solution))},
         {"created_at", c.created_at},
         {"problem", c.problem},
         {"before", c.metrics_before ? json(*c.metrics_before) : json(nullptr)},
         {"after", c.metrics_after ? json(*c.metrics_after) : json(nullptr)}};
}

void from_json(const json& j, Case& c) {
    j.at("id").get_to(c.id);
    c.status = parse_case_status(j.at("status").get<std::string>());
    c.solution = parse_model(j.at("solution").get<std::string>());
    j.at("created_at").get_to(c.created_at);
    j.at("problem").get_to(c.problem);
    c.metrics_before.reset();
    c.metrics_after.reset();
    if (!j.at("before").is_null()) c.metrics_before = j.at("before").get<Measurements>();
    if (!j.at("after").is_null()) c.metrics_after = j.at("after").get<Measurements>();
}

void to_json(json& j, const LinkEvent& e) {
    j = {{"time", e.time},
         {"kind", std::string(to_string(e.kind))},
         {"lsp", e.lsp_id},
         {"class", e.class_index},
         {"bandwidth", e.bandwidth},
         {"model", std::string(to_string(e.model))},
         {"note", e.note}};
}

void from_json(const json& j, LinkEvent& e) {
    j.at("time").get_to(e.time);
    e.kind = parse_link_event_kind(j.at("kind").get<std::string>());
    j.at("lsp").get_to(e.lsp_id);
    j.at("class").get_to(e.class_index);
    j.at("bandwidth").get_to(e.bandwidth);
    e.model = parse_model(j.at("model").get<std::string>());
    j.at("note").get_to(e.note);
}

void to_json(json& j, const WindowRecord& w) {
    j = {{"index", w.index},
         {"repetition", w.repetition},
         {"pattern", w.pattern},
         {"start", w.start},
         {"end", w.end},
         {"model", std::string(to_string(w.model))},
         {"counters", w.counters},
         {"measurements", w.measurements},
         {"symptom", w.symptom}};
}

void from_json(const json& j, WindowRecord& w) {
    j.at("index").get_to(w.index);
    j.at("repetition").get_to(w.repetition);
    j.at("pattern").get_to(w.pattern);
    j.at("start").get_to(w.start);
    j.at("end").get_to(w.end);
    w.model = parse_model(j.at("model").get<std::string>());
    j.at("counters").get_to(w.counters);
    j.at("measurements").get_to(w.measurements);
    j.at("symptom").get_to(w.symptom);
}

void to_json(json& j, const TimelineEntry& t) {
    j = {{"time", t.time},
         {"repetition", t.repetition},
         {"offset", t.offset},
         {"model", std::string(to_string(t.model))},
         {"cause", t.cause}};
}

void from_json(const json& j, TimelineEntry& t) {
    j.at("time").get_to(t.time);
    j.at("repetition").get_to(t.repetition);
    j.at("offset").get_to(t.offset);
    t.model = parse_model(j.at("model").get<std::string>());
    j.at("cause").get_to(t.cause);
}

void to_json(json& j, const ControlRecord& r) {
    j = {{"time", r.time},
         {"repetition", r.repetition},
         {"kind", std::string(to_string(r.kind))},
         {"trigger", std::string(to_string(r.trigger))},
         {"result", r.result},
         {"solution", model_or_null(r.solution)},
         {"source", r.source},
         {"symptom", r.symptom},
         {"score", r.score},
         {"retained", r.retained},
         {"note", r.note}};
}

void from_json(const json& j, ControlRecord& r) {
    j.at("time").get_to(r.time);
    j.at("repetition").get_to(r.repetition);
    r.kind = parse_control_kind(j.at("kind").get<std::string>());
    r.trigger = parse_trigger(j.at("trigger").get<std::string>());
    j.at("result").get_to(r.result);
    r.solution = optional_model(j.at("solution"));
    j.at("source").get_to(r.source);
    j.at("symptom").get_to(r.symptom);
    j.at("score").get_to(r.score);
    j.at("retained").get_to(r.retained);
    j.at("note").get_to(r.note);
}

void to_json(json& j, const TriggerStats& s) {
    j = {{"reactive_fired", s.reactive_fired},
         {"reactive_suppressed", s.reactive_suppressed},
         {"proactive_fired", s.proactive_fired},
         {"proactive_suppressed", s.proactive_suppressed}};
}

void from_json(const json& j, TriggerStats& s) {
    j.at("reactive_fired").get_to(s.reactive_fired);
    j.at("reactive_suppressed").get_to(s.reactive_suppressed);
    j.at("proactive_fired").get_to(s.proactive_fired);
    j.at("proactive_suppressed").get_to(s.proactive_suppressed);
}

void to_json(json& j, const EngineStats& s) {
    j = {{"cycles", s.cycles},         {"no_action", s.no_action}, {"hits", s.hits},
         {"misses", s.misses},         {"invalid", s.invalid},     {"positive", s.positive},
         {"negative", s.negative},     {"inconclusive", s.inconclusive},
         {"retained", s.retained}};
}

void from_json(const json& j, EngineStats& s) {
    j.at("cycles").get_to(s.cycles);
    j.at("no_action").get_to(s.no_action);
    j.at("hits").get_to(s.hits);
    j.at("misses").get_to(s.misses);
    j.at("invalid").get_to(s.invalid);
    j.at("positive").get_to(s.positive);
    j.at("negative").get_to(s.negative);
    j.at("inconclusive").get_to(s.inconclusive);
    j.at("retained").get_to(s.retained);
}

} // namespace bamcbr
