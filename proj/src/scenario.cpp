#include "bamcbr/scenario.hpp"

#include "bamcbr/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace bamcbr {

using nlohmann::json;

double ScenarioConfig::repetition_length() const {
    double total = 0.0;
    for (const auto& p : patterns) total += p.duration;
    return total;
}

std::string ScenarioConfig::run_label() const {
    if (!label.empty()) return label;
    return mode.kind == RunKind::Static ? std::string(to_string(mode.model)) : "BAMCBR";
}

namespace {

std::vector<TrafficClassConfig> reference_classes() {
    return {{0, 0, 400, "TC0"}, {1, 1, 350, "TC1"}, {2, 2, 250, "TC2"}};
}

std::vector<TrafficPattern> standard_patterns(double duration) {
    using L = LoadLevel;
    const auto under = LoadRegime::UnderNinety;
    const auto over = LoadRegime::AtLeastNinety;
    return {
        {"1", {L::High, L::Low, L::Low}, duration, under},
        {"2", {L::Medium, L::Low, L::High}, duration, under},
        {"3", {L::Low, L::Medium, L::High}, duration, under},
        {"4", {L::High, L::High, L::High}, duration, over},
        {"5", {L::High, L::High, L::High}, duration, over},
        {"6", {L::High, L::High, L::High}, duration, over},
    };
}

} // namespace

ScenarioConfig default_scenario() {
    ScenarioConfig cfg;
    cfg.capacity = 1000;
    cfg.classes = reference_classes();
    cfg.patterns = standard_patterns(3600.0);
    cfg.repetitions = 4;
    cfg.seed = 1;
    cfg.mode = {RunKind::Cognitive, Model::MAM};
    cfg.cbr.similarity = default_similarity_config(descriptor_schema(cfg.classes, cfg.cbr.goals));
    cfg.policies = default_policy_set(cfg.thresholds);
    return cfg;
}

ScenarioConfig desk_scenario() {
    ScenarioConfig cfg = default_scenario();
    cfg.patterns = standard_patterns(600.0);
    cfg.window_length = 300.0;
    cfg.revision_timer = 300.0;
    cfg.proactive_interval = 600.0;
    return cfg;
}

ScenarioConfig with_static_model(ScenarioConfig cfg, Model model) {
    cfg.mode = {RunKind::Static, model};
    cfg.label.clear();
    return cfg;
}

ScenarioConfig with_cognitive(ScenarioConfig cfg, Model initial) {
    cfg.mode = {RunKind::Cognitive, initial};
    cfg.label.clear();
    return cfg;
}

std::vector<std::string> scenario_issues(const ScenarioConfig& cfg) {
    std::vector<std::string> issues = class_config_issues(cfg.classes, cfg.capacity);
    auto add = [&](std::string s) { issues.push_back(std::move(s)); };

    if (cfg.repetitions < 1) add("schedule.repetitions must be at least 1");
    for (std::size_t i = 0; i < cfg.patterns.size(); ++i) {
        const auto& p = cfg.patterns[i];
        const std::string where = "schedule.patterns[" + std::to_string(i) + "]";
        if (!(p.duration > 0.0)) add(where + ".duration must be positive");
        if (p.levels.size() != cfg.classes.size())
            add(where + ".levels must name one level per class (" + std::to_string(cfg.classes.size()) + ")");
    }
    if (!(cfg.window_length > 0.0)) add("measurement.window must be positive");
    if (!(cfg.revision_timer > 0.0)) add("cbr.revision_timer must be positive");
    if (cfg.proactive_interval < 0.0) add("cbr.proactive_interval must not be negative");
    if (!(cfg.guard_tolerance >= 0.0)) add("cbr.guard_tolerance must not be negative");
    if (cfg.cbr.retrieve_k < 1) add("cbr.k must be at least 1");
    if (!(cfg.cbr.hint_weight > 0.0)) add("cbr.hint_weight must be positive");
    if (cfg.mode.model == Model::Custom) add("mode.model must be MAM, RDM or ATCS");

    if (cfg.demand.sizes.empty()) add("demand.sizes must not be empty");
    for (Mbps s : cfg.demand.sizes)
        if (s <= 0) add("demand.sizes entries must be positive");
    if (!(cfg.demand.mean_holding > 0.0)) add("demand.mean_holding must be positive");
    if (!(cfg.levels.low > 0.0 && cfg.levels.medium > 0.0 && cfg.levels.high > 0.0))
        add("load_levels must map every level to a positive load");

    for (auto& s : cfg.cbr.goals.issues()) add(std::move(s));
    for (auto& s : cfg.cbr.similarity.issues()) add(std::move(s));

    if (cfg.classes.size() > 0 && issues.empty()) {
        const ProblemDescriptor schema = descriptor_schema(cfg.classes, cfg.cbr.goals);
        const AttributeMap flat = flatten(schema);
        for (const auto& [name, w] : cfg.cbr.similarity.weights)
            if (!flat.contains(name)) add("cbr.similarity.weights: unknown attribute '" + name + "'");
        double total = 0.0;
        for (const auto& [name, w] : cfg.cbr.similarity.weights) total += w;
        if (std::abs(total - 1.0) > 1e-9) add("cbr.similarity.weights must sum to 1");
        AttributeMap context = schema.contextual;
        for (auto& s : policy_rule_issues(cfg.policies, [&] {
                 AttributeMap all = schema.measurements;
                 all.insert(context.begin(), context.end());
                 return all;
             }()))
            add(std::move(s));
    }
    return issues;
}

void validate_scenario(const ScenarioConfig& cfg) {
    if (auto issues = scenario_issues(cfg); !issues.empty()) throw ConfigError(std::move(issues));
}

// ------------------------------------------------------------------- parsing

namespace {

/// Reads optional fields, recording type errors instead of throwing on the first one.
class Reader {
public:
    explicit Reader(std::vector<std::string>& issues) : issues_(issues) {}

    template <typename T>
    void read(const json& obj, const char* key, T& out, const std::string& path) {
        if (!obj.is_object() || !obj.contains(key)) return;
        try {
            out = obj.at(key).get<T>();
        } catch (const json::exception&) {
            issues_.push_back(path + "." + key + " has the wrong type");
        }
    }

    template <typename F>
    void guarded(const std::string& path, F&& f) {
        try {
            f();
        } catch (const ConfigError& e) {
            for (const auto& issue : e.issues()) issues_.push_back(path + ": " + issue);
        } catch (const json::exception&) {
            issues_.push_back(path + " is malformed");
        }
    }

    void issue(std::string s) { issues_.push_back(std::move(s)); }

private:
    std::vector<std::string>& issues_;
};

json condition_threshold_to_json(const std::variant<std::string, double>& v) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    return std::get<double>(v);
}

} // namespace

ScenarioConfig parse_scenario(const json& doc) {
    std::vector<std::string> issues;
    if (!doc.is_object()) throw ConfigError("scenario must be a JSON object");
    Reader r(issues);
    ScenarioConfig cfg = default_scenario();

    r.read(doc, "label", cfg.label, "");
    r.read(doc, "seed", cfg.seed, "");

    if (doc.contains("link")) r.read(doc.at("link"), "capacity", cfg.capacity, "link");

    if (doc.contains("classes")) {
        r.guarded("classes", [&] {
            cfg.classes.clear();
            const auto& arr = doc.at("classes");
            if (!arr.is_array()) throw ConfigError("must be an array");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                TrafficClassConfig tc;
                tc.index = static_cast<int>(i);
                tc.priority = static_cast<int>(i);
                tc.name = "TC" + std::to_string(i);
                const std::string where = "classes[" + std::to_string(i) + "]";
                r.read(arr[i], "index", tc.index, where);
                r.read(arr[i], "priority", tc.priority, where);
                r.read(arr[i], "bc", tc.bc, where);
                r.read(arr[i], "name", tc.name, where);
                cfg.classes.push_back(tc);
            }
        });
    }

    if (doc.contains("demand")) {
        const auto& d = doc.at("demand");
        r.read(d, "sizes", cfg.demand.sizes, "demand");
        r.read(d, "mean_holding", cfg.demand.mean_holding, "demand");
    }
    if (doc.contains("load_levels")) {
        const auto& l = doc.at("load_levels");
        r.read(l, "low", cfg.levels.low, "load_levels");
        r.read(l, "medium", cfg.levels.medium, "load_levels");
        r.read(l, "high", cfg.levels.high, "load_levels");
        r.read(l, "overload_floor", cfg.levels.overload_floor, "load_levels");
    }

    if (doc.contains("schedule")) {
        const auto& s = doc.at("schedule");
        r.read(s, "repetitions", cfg.repetitions, "schedule");
        r.read(s, "replay_repetitions", cfg.replay_repetitions, "schedule");
        if (s.contains("patterns")) {
            r.guarded("schedule.patterns", [&] {
                cfg.patterns.clear();
                for (const auto& p : s.at("patterns")) {
                    TrafficPattern pattern;
                    pattern.name = p.value("name", std::to_string(cfg.patterns.size() + 1));
                    pattern.duration = p.at("duration").get<double>();
                    pattern.regime = parse_load_regime(p.value("regime", std::string("UnderNinety")));
                    for (const auto& level : p.at("levels")) pattern.levels.push_back(parse_load_level(level.get<std::string>()));
                    cfg.patterns.push_back(std::move(pattern));
                }
            });
        }
    }

    if (doc.contains("mode")) {
        r.guarded("mode", [&] {
            const auto& m = doc.at("mode");
            const std::string kind = m.value("kind", std::string("cognitive"));
            if (kind == "static") {
                cfg.mode = {RunKind::Static, parse_model(m.at("model").get<std::string>())};
            } else if (kind == "cognitive") {
                cfg.mode = {RunKind::Cognitive, parse_model(m.value("initial_model", std::string("MAM")))};
            } else {
                throw ConfigError("kind must be static or cognitive");
            }
        });
    }

    if (doc.contains("measurement")) r.read(doc.at("measurement"), "window", cfg.window_length, "measurement");

    if (doc.contains("cbr")) {
        const auto& c = doc.at("cbr");
        r.read(c, "revision_timer", cfg.revision_timer, "cbr");
        r.read(c, "proactive_interval", cfg.proactive_interval, "cbr");
        r.read(c, "guard_tolerance", cfg.guard_tolerance, "cbr");
        r.read(c, "k", cfg.cbr.retrieve_k, "cbr");
        r.read(c, "hint_weight", cfg.cbr.hint_weight, "cbr");
        if (c.contains("policy_solutions"))
            r.guarded("cbr.policy_solutions", [&] {
                cfg.cbr.policy_solutions = parse_policy_solution_mode(c.at("policy_solutions").get<std::string>());
            });
        if (c.contains("goals")) {
            const auto& g = c.at("goals");
            r.read(g, "minimize", cfg.cbr.goals.minimize, "cbr.goals");
            r.read(g, "maximize", cfg.cbr.goals.maximize, "cbr.goals");
            r.read(g, "tolerances", cfg.cbr.goals.tolerances, "cbr.goals");
        }
        // Similarity defaults depend on the final class set and goals.
        cfg.cbr.similarity = default_similarity_config(descriptor_schema(cfg.classes, cfg.cbr.goals));
        if (c.contains("similarity")) {
            const auto& s = c.at("similarity");
            if (s.contains("function"))
                r.guarded("cbr.similarity.function", [&] {
                    cfg.cbr.similarity.function = parse_similarity_function(s.at("function").get<std::string>());
                });
            r.read(s, "threshold", cfg.cbr.similarity.acceptance_threshold, "cbr.similarity");
            r.read(s, "ladder", cfg.cbr.similarity.ladder_steps, "cbr.similarity");
            if (s.contains("weights")) {
                r.read(s, "weights", cfg.cbr.similarity.weights, "cbr.similarity");
                r.guarded("cbr.similarity.weights", [&] { cfg.cbr.similarity.normalize(); });
            }
        }
    } else if (doc.contains("classes")) {
        cfg.cbr.similarity = default_similarity_config(descriptor_schema(cfg.classes, cfg.cbr.goals));
    }

    cfg.policies = default_policy_set(cfg.thresholds);
    if (doc.contains("policies")) {
        const auto& p = doc.at("policies");
        if (p.contains("thresholds")) {
            const auto& t = p.at("thresholds");
            r.read(t, "utilization_low", cfg.thresholds.utilization_low, "policies.thresholds");
            r.read(t, "utilization_high", cfg.thresholds.utilization_high, "policies.thresholds");
            r.read(t, "blocking_high", cfg.thresholds.blocking_high, "policies.thresholds");
            r.read(t, "preemption_high", cfg.thresholds.preemption_high, "policies.thresholds");
            r.read(t, "devolution_high", cfg.thresholds.devolution_high, "policies.thresholds");
            cfg.policies = default_policy_set(cfg.thresholds);
        }
        if (p.contains("rules")) {
            r.guarded("policies.rules", [&] {
                cfg.policies.clear();
                for (const auto& jr : p.at("rules")) {
                    PolicyRule rule;
                    rule.name = jr.value("name", std::string("rule-") + std::to_string(cfg.policies.size() + 1));
                    rule.symptom = jr.at("symptom").get<std::string>();
                    if (jr.contains("solution") && !jr.at("solution").is_null())
                        rule.suggested_solution = parse_model(jr.at("solution").get<std::string>());
                    for (const auto& jc : jr.at("conditions")) {
                        Condition cond;
                        cond.attribute = jc.at("attribute").get<std::string>();
                        cond.op = parse_comparator(jc.at("op").get<std::string>());
                        const auto& v = jc.at("value");
                        if (v.is_string())
                            cond.threshold = v.get<std::string>();
                        else
                            cond.threshold = v.get<double>();
                        rule.conditions.push_back(std::move(cond));
                    }
                    cfg.policies.push_back(std::move(rule));
                }
            });
        }
    }

    if (doc.contains("report")) {
        std::string events = "control";
        r.read(doc.at("report"), "events", events, "report");
        if (events == "full")
            cfg.events = EventDetail::Full;
        else if (events == "control")
            cfg.events = EventDetail::Control;
        else
            r.issue("report.events must be control or full");
    }

    if (issues.empty()) issues = scenario_issues(cfg);
    if (!issues.empty()) throw ConfigError(std::move(issues));
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_scenario(doc);
}

json scenario_to_json(const ScenarioConfig& cfg) {
    json doc;
    doc["label"] = cfg.label;
    doc["seed"] = cfg.seed;
    doc["link"] = {{"capacity", cfg.capacity}};
    doc["classes"] = json::array();
    for (const auto& tc : cfg.classes)
        doc["classes"].push_back({{"index", tc.index}, {"name", tc.name}, {"priority", tc.priority}, {"bc", tc.bc}});
    doc["demand"] = {{"sizes", cfg.demand.sizes}, {"mean_holding", cfg.demand.mean_holding}};
    doc["load_levels"] = {{"low", cfg.levels.low},
                          {"medium", cfg.levels.medium},
                          {"high", cfg.levels.high},
                          {"overload_floor", cfg.levels.overload_floor}};
    json patterns = json::array();
    for (const auto& p : cfg.patterns) {
        json levels = json::array();
        for (auto l : p.levels) levels.push_back(std::string(to_string(l)));
        patterns.push_back({{"name", p.name},
                            {"duration", p.duration},
                            {"regime", std::string(to_string(p.regime))},
                            {"levels", levels}});
    }
    doc["schedule"] = {
        {"repetitions", cfg.repetitions}, {"replay_repetitions", cfg.replay_repetitions}, {"patterns", patterns}};
    if (cfg.mode.kind == RunKind::Static)
        doc["mode"] = {{"kind", "static"}, {"model", std::string(to_string(cfg.mode.model))}};
    else
        doc["mode"] = {{"kind", "cognitive"}, {"initial_model", std::string(to_string(cfg.mode.model))}};
    doc["measurement"] = {{"window", cfg.window_length}};

    const auto& sim = cfg.cbr.similarity;
    doc["cbr"] = {
        {"revision_timer", cfg.revision_timer},
        {"proactive_interval", cfg.proactive_interval},
        {"guard_tolerance", cfg.guard_tolerance},
        {"k", cfg.cbr.retrieve_k},
        {"hint_weight", cfg.cbr.hint_weight},
        {"policy_solutions", std::string(to_string(cfg.cbr.policy_solutions))},
        {"goals",
         {{"minimize", cfg.cbr.goals.minimize},
          {"maximize", cfg.cbr.goals.maximize},
          {"tolerances", cfg.cbr.goals.tolerances}}},
        {"similarity",
         {{"function", std::string(to_string(sim.function))},
          {"threshold", sim.acceptance_threshold},
          {"weights", sim.weights},
          {"ladder", sim.ladder_steps}}},
    };

    json rules = json::array();
    for (const auto& rule : cfg.policies) {
        json conds = json::array();
        for (const auto& c : rule.conditions)
            conds.push_back({{"attribute", c.attribute},
                             {"op", std::string(to_string(c.op))},
                             {"value", condition_threshold_to_json(c.threshold)}});
        json jr = {{"name", rule.name}, {"symptom", rule.symptom}, {"conditions", conds}};
        jr["solution"] = rule.suggested_solution ? json(std::string(to_string(*rule.suggested_solution))) : json(nullptr);
        rules.push_back(std::move(jr));
    }
    doc["policies"] = {{"thresholds",
                        {{"utilization_low", cfg.thresholds.utilization_low},
                         {"utilization_high", cfg.thresholds.utilization_high},
                         {"blocking_high", cfg.thresholds.blocking_high},
                         {"preemption_high", cfg.thresholds.preemption_high},
                         {"devolution_high", cfg.thresholds.devolution_high}}},
                       {"rules", rules}};
    doc["report"] = {{"events", cfg.events == EventDetail::Full ? "full" : "control"}};
    return doc;
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string schedule_hash(const ScenarioConfig& cfg) {
    const json full = scenario_to_json(cfg);
    json traffic;
    for (const char* key : {"seed", "link", "classes", "demand", "load_levels", "schedule"}) traffic[key] = full.at(key);
    return fnv1a_hex(traffic.dump());
}

std::string config_hash(const ScenarioConfig& cfg) { return fnv1a_hex(scenario_to_json(cfg).dump()); }

} // namespace bamcbr
