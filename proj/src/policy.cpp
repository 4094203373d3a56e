#include "bamcbr/policy.hpp"

#include "bamcbr/errors.hpp"

#include <algorithm>
#include <set>

namespace bamcbr {

std::string_view to_string(Comparator op) {
    switch (op) {
    case Comparator::Less: return "<";
    case Comparator::LessEqual: return "<=";
    case Comparator::Greater: return ">";
    case Comparator::GreaterEqual: return ">=";
    case Comparator::Equal: return "==";
    case Comparator::NotEqual: return "!=";
    }
    return "==";
}

Comparator parse_comparator(std::string_view text) {
    if (text == "<") return Comparator::Less;
    if (text == "<=") return Comparator::LessEqual;
    if (text == ">") return Comparator::Greater;
    if (text == ">=") return Comparator::GreaterEqual;
    if (text == "==" || text == "=") return Comparator::Equal;
    if (text == "!=") return Comparator::NotEqual;
    throw ConfigError("unknown comparator '" + std::string(text) + "'");
}

std::vector<PolicyRule> default_policy_set(const PolicyThresholds& t) {
    auto model_is = [](Model m) { return Condition{"active_model", Comparator::Equal, std::string(to_string(m))}; };
    auto num = [](const char* attr, Comparator op, double v) { return Condition{attr, op, v}; };

    const Condition low_util = num("utilization", Comparator::Less, t.utilization_low);
    const Condition high_util = num("utilization", Comparator::GreaterEqual, t.utilization_high);
    const Condition high_blocking = num("blocking_rate", Comparator::GreaterEqual, t.blocking_high);
    const Condition high_preemption = num("preemption_rate", Comparator::GreaterEqual, t.preemption_high);
    const Condition low_preemption = num("preemption_rate", Comparator::Less, t.preemption_high);
    const Condition high_devolution = num("devolution_rate", Comparator::GreaterEqual, t.devolution_high);

    return {
        {"mam-low-utilization", {model_is(Model::MAM), low_util}, "mam_low_utilization", Model::ATCS},
        {"rdm-low-utilization-high-blocking",
         {model_is(Model::RDM), low_util, high_blocking},
         "rdm_low_utilization_high_blocking",
         Model::ATCS},
        {"rdm-high-utilization-high-preemption",
         {model_is(Model::RDM), high_util, high_preemption},
         "rdm_high_utilization_high_preemption",
         Model::MAM},
        {"atcs-high-utilization-high-devolution",
         {model_is(Model::ATCS), high_util, low_preemption, high_devolution},
         "atcs_high_utilization_high_devolution",
         Model::RDM},
        {"atcs-high-utilization-high-preemption",
         {model_is(Model::ATCS), high_util, high_preemption},
         "atcs_high_utilization_high_preemption",
         Model::MAM},
    };
}

std::vector<std::string> policy_rule_issues(std::span<const PolicyRule> rules, const AttributeMap& schema) {
    std::vector<std::string> issues;
    for (std::size_t r = 0; r < rules.size(); ++r) {
        const auto& rule = rules[r];
        const std::string where = "policies[" + std::to_string(r) + "]";
        if (rule.symptom.empty()) issues.push_back(where + ".symptom must not be empty");
        if (rule.conditions.empty()) issues.push_back(where + " has no conditions");
        if (rule.suggested_solution == Model::Custom)
            issues.push_back(where + ".solution must be MAM, RDM or ATCS");
        for (std::size_t c = 0; c < rule.conditions.size(); ++c) {
            const auto& cond = rule.conditions[c];
            const std::string cwhere = where + ".conditions[" + std::to_string(c) + "]";
            auto it = schema.find(cond.attribute);
            if (it == schema.end()) {
                issues.push_back(cwhere + ": unknown attribute '" + cond.attribute + "'");
                continue;
            }
            const Attribute& attr = it->second;
            const bool text_threshold = std::holds_alternative<std::string>(cond.threshold);
            if (attr.kind() == AttributeKind::Categorical) {
                if (!text_threshold) issues.push_back(cwhere + ": categorical attribute needs a text threshold");
                if (cond.op != Comparator::Equal && cond.op != Comparator::NotEqual)
                    issues.push_back(cwhere + ": categorical attribute only supports == and !=");
            } else {
                if (text_threshold) {
                    issues.push_back(cwhere + ": numeric attribute needs a numeric threshold");
                } else {
                    const double v = std::get<double>(cond.threshold);
                    if (v < attr.lo || v > attr.hi)
                        issues.push_back(cwhere + ": threshold outside [" + std::to_string(attr.lo) + ", " +
                                         std::to_string(attr.hi) + "]");
                }
            }
        }
    }
    return issues;
}

namespace {

const Attribute* find(const AttributeMap& a, const AttributeMap& b, const std::string& name) {
    if (auto it = a.find(name); it != a.end()) return &it->second;
    if (auto it = b.find(name); it != b.end()) return &it->second;
    return nullptr;
}

template <typename T>
bool compare(const T& lhs, Comparator op, const T& rhs) {
    switch (op) {
    case Comparator::Less: return lhs < rhs;
    case Comparator::LessEqual: return lhs <= rhs;
    case Comparator::Greater: return lhs > rhs;
    case Comparator::GreaterEqual: return lhs >= rhs;
    case Comparator::Equal: return lhs == rhs;
    case Comparator::NotEqual: return lhs != rhs;
    }
    return false;
}

bool holds(const Condition& cond, const Attribute* attr) {
    if (attr == nullptr) return false;
    if (attr->kind() == AttributeKind::Categorical) {
        const auto* text = std::get_if<std::string>(&cond.threshold);
        return text != nullptr && compare(attr->text(), cond.op, *text);
    }
    const auto* number = std::get_if<double>(&cond.threshold);
    return number != nullptr && compare(attr->number(), cond.op, *number);
}

} // namespace

std::optional<Symptom> evaluate_policies(const AttributeMap& measurements, const AttributeMap& contextual,
                                         std::span<const PolicyRule> rules) {
    for (const auto& rule : rules) {
        const bool fires = std::all_of(rule.conditions.begin(), rule.conditions.end(), [&](const Condition& c) {
            return holds(c, find(measurements, contextual, c.attribute));
        });
        if (fires) return Symptom{rule.symptom, rule.suggested_solution, rule.name};
    }
    return std::nullopt;
}

double ManagerGoals::tolerance(const std::string& metric) const {
    auto it = tolerances.find(metric);
    return it == tolerances.end() ? 0.0 : it->second;
}

std::vector<std::string> ManagerGoals::issues() const {
    static const std::set<std::string> known{"preemption", "devolution", "blocking", "unbroken", "established"};
    std::vector<std::string> out;
    for (const auto& m : minimize) {
        if (!known.contains(m)) out.push_back("goals.minimize: unknown metric '" + m + "'");
        if (std::find(maximize.begin(), maximize.end(), m) != maximize.end())
            out.push_back("goals: metric '" + m + "' is both minimized and maximized");
    }
    for (const auto& m : maximize)
        if (!known.contains(m)) out.push_back("goals.maximize: unknown metric '" + m + "'");
    for (const auto& [m, tol] : tolerances)
        if (tol < 0.0 || tol > 1.0) out.push_back("goals.tolerances." + m + " must lie in [0, 1]");
    return out;
}

} // namespace bamcbr
