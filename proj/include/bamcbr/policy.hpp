#pragma once

// Manager policies: condition rules over descriptor attributes that turn a
// window of measurements into a symptom, plus the goals revision judges by.

#include "bamcbr/attributes.hpp"
#include "bamcbr/bam.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace bamcbr {

enum class Comparator { Less, LessEqual, Greater, GreaterEqual, Equal, NotEqual };

std::string_view to_string(Comparator op);
Comparator parse_comparator(std::string_view text);

struct Condition {
    std::string attribute;
    Comparator op = Comparator::Equal;
    std::variant<std::string, double> threshold;

    bool operator==(const Condition&) const = default;
};

struct PolicyRule {
    std::string name;
    std::vector<Condition> conditions;
    std::string symptom;
    std::optional<Model> suggested_solution;

    bool operator==(const PolicyRule&) const = default;
};

struct Symptom {
    std::string tag;
    std::optional<Model> suggestion;
    std::string rule;
};

/// "Low" and "high" levels of the default rule set. Rates are fractions of window arrivals.
struct PolicyThresholds {
    double utilization_low = 0.60;
    double utilization_high = 0.85;
    double blocking_high = 0.10;
    double preemption_high = 0.01;
    double devolution_high = 0.01;

    bool operator==(const PolicyThresholds&) const = default;
};

/// The five problem/solution rules, in listing order:
/// MAM+low util -> ATCS; RDM+low util+high blocking -> ATCS;
/// RDM+high util+high preemption -> MAM; ATCS+high util+low preemption+high devolution -> RDM;
/// ATCS+high util+high preemption -> MAM.
std::vector<PolicyRule> default_policy_set(const PolicyThresholds& thresholds = {});

/// Rule problems against a descriptor schema (unknown attributes, kind
/// mismatches, thresholds outside ranges). Empty when the rules are usable.
std::vector<std::string> policy_rule_issues(std::span<const PolicyRule> rules, const AttributeMap& schema);

/// First rule (declaration order) whose conditions all hold. std::nullopt means compliant.
/// An attribute missing from both maps makes the condition false.
std::optional<Symptom> evaluate_policies(const AttributeMap& measurements, const AttributeMap& contextual,
                                         std::span<const PolicyRule> rules);

struct ManagerGoals {
    std::vector<std::string> minimize{"preemption", "devolution"};
    std::vector<std::string> maximize{"unbroken"};
    /// Maximized metric: largest tolerated relative drop of its per-second rate.
    /// Minimized metric: change of its per-arrival rate still counted as a tie.
    std::map<std::string, double> tolerances{{"unbroken", 0.20}, {"preemption", 0.01}, {"devolution", 0.01}};

    double tolerance(const std::string& metric) const;
    std::vector<std::string> issues() const;

    bool operator==(const ManagerGoals&) const = default;
};

} // namespace bamcbr
