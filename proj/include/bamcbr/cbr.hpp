#pragma once

// Case-based reasoning over BAM configurations: the retrieve / reuse / revise /
// retain cycle that decides which sharing model a link should run.

#include "bamcbr/attributes.hpp"
#include "bamcbr/bam.hpp"
#include "bamcbr/measurements.hpp"
#include "bamcbr/policy.hpp"
#include "bamcbr/rng.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bamcbr {

// ---------------------------------------------------------------- descriptors

/// The "current problem": configuration context, window measurements and the symptom that raised it.
struct ProblemDescriptor {
    AttributeMap contextual;
    AttributeMap measurements;
    std::string symptom;

    bool operator==(const ProblemDescriptor&) const = default;
};

/// active_model, bc_tc<i> and tolerance_<metric> attributes.
AttributeMap contextual_attributes(const LinkState& link, const ManagerGoals& goals);

/// utilization, utilization_tc<i> and {preemption,devolution,blocking}_rate, all on [0, 1].
AttributeMap measurement_attributes(const Measurements& m);

ProblemDescriptor make_problem(AttributeMap contextual, AttributeMap measurements, std::string symptom);

/// A descriptor with representative values; used to validate rules and weights.
ProblemDescriptor descriptor_schema(std::span<const TrafficClassConfig> classes, const ManagerGoals& goals);

/// Every (name, attribute) pair of a descriptor, symptom included as a categorical attribute.
AttributeMap flatten(const ProblemDescriptor& problem);

// ----------------------------------------------------------------- similarity

enum class SimilarityFunction { Linear, Ladder, NearestNeighbor };

std::string_view to_string(SimilarityFunction f);
SimilarityFunction parse_similarity_function(std::string_view text);

struct SimilarityConfig {
    SimilarityFunction function = SimilarityFunction::NearestNeighbor;
    std::map<std::string, double> weights; ///< missing attributes weigh 0
    double acceptance_threshold = 0.8;
    std::map<std::string, std::vector<double>> ladder_steps; ///< ascending step boundaries per numeric attribute

    /// Scales weights to sum to 1. Throws ConfigError if they are negative or all zero.
    void normalize();
    std::vector<std::string> issues() const;

    bool operator==(const SimilarityConfig&) const = default;
};

/// Equal weights over the attributes that vary at run time (model, symptom and
/// every measurement); the deployment constants (BCs, tolerances) weigh 0.
SimilarityConfig default_similarity_config(const ProblemDescriptor& schema);

/// Weighted mean of per-attribute similarities. Categorical: 1 if equal else 0.
/// Linear and NearestNeighbor: 1 - |a-b|/range. Ladder: 1 - step distance / step count,
/// falling back to Linear for attributes without declared steps.
/// Throws SchemaError when the two descriptors do not share attribute names, kinds and ranges.
double similarity(const ProblemDescriptor& a, const ProblemDescriptor& b, const SimilarityConfig& cfg);

// ---------------------------------------------------------------------- cases

enum class CaseStatus { Pending, Positive, Negative };
enum class Verdict { Positive, Negative, Inconclusive };

std::string_view to_string(CaseStatus s);
CaseStatus parse_case_status(std::string_view text);
std::string_view to_string(Verdict v);

struct Case {
    std::uint64_t id = 0;
    ProblemDescriptor problem;
    Model solution = Model::MAM;
    CaseStatus status = CaseStatus::Pending;
    double created_at = 0.0;
    std::optional<Measurements> metrics_before;
    std::optional<Measurements> metrics_after;

    bool operator==(const Case&) const = default;
};

class CaseBase {
public:
    explicit CaseBase(CaseStatus kind = CaseStatus::Positive) : kind_(kind) {}

    CaseStatus kind() const noexcept { return kind_; }
    const std::vector<Case>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    bool contains(const ProblemDescriptor& problem, Model solution) const;
    /// False (and no change) for an exact (problem, solution) duplicate.
    /// Throws std::invalid_argument if the case status does not match the base.
    bool insert(Case c);

    bool operator==(const CaseBase&) const = default;

private:
    CaseStatus kind_;
    std::vector<Case> entries_;
};

struct ScoredCase {
    Case match;
    double score = 0.0;
};

/// Top-k cases at or above the acceptance threshold, best first; older cases win ties.
std::vector<ScoredCase> retrieve(const ProblemDescriptor& problem, const CaseBase& positive,
                                 const SimilarityConfig& cfg, std::size_t k);

/// Models other than the active one that no similar negative case rules out.
/// Falls back to every non-active model when the exclusion leaves nothing.
std::vector<Model> arbitrary_candidates(const ProblemDescriptor& problem, const CaseBase& negative,
                                        const SimilarityConfig& cfg);

/// Random draw from arbitrary_candidates. A hinted candidate weighs `hint_weight`, others 1.
Model arbitrary_solution(const ProblemDescriptor& problem, const CaseBase& negative, const SimilarityConfig& cfg,
                         Rng& rng, std::optional<Model> hint = std::nullopt, double hint_weight = 1.0);

/// Stable 64-bit digest of every attribute name and value bit pattern.
std::uint64_t problem_fingerprint(const ProblemDescriptor& problem);

/// Binds a solution to the current problem as a new pending case.
Case adapt(Model solution, const ProblemDescriptor& problem, const Measurements& before, double now);
Case adapt(const Case& retrieved, const ProblemDescriptor& problem, const Measurements& before, double now);

/// False when a negative case with the same solution is at least threshold-similar.
bool validate_against_rejected(const Case& candidate, const CaseBase& negative, const SimilarityConfig& cfg);

/// Trips when a class's estimated offered load moved by more than `tolerance`
/// of link capacity between two windows. Offered load is estimated as
/// arrivals x mean demand x mean holding time / window length.
struct ProfileGuard {
    double tolerance = 0.20;
    double mean_demand = 0.0;
    double mean_holding = 0.0;
    double capacity = 0.0;

    std::vector<double> offered_load(const Measurements& m) const;
    bool trips(const Measurements& before, const Measurements& after) const;
};

/// Minimized metrics are compared per window arrival and maximized metrics per
/// second of window. Inconclusive if the guard
/// trips. Otherwise Negative if any maximized metric dropped by more than its
/// tolerance; Positive if the summed minimized metrics fell by more than their
/// tolerance band, or stayed inside it with the summed maximized metrics rising;
/// Negative otherwise.
/// Throws std::invalid_argument when the pending case has no before-snapshot.
Verdict revise(const Case& pending, const Measurements& after, const ManagerGoals& goals, const ProfileGuard& guard);

/// Finalizes the status and stores the case in the matching base. Returns
/// whether a new entry was added. Throws std::invalid_argument on Inconclusive.
bool retain(Case c, Verdict verdict, CaseBase& positive, CaseBase& negative);

// --------------------------------------------------------------------- engine

enum class Trigger { Reactive, Proactive };
enum class PolicySolutionMode { Hint, Seed, Off };
enum class ProposalSource { Retrieved, Arbitrary, PolicySeed, Manager };

std::string_view to_string(Trigger t);
std::string_view to_string(PolicySolutionMode m);
PolicySolutionMode parse_policy_solution_mode(std::string_view text);
std::string_view to_string(ProposalSource s);

struct CbrSettings {
    SimilarityConfig similarity;
    ManagerGoals goals;
    std::size_t retrieve_k = 3;
    double hint_weight = 2.0;
    PolicySolutionMode policy_solutions = PolicySolutionMode::Hint;

    bool operator==(const CbrSettings&) const = default;
};

struct CycleOutcome {
    enum class Result { NoAction, Applied, Suppressed };

    Trigger trigger = Trigger::Reactive;
    Result result = Result::NoAction;
    std::optional<Model> solution;
    std::optional<ProposalSource> source;
    std::string symptom;
    double score = 0.0;   ///< similarity of the retrieved case, when retrieved
    int discarded = 0;    ///< candidates rejected by the negative base
    std::string note;
};

struct RevisionOutcome {
    Verdict verdict = Verdict::Inconclusive;
    bool retained = false;
    Case revised;
};

struct EngineStats {
    std::int64_t cycles = 0;
    std::int64_t no_action = 0;
    std::int64_t hits = 0;   ///< proposals from the positive base
    std::int64_t misses = 0; ///< arbitrary proposals
    std::int64_t invalid = 0;
    std::int64_t positive = 0;
    std::int64_t negative = 0;
    std::int64_t inconclusive = 0;
    std::int64_t retained = 0;

    bool operator==(const EngineStats&) const = default;
};

/// One link's reasoner. Holds both case bases and at most one pending case.
/// Arbitrary proposals draw from a stream keyed on the seed and the problem, so
/// a replayed problem meets the same proposal while the bases are unchanged.
class CbrEngine {
public:
    CbrEngine(CbrSettings settings, std::vector<PolicyRule> rules, std::uint64_t seed);

    /// Evaluation-and-proposal plus adaptation-and-use. Applies the chosen model
    /// to `link` and leaves the new case pending until complete_revision.
    CycleOutcome run_cycle(Trigger trigger, LinkState& link, const Measurements& current, double now);

    /// Test-and-review plus storage-and-learning for the pending case.
    /// Throws std::logic_error when nothing is pending.
    RevisionOutcome complete_revision(const Measurements& after, const ProfileGuard& guard);

    /// Manager-proposed solution used by the next cycle instead of retrieval.
    void inject_solution(Model model) { manager_proposal_ = model; }

    bool has_pending() const noexcept { return pending_.has_value(); }
    const std::optional<Case>& pending() const noexcept { return pending_; }
    double pending_since() const noexcept { return pending_since_; }

    const CaseBase& positive() const noexcept { return positive_; }
    const CaseBase& negative() const noexcept { return negative_; }
    CaseBase& positive() noexcept { return positive_; }
    CaseBase& negative() noexcept { return negative_; }
    const EngineStats& stats() const noexcept { return stats_; }
    const CbrSettings& settings() const noexcept { return settings_; }
    std::span<const PolicyRule> rules() const noexcept { return rules_; }

private:
    bool try_apply(Case candidate, LinkState& link, double now);

    CbrSettings settings_;
    std::vector<PolicyRule> rules_;
    std::uint64_t seed_;
    CaseBase positive_{CaseStatus::Positive};
    CaseBase negative_{CaseStatus::Negative};
    std::optional<Case> pending_;
    double pending_since_ = 0.0;
    std::optional<Model> manager_proposal_;
    std::uint64_t next_case_id_ = 1;
    EngineStats stats_;
};

} // namespace bamcbr
