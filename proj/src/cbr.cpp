#include "bamcbr/cbr.hpp"

#include "bamcbr/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace bamcbr {

namespace {

constexpr const char* kSymptomAttribute = "symptom";

std::string class_suffix(std::size_t i) { return "_tc" + std::to_string(i); }

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

} // namespace

AttributeMap contextual_attributes(const LinkState& link, const ManagerGoals& goals) {
    AttributeMap ctx;
    ctx.emplace("active_model", Attribute::categorical(std::string(to_string(link.active_model))));
    const auto capacity = static_cast<double>(link.capacity);
    for (std::size_t i = 0; i < link.class_count(); ++i)
        ctx.emplace("bc" + class_suffix(i), Attribute::numeric(static_cast<double>(link.classes[i].bc), 0.0, capacity));
    for (const auto& [metric, tol] : goals.tolerances)
        ctx.emplace("tolerance_" + metric, Attribute::numeric(tol, 0.0, 1.0));
    return ctx;
}

AttributeMap measurement_attributes(const Measurements& m) {
    AttributeMap out;
    out.emplace("utilization", Attribute::numeric(clamp01(m.utilization), 0.0, 1.0));
    for (std::size_t i = 0; i < m.class_utilization.size(); ++i)
        out.emplace("utilization" + class_suffix(i), Attribute::numeric(clamp01(m.class_utilization[i]), 0.0, 1.0));
    out.emplace("preemption_rate", Attribute::numeric(m.rate(m.preemption), 0.0, 1.0));
    out.emplace("devolution_rate", Attribute::numeric(m.rate(m.devolution), 0.0, 1.0));
    out.emplace("blocking_rate", Attribute::numeric(m.rate(m.blocking), 0.0, 1.0));
    return out;
}

ProblemDescriptor make_problem(AttributeMap contextual, AttributeMap measurements, std::string symptom) {
    return {std::move(contextual), std::move(measurements), std::move(symptom)};
}

ProblemDescriptor descriptor_schema(std::span<const TrafficClassConfig> classes, const ManagerGoals& goals) {
    LinkState link;
    for (const auto& tc : classes) link.capacity += tc.bc;
    link.classes.assign(classes.begin(), classes.end());
    link.used_per_lender.assign(classes.size(), 0);
    Measurements m;
    m.class_utilization.assign(classes.size(), 0.0);
    return make_problem(contextual_attributes(link, goals), measurement_attributes(m), "none");
}

AttributeMap flatten(const ProblemDescriptor& problem) {
    AttributeMap all = problem.contextual;
    for (const auto& [name, attr] : problem.measurements)
        if (!all.emplace(name, attr).second) throw SchemaError("attribute '" + name + "' is both contextual and measured");
    if (!all.emplace(kSymptomAttribute, Attribute::categorical(problem.symptom)).second)
        throw SchemaError("attribute name 'symptom' is reserved");
    return all;
}

std::string_view to_string(SimilarityFunction f) {
    switch (f) {
    case SimilarityFunction::Linear: return "Linear";
    case SimilarityFunction::Ladder: return "Ladder";
    case SimilarityFunction::NearestNeighbor: return "NearestNeighbor";
    }
    return "NearestNeighbor";
}

SimilarityFunction parse_similarity_function(std::string_view text) {
    if (text == "Linear" || text == "linear") return SimilarityFunction::Linear;
    if (text == "Ladder" || text == "ladder") return SimilarityFunction::Ladder;
    if (text == "NearestNeighbor" || text == "nearest_neighbor" || text == "nn") return SimilarityFunction::NearestNeighbor;
    throw ConfigError("unknown similarity function '" + std::string(text) + "'");
}

std::vector<std::string> SimilarityConfig::issues() const {
    std::vector<std::string> out;
    double total = 0.0;
    for (const auto& [name, w] : weights) {
        if (!(w >= 0.0)) out.push_back("cbr.similarity.weights." + name + " must be non-negative");
        total += w;
    }
    if (!weights.empty() && total <= 0.0) out.push_back("cbr.similarity.weights must not all be zero");
    if (!(acceptance_threshold >= 0.0 && acceptance_threshold <= 1.0))
        out.push_back("cbr.similarity.threshold must lie in [0, 1]");
    for (const auto& [name, steps] : ladder_steps)
        if (!std::is_sorted(steps.begin(), steps.end()))
            out.push_back("cbr.similarity.ladder." + name + " boundaries must be ascending");
    return out;
}

void SimilarityConfig::normalize() {
    if (auto problems = issues(); !problems.empty()) throw ConfigError(std::move(problems));
    double total = 0.0;
    for (const auto& [name, w] : weights) total += w;
    if (total <= 0.0) throw ConfigError("cbr.similarity.weights must not all be zero");
    if (std::abs(total - 1.0) <= 1e-12) return;
    for (auto& [name, w] : weights) w /= total;
}

SimilarityConfig default_similarity_config(const ProblemDescriptor& schema) {
    SimilarityConfig cfg;
    for (const auto& [name, attr] : schema.contextual) cfg.weights[name] = name == "active_model" ? 1.0 : 0.0;
    for (const auto& [name, attr] : schema.measurements) {
        cfg.weights[name] = 1.0;
        cfg.ladder_steps[name] = name.starts_with("utilization") ? std::vector<double>{0.6, 0.9}
                                                                 : std::vector<double>{0.01, 0.1};
    }
    cfg.weights[kSymptomAttribute] = 1.0;
    cfg.normalize();
    return cfg;
}

namespace {

double linear_local(double a, double b, double lo, double hi) {
    const double range = hi - lo;
    if (range <= 0.0) return a == b ? 1.0 : 0.0;
    return clamp01(1.0 - std::abs(a - b) / range);
}

double ladder_local(double a, double b, const std::vector<double>& steps) {
    auto step_of = [&](double v) {
        return static_cast<double>(std::upper_bound(steps.begin(), steps.end(), v) - steps.begin());
    };
    const double count = static_cast<double>(steps.size() + 1);
    return clamp01(1.0 - std::abs(step_of(a) - step_of(b)) / count);
}

double local_similarity(const std::string& name, const Attribute& a, const Attribute& b,
                        const SimilarityConfig& cfg) {
    if (a.kind() == AttributeKind::Categorical) return a.text() == b.text() ? 1.0 : 0.0;
    if (cfg.function == SimilarityFunction::Ladder) {
        auto it = cfg.ladder_steps.find(name);
        if (it != cfg.ladder_steps.end() && !it->second.empty()) return ladder_local(a.number(), b.number(), it->second);
    }
    return linear_local(a.number(), b.number(), a.lo, a.hi);
}

} // namespace

double similarity(const ProblemDescriptor& a, const ProblemDescriptor& b, const SimilarityConfig& cfg) {
    const AttributeMap fa = flatten(a);
    const AttributeMap fb = flatten(b);
    if (fa.size() != fb.size()) throw SchemaError("descriptors have different attribute counts");

    double weighted = 0.0;
    double total = 0.0;
    auto ib = fb.begin();
    for (auto ia = fa.begin(); ia != fa.end(); ++ia, ++ib) {
        const auto& [name, attr_a] = *ia;
        const auto& [name_b, attr_b] = *ib;
        if (name != name_b) throw SchemaError("attribute '" + name + "' has no counterpart");
        if (attr_a.kind() != attr_b.kind()) throw SchemaError("attribute '" + name + "' differs in kind");
        if (attr_a.kind() == AttributeKind::Numeric && (attr_a.lo != attr_b.lo || attr_a.hi != attr_b.hi))
            throw SchemaError("attribute '" + name + "' differs in range");

        auto w = cfg.weights.find(name);
        const double weight = w == cfg.weights.end() ? 0.0 : w->second;
        if (weight <= 0.0) continue;
        weighted += weight * local_similarity(name, attr_a, attr_b, cfg);
        total += weight;
    }
    if (total <= 0.0) return 1.0;
    return clamp01(weighted / total);
}

std::string_view to_string(CaseStatus s) {
    switch (s) {
    case CaseStatus::Pending: return "Pending";
    case CaseStatus::Positive: return "Positive";
    case CaseStatus::Negative: return "Negative";
    }
    return "Pending";
}

CaseStatus parse_case_status(std::string_view text) {
    if (text == "Pending" || text == "pending") return CaseStatus::Pending;
    if (text == "Positive" || text == "positive") return CaseStatus::Positive;
    if (text == "Negative" || text == "negative") return CaseStatus::Negative;
    throw ConfigError("unknown case status '" + std::string(text) + "'");
}

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::Positive: return "Positive";
    case Verdict::Negative: return "Negative";
    case Verdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

bool CaseBase::contains(const ProblemDescriptor& problem, Model solution) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const Case& c) { return c.solution == solution && c.problem == problem; });
}

bool CaseBase::insert(Case c) {
    if (c.status != kind_)
        throw std::invalid_argument(std::string("cannot store a ") + std::string(to_string(c.status)) +
                                    " case in the " + std::string(to_string(kind_)) + " base");
    if (contains(c.problem, c.solution)) return false;
    entries_.push_back(std::move(c));
    return true;
}

std::vector<ScoredCase> retrieve(const ProblemDescriptor& problem, const CaseBase& positive,
                                 const SimilarityConfig& cfg, std::size_t k) {
    std::vector<ScoredCase> hits;
    for (const auto& c : positive.entries()) {
        const double score = similarity(problem, c.problem, cfg);
        if (score >= cfg.acceptance_threshold) hits.push_back({c, score});
    }
    std::stable_sort(hits.begin(), hits.end(), [](const ScoredCase& a, const ScoredCase& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.match.created_at != b.match.created_at) return a.match.created_at < b.match.created_at;
        return a.match.id < b.match.id;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

namespace {

Model active_model_of(const ProblemDescriptor& problem) {
    auto it = problem.contextual.find("active_model");
    if (it == problem.contextual.end() || it->second.kind() != AttributeKind::Categorical)
        throw SchemaError("problem descriptor lacks the active_model attribute");
    return parse_model(it->second.text());
}

} // namespace

std::vector<Model> arbitrary_candidates(const ProblemDescriptor& problem, const CaseBase& negative,
                                        const SimilarityConfig& cfg) {
    const Model active = active_model_of(problem);
    std::vector<Model> alternatives;
    for (Model m : kPresetModels)
        if (m != active) alternatives.push_back(m);

    std::vector<Model> allowed;
    for (Model m : alternatives) {
        const bool rejected = std::any_of(negative.entries().begin(), negative.entries().end(), [&](const Case& c) {
            return c.solution == m && similarity(problem, c.problem, cfg) >= cfg.acceptance_threshold;
        });
        if (!rejected) allowed.push_back(m);
    }
    return allowed.empty() ? alternatives : allowed;
}

Model arbitrary_solution(const ProblemDescriptor& problem, const CaseBase& negative, const SimilarityConfig& cfg,
                         Rng& rng, std::optional<Model> hint, double hint_weight) {
    const auto candidates = arbitrary_candidates(problem, negative, cfg);
    std::vector<double> weights;
    weights.reserve(candidates.size());
    for (Model m : candidates) weights.push_back(hint && *hint == m ? hint_weight : 1.0);
    return candidates[weighted_index(rng, weights)];
}

std::uint64_t problem_fingerprint(const ProblemDescriptor& problem) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](const void* data, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ull;
        }
    };
    for (const auto& [name, attr] : flatten(problem)) {
        mix(name.data(), name.size() + 1);
        if (attr.kind() == AttributeKind::Categorical) {
            mix(attr.text().data(), attr.text().size() + 1);
        } else {
            const auto bits = std::bit_cast<std::uint64_t>(attr.number());
            mix(&bits, sizeof bits);
        }
    }
    return h;
}

Case adapt(Model solution, const ProblemDescriptor& problem, const Measurements& before, double now) {
    Case c;
    c.problem = problem;
    c.solution = solution;
    c.status = CaseStatus::Pending;
    c.created_at = now;
    c.metrics_before = before;
    return c;
}

Case adapt(const Case& retrieved, const ProblemDescriptor& problem, const Measurements& before, double now) {
    return adapt(retrieved.solution, problem, before, now);
}

bool validate_against_rejected(const Case& candidate, const CaseBase& negative, const SimilarityConfig& cfg) {
    return std::none_of(negative.entries().begin(), negative.entries().end(), [&](const Case& c) {
        return c.solution == candidate.solution &&
               similarity(candidate.problem, c.problem, cfg) >= cfg.acceptance_threshold;
    });
}

std::vector<double> ProfileGuard::offered_load(const Measurements& m) const {
    std::vector<double> load(m.class_arrivals.size(), 0.0);
    if (m.duration <= 0.0) return load;
    for (std::size_t c = 0; c < load.size(); ++c)
        load[c] = static_cast<double>(m.class_arrivals[c]) * mean_demand * mean_holding / m.duration;
    return load;
}

bool ProfileGuard::trips(const Measurements& before, const Measurements& after) const {
    const auto a = offered_load(before);
    const auto b = offered_load(after);
    if (a.size() != b.size()) return true;
    for (std::size_t c = 0; c < a.size(); ++c)
        if (std::abs(b[c] - a[c]) > tolerance * capacity) return true;
    return false;
}

Verdict revise(const Case& pending, const Measurements& after, const ManagerGoals& goals, const ProfileGuard& guard) {
    if (!pending.metrics_before) throw std::invalid_argument("pending case has no before-snapshot");
    const Measurements& before = *pending.metrics_before;
    if (guard.trips(before, after)) return Verdict::Inconclusive;

    // Minimized counts are taken per window arrival, maximized counts per second.
    auto per_second = [](const Measurements& m, const std::string& metric) {
        return m.duration > 0.0 ? static_cast<double>(m.metric(metric)) / m.duration : 0.0;
    };
    double min_before = 0.0, min_after = 0.0, max_before = 0.0, max_after = 0.0;
    for (const auto& metric : goals.maximize) {
        const double b = per_second(before, metric);
        const double a = per_second(after, metric);
        if (a < b * (1.0 - goals.tolerance(metric))) return Verdict::Negative;
        max_before += b;
        max_after += a;
    }
    double band = 0.0;
    for (const auto& metric : goals.minimize) {
        min_before += before.rate(before.metric(metric));
        min_after += after.rate(after.metric(metric));
        band += goals.tolerance(metric);
    }
    if (min_after < min_before - band) return Verdict::Positive;
    if (min_after <= min_before + band && max_after > max_before) return Verdict::Positive;
    return Verdict::Negative;
}

bool retain(Case c, Verdict verdict, CaseBase& positive, CaseBase& negative) {
    switch (verdict) {
    case Verdict::Positive:
        c.status = CaseStatus::Positive;
        return positive.insert(std::move(c));
    case Verdict::Negative:
        c.status = CaseStatus::Negative;
        return negative.insert(std::move(c));
    case Verdict::Inconclusive: break;
    }
    throw std::invalid_argument("inconclusive cases are not retained");
}

std::string_view to_string(Trigger t) { return t == Trigger::Reactive ? "reactive" : "proactive"; }

std::string_view to_string(PolicySolutionMode m) {
    switch (m) {
    case PolicySolutionMode::Hint: return "hint";
    case PolicySolutionMode::Seed: return "seed";
    case PolicySolutionMode::Off: return "off";
    }
    return "hint";
}

PolicySolutionMode parse_policy_solution_mode(std::string_view text) {
    if (text == "hint") return PolicySolutionMode::Hint;
    if (text == "seed") return PolicySolutionMode::Seed;
    if (text == "off") return PolicySolutionMode::Off;
    throw ConfigError("policy_solutions must be hint, seed or off (got '" + std::string(text) + "')");
}

std::string_view to_string(ProposalSource s) {
    switch (s) {
    case ProposalSource::Retrieved: return "retrieved";
    case ProposalSource::Arbitrary: return "arbitrary";
    case ProposalSource::PolicySeed: return "policy-seed";
    case ProposalSource::Manager: return "manager";
    }
    return "arbitrary";
}

CbrEngine::CbrEngine(CbrSettings settings, std::vector<PolicyRule> rules, std::uint64_t seed)
    : settings_(std::move(settings)), rules_(std::move(rules)), seed_(seed) {
    if (settings_.retrieve_k == 0) throw ConfigError("cbr.k must be at least 1");
}

bool CbrEngine::try_apply(Case candidate, LinkState& link, double now) {
    if (!validate_against_rejected(candidate, negative_, settings_.similarity)) {
        stats_.invalid += 1;
        return false;
    }
    reconfigure_model(link, candidate.solution, now);
    pending_ = std::move(candidate);
    pending_since_ = now;
    return true;
}

CycleOutcome CbrEngine::run_cycle(Trigger trigger, LinkState& link, const Measurements& current, double now) {
    CycleOutcome out;
    out.trigger = trigger;
    if (pending_) {
        out.result = CycleOutcome::Result::Suppressed;
        out.note = "revision in flight";
        return out;
    }
    stats_.cycles += 1;

    AttributeMap context = contextual_attributes(link, settings_.goals);
    AttributeMap measured = measurement_attributes(current);
    const auto symptom = evaluate_policies(measured, context, rules_);
    if (!symptom) {
        stats_.no_action += 1;
        out.note = "compliant";
        return out;
    }
    out.symptom = symptom->tag;
    const ProblemDescriptor problem = make_problem(std::move(context), std::move(measured), symptom->tag);
    const Model active = link.active_model;

    auto applied = [&](Model m, ProposalSource source) {
        out.result = CycleOutcome::Result::Applied;
        out.solution = m;
        out.source = source;
        return out;
    };

    if (manager_proposal_) {
        const Model proposed = *manager_proposal_;
        manager_proposal_.reset();
        if (proposed != active && try_apply(adapt(proposed, problem, current, now), link, now))
            return applied(proposed, ProposalSource::Manager);
        out.discarded += 1;
    }

    for (const auto& hit : retrieve(problem, positive_, settings_.similarity, settings_.retrieve_k)) {
        if (hit.match.solution == active) continue;
        if (try_apply(adapt(hit.match, problem, current, now), link, now)) {
            stats_.hits += 1;
            out.score = hit.score;
            return applied(hit.match.solution, ProposalSource::Retrieved);
        }
        out.discarded += 1;
    }

    const auto suggestion = symptom->suggestion;
    if (settings_.policy_solutions == PolicySolutionMode::Seed && suggestion && *suggestion != active) {
        if (try_apply(adapt(*suggestion, problem, current, now), link, now))
            return applied(*suggestion, ProposalSource::PolicySeed);
        out.discarded += 1;
    }

    const auto hint = settings_.policy_solutions == PolicySolutionMode::Hint ? suggestion : std::nullopt;
    Rng rng(derive_seed(seed_, problem_fingerprint(problem)));
    const Model chosen = arbitrary_solution(problem, negative_, settings_.similarity, rng, hint, settings_.hint_weight);
    if (try_apply(adapt(chosen, problem, current, now), link, now)) {
        stats_.misses += 1;
        return applied(chosen, ProposalSource::Arbitrary);
    }
    out.discarded += 1;
    stats_.no_action += 1;
    out.note = "every alternative was rejected before";
    return out;
}

RevisionOutcome CbrEngine::complete_revision(const Measurements& after, const ProfileGuard& guard) {
    if (!pending_) throw std::logic_error("no pending case to revise");
    RevisionOutcome out;
    out.revised = std::move(*pending_);
    pending_.reset();
    out.verdict = revise(out.revised, after, settings_.goals, guard);
    out.revised.metrics_after = after;
    switch (out.verdict) {
    case Verdict::Inconclusive: stats_.inconclusive += 1; return out;
    case Verdict::Positive: stats_.positive += 1; break;
    case Verdict::Negative: stats_.negative += 1; break;
    }
    out.revised.id = next_case_id_;
    out.retained = retain(out.revised, out.verdict, positive_, negative_);
    if (out.retained) {
        next_case_id_ += 1;
        stats_.retained += 1;
        out.revised.status = out.verdict == Verdict::Positive ? CaseStatus::Positive : CaseStatus::Negative;
    }
    return out;
}

} // namespace bamcbr
