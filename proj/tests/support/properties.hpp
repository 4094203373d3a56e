#pragma once

// Generated-input property checks shared by the unit suites and the acceptance
// binary. Each runner returns how many inputs it tried and the first failure.

#include "bamcbr/bam.hpp"
#include "bamcbr/cbr.hpp"
#include "bamcbr/errors.hpp"
#include "bamcbr/policy.hpp"
#include "bamcbr/report.hpp"
#include "bamcbr/rng.hpp"
#include "bamcbr/scenario.hpp"
#include "bamcbr/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace props {

using namespace bamcbr;

struct Result {
    int inputs = 0;
    int failures = 0;
    std::string first_failure;

    bool ok() const { return failures == 0; }
    void fail(const std::string& why) {
        if (failures++ == 0) first_failure = why;
    }
};

struct Gen {
    Rng rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(uniform_index(rng, static_cast<std::size_t>(hi - lo + 1)));
    }
    double real(double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }
    bool coin() { return integer(0, 1) == 1; }
    template <class T>
    const T& element(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(integer(0, std::ssize(v) - 1))];
    }
    Model preset() { return kPresetModels[static_cast<std::size_t>(integer(0, 2))]; }

    std::vector<TrafficClassConfig> classes(int n, Mbps lo, Mbps hi) {
        std::vector<int> prio(static_cast<std::size_t>(n));
        std::iota(prio.begin(), prio.end(), 0);
        for (int i = n - 1; i > 0; --i) std::swap(prio[i], prio[static_cast<std::size_t>(integer(0, i))]);
        std::vector<TrafficClassConfig> out;
        for (int i = 0; i < n; ++i) out.push_back({i, prio[i], integer(lo, hi), "TC" + std::to_string(i)});
        return out;
    }
};

inline Mbps capacity_of(const std::vector<TrafficClassConfig>& classes) {
    Mbps c = 0;
    for (const auto& tc : classes) c += tc.bc;
    return c;
}

/// Capacity safety, ledger consistency and victim direction over random
/// admission / release / reconfiguration sequences.
inline Result capacity_and_ledger(int inputs, std::uint64_t seed = 11) {
    Result r;
    for (int i = 0; i < inputs; ++i) {
        Gen g(derive_seed(seed, static_cast<std::uint64_t>(i)));
        const auto classes = g.classes(static_cast<int>(g.integer(2, 4)), 20, 400);
        LinkState link = make_link(capacity_of(classes), classes, g.preset());
        std::vector<LspId> live;
        const std::string tag = "sequence " + std::to_string(i);
        for (int step = 0; step < 150; ++step) {
            const auto roll = g.integer(0, 9);
            if (roll == 0) {
                reconfigure_model(link, g.preset());
            } else if (roll <= 3 && !link.active_lsps.empty()) {
                auto it = link.active_lsps.begin();
                std::advance(it, g.integer(0, std::ssize(link.active_lsps) - 1));
                release_lsp(link, it->first, g.coin());
            } else {
                const int cls = static_cast<int>(g.integer(0, std::ssize(classes) - 1));
                const Mbps bw = g.integer(1, 120);
                const auto d = admit_lsp(link, {cls, bw, 0.0, 1.0});
                for (const auto& v : d.victims) {
                    const int pv = classes[v.class_index].priority;
                    const int pr = classes[cls].priority;
                    if (v.kind == VictimKind::Preempted && !(pv < pr)) r.fail(tag + ": preempted victim not lower");
                    if (v.kind == VictimKind::Devolved && !(pv > pr)) r.fail(tag + ": devolved victim not higher");
                }
                if (d.accepted()) {
                    Mbps sum = 0;
                    for (std::size_t l = 0; l < d.breakdown.size(); ++l) {
                        sum += d.breakdown[l];
                        if (d.breakdown[l] > 0 && !link.matrix.allows(cls, static_cast<int>(l)))
                            r.fail(tag + ": breakdown uses a forbidden lender");
                    }
                    if (sum != bw) r.fail(tag + ": breakdown does not sum to the request");
                }
            }
            std::vector<Mbps> column(classes.size(), 0);
            for (const auto& [id, rec] : link.active_lsps)
                for (std::size_t l = 0; l < column.size(); ++l) column[l] += rec.breakdown[l];
            if (column != link.used_per_lender) r.fail(tag + ": ledger is not the column sum");
            Mbps total = 0;
            for (std::size_t l = 0; l < column.size(); ++l) {
                total += link.used_per_lender[l];
                if (link.used_per_lender[l] > classes[l].bc) r.fail(tag + ": BC exceeded");
                if (link.used_per_lender[l] < 0) r.fail(tag + ": negative occupancy");
            }
            if (total > link.capacity) r.fail(tag + ": capacity exceeded");
        }
        ++r.inputs;
    }
    return r;
}

/// A quick random scenario: 2-3 classes, short patterns, any mode.
inline ScenarioConfig random_scenario(Gen& g, std::uint64_t seed) {
    ScenarioConfig cfg = default_scenario();
    cfg.classes = g.classes(static_cast<int>(g.integer(2, 3)), 50, 300);
    cfg.capacity = capacity_of(cfg.classes);
    const std::vector<LoadLevel> levels{LoadLevel::Low, LoadLevel::Medium, LoadLevel::High};
    cfg.patterns.clear();
    const auto n = g.integer(1, 3);
    for (int p = 0; p < n; ++p) {
        TrafficPattern tp;
        tp.name = "p" + std::to_string(p);
        for (std::size_t c = 0; c < cfg.classes.size(); ++c) tp.levels.push_back(g.element(levels));
        tp.duration = static_cast<double>(g.integer(2, 6) * 30);
        tp.regime = g.coin() ? LoadRegime::AtLeastNinety : LoadRegime::UnderNinety;
        cfg.patterns.push_back(tp);
    }
    cfg.repetitions = static_cast<int>(g.integer(1, 3));
    cfg.window_length = static_cast<double>(g.integer(1, 4) * 15);
    cfg.revision_timer = cfg.window_length;
    cfg.proactive_interval = g.coin() ? 0.0 : cfg.window_length * static_cast<double>(g.integer(1, 3));
    cfg.demand.mean_holding = g.real(5.0, 40.0);
    cfg.seed = seed;
    cfg.cbr.similarity = default_similarity_config(descriptor_schema(cfg.classes, cfg.cbr.goals));
    cfg.mode = g.coin() ? RunMode{RunKind::Cognitive, Model::MAM} : RunMode{RunKind::Static, g.preset()};
    return cfg;
}

inline std::string conservation_issue(const SimulationReport& rep) {
    const auto& t = rep.totals;
    const auto victimized = t.total_preemption() + t.total_devolution();
    if (t.total_arrivals() != t.total_established() + t.total_blocking()) return "arrivals != accepted + blocked";
    if (t.total_established() != t.total_unbroken() + victimized + rep.active_at_end)
        return "accepted != completed + victimized + active";
    MetricCounters sum(t.classes());
    for (const auto& w : rep.windows) sum += w.counters;
    sum.window_id = t.window_id;
    if (sum != t) return "window series does not sum to the totals";
    MetricCounters reps(t.classes());
    for (const auto& c : rep.repetition_counters) reps += c;
    reps.window_id = t.window_id;
    if (reps != t) return "repetition counters do not sum to the totals";
    for (std::size_t i = 1; i < rep.windows.size(); ++i)
        if (rep.windows[i].start != rep.windows[i - 1].end) return "windows are not contiguous";
    return {};
}

/// Conservation of LSPs plus window/repetition series summing to the totals.
inline Result conservation(int inputs, std::uint64_t seed = 12) {
    Result r;
    for (int i = 0; i < inputs; ++i) {
        Gen g(derive_seed(seed, static_cast<std::uint64_t>(i)));
        const auto cfg = random_scenario(g, derive_seed(seed, 0xC0, static_cast<std::uint64_t>(i)));
        const auto rep = run_scenario(cfg);
        if (const auto why = conservation_issue(rep); !why.empty()) r.fail("scenario " + std::to_string(i) + ": " + why);
        if (cfg.mode.kind == RunKind::Static && rep.timeline.size() != 1)
            r.fail("scenario " + std::to_string(i) + ": static run reconfigured");
        ++r.inputs;
    }
    return r;
}

inline Measurements random_measurements(Gen& g, std::size_t classes) {
    Measurements m;
    m.duration = 600.0;
    m.arrivals = g.integer(0, 500);
    m.utilization = g.real(0.0, 1.0);
    for (std::size_t c = 0; c < classes; ++c) {
        m.class_utilization.push_back(g.real(0.0, 1.0));
        m.class_arrivals.push_back(m.arrivals / static_cast<std::int64_t>(classes));
    }
    auto part = [&] { return m.arrivals ? g.integer(0, m.arrivals) : 0; };
    m.blocking = part();
    m.preemption = part() / 4;
    m.devolution = part() / 4;
    m.unbroken = part();
    m.established = m.arrivals - m.blocking;
    return m;
}

inline ProblemDescriptor random_problem(Gen& g, const std::vector<TrafficClassConfig>& classes,
                                        const ManagerGoals& goals) {
    LinkState link = make_link(capacity_of(classes), classes, g.preset());
    const std::vector<std::string> symptoms{"", "mam_low_utilization", "rdm_high_utilization_high_preemption",
                                            "atcs_high_utilization_high_preemption"};
    return make_problem(contextual_attributes(link, goals), measurement_attributes(random_measurements(g, classes.size())),
                        g.element(symptoms));
}

inline SimilarityConfig random_similarity(Gen& g, const ProblemDescriptor& schema) {
    SimilarityConfig cfg;
    const std::vector<SimilarityFunction> fns{SimilarityFunction::Linear, SimilarityFunction::Ladder,
                                              SimilarityFunction::NearestNeighbor};
    cfg.function = g.element(fns);
    for (const auto& [name, attr] : flatten(schema)) {
        cfg.weights[name] = g.coin() ? g.real(0.0, 3.0) : 0.0;
        if (attr.kind() == AttributeKind::Numeric && g.coin()) {
            std::vector<double> steps;
            for (auto k = g.integer(1, 4); k > 0; --k) steps.push_back(g.real(attr.lo, attr.hi));
            std::sort(steps.begin(), steps.end());
            cfg.ladder_steps[name] = steps;
        }
    }
    cfg.weights["utilization"] += 0.5;
    cfg.acceptance_threshold = g.real(0.5, 0.95);
    cfg.normalize();
    return cfg;
}

/// Reflexive, symmetric and bounded over random descriptor pairs and configs.
inline Result similarity_laws(int inputs, std::uint64_t seed = 13) {
    Result r;
    const ManagerGoals goals;
    for (int i = 0; i < inputs; ++i) {
        Gen g(derive_seed(seed, static_cast<std::uint64_t>(i)));
        const auto classes = g.classes(3, 100, 400);
        const auto a = random_problem(g, classes, goals);
        const auto b = random_problem(g, classes, goals);
        const auto cfg = random_similarity(g, a);
        const double aa = similarity(a, a, cfg);
        const double ab = similarity(a, b, cfg);
        const double ba = similarity(b, a, cfg);
        const std::string tag = "pair " + std::to_string(i);
        if (std::abs(aa - 1.0) > 1e-12) r.fail(tag + ": similarity(p, p) = " + std::to_string(aa));
        if (std::abs(ab - ba) > 1e-12) r.fail(tag + ": not symmetric");
        if (!(ab >= 0.0 && ab <= 1.0)) r.fail(tag + ": out of [0, 1]");
        ++r.inputs;
    }
    return r;
}

/// A model retained Negative for a problem at or above the threshold is never
/// proposed for that problem while another model is still admissible, both at
/// the function level and through a full engine cycle.
inline Result negative_exclusion(int inputs, std::uint64_t seed = 14) {
    Result r;
    const ManagerGoals goals;
    for (int i = 0; i < inputs; ++i) {
        Gen g(derive_seed(seed, static_cast<std::uint64_t>(i)));
        const std::string tag = "input " + std::to_string(i);
        const auto classes = g.classes(3, 100, 400);
        LinkState link = make_link(capacity_of(classes), classes, g.preset());
        const Measurements current = random_measurements(g, classes.size());

        CbrSettings settings;
        settings.similarity = default_similarity_config(descriptor_schema(classes, goals));
        settings.policy_solutions = PolicySolutionMode::Off;
        // A rule that always fires, so every cycle must propose something.
        const std::vector<PolicyRule> rules{{"always", {{"utilization", Comparator::GreaterEqual, 0.0}}, "always", {}}};
        CbrEngine engine(settings, rules, derive_seed(seed, 0xE, static_cast<std::uint64_t>(i)));

        const auto problem = make_problem(contextual_attributes(link, goals), measurement_attributes(current), "always");

        // Some of the alternatives are rejected for this exact problem or a close variant.
        std::vector<Model> rejected;
        for (Model m : kPresetModels) {
            if (m == link.active_model || !g.coin()) continue;
            Case c = adapt(m, problem, current, 0.0);
            c.id = static_cast<std::uint64_t>(100 + rejected.size());
            c.status = CaseStatus::Negative;
            engine.negative().insert(c);
            rejected.push_back(m);
        }
        // Unrelated negatives for a dissimilar problem must not interfere.
        if (g.coin()) {
            ProblemDescriptor far = problem;
            far.symptom = "elsewhere";
            far.contextual["active_model"] = Attribute::categorical(link.active_model == Model::MAM ? "RDM" : "MAM");
            for (auto& [name, attr] : far.measurements)
                attr.value = attr.number() < 0.5 ? attr.hi : attr.lo;
            Case c = adapt(g.preset(), far, current, 0.0);
            c.id = 999;
            c.status = CaseStatus::Negative;
            engine.negative().insert(c);
        }
        const bool exhausted = rejected.size() == kPresetModels.size() - 1;

        const auto candidates = arbitrary_candidates(problem, engine.negative(), settings.similarity);
        for (Model m : candidates) {
            if (m == link.active_model) r.fail(tag + ": active model proposed");
            if (!exhausted && std::find(rejected.begin(), rejected.end(), m) != rejected.end())
                r.fail(tag + ": rejected model offered as candidate");
        }
        if (candidates.empty()) r.fail(tag + ": no candidates");

        const auto out = engine.run_cycle(Trigger::Reactive, link, current, 0.0);
        if (!exhausted && out.solution &&
            std::find(rejected.begin(), rejected.end(), *out.solution) != rejected.end())
            r.fail(tag + ": engine applied a rejected model");
        if (!exhausted && out.result != CycleOutcome::Result::Applied) r.fail(tag + ": engine did not act");
        ++r.inputs;
    }
    return r;
}

/// Identical seeds give byte-identical reports and identical case bases.
inline Result determinism(int inputs, std::uint64_t seed = 15) {
    Result r;
    for (int i = 0; i < inputs; ++i) {
        Gen g(derive_seed(seed, static_cast<std::uint64_t>(i)));
        const auto cfg = random_scenario(g, derive_seed(seed, 0xD0, static_cast<std::uint64_t>(i)));
        Simulation a(cfg), b(cfg);
        a.run();
        b.run();
        const std::string tag = "scenario " + std::to_string(i);
        if (emit_report(a.report()) != emit_report(b.report())) r.fail(tag + ": reports differ");
        if (a.engine().has_value() != b.engine().has_value()) r.fail(tag + ": engine presence differs");
        if (a.engine() && (a.engine()->positive() != b.engine()->positive() ||
                           a.engine()->negative() != b.engine()->negative()))
            r.fail(tag + ": case bases differ");
        ++r.inputs;
    }
    return r;
}

} // namespace props
