#include "bamcbr/simulation.hpp"

#include "bamcbr/errors.hpp"
#include "bamcbr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace bamcbr {

std::string_view to_string(ControlKind k) {
    switch (k) {
    case ControlKind::Cycle: return "cycle";
    case ControlKind::Revision: return "revision";
    case ControlKind::Suppressed: return "suppressed";
    }
    return "cycle";
}

namespace {

constexpr double kTimeEps = 1e-9;

std::string_view result_name(CycleOutcome::Result r) {
    switch (r) {
    case CycleOutcome::Result::NoAction: return "NoAction";
    case CycleOutcome::Result::Applied: return "Applied";
    case CycleOutcome::Result::Suppressed: return "Suppressed";
    }
    return "NoAction";
}

} // namespace

Simulation::Simulation(ScenarioConfig cfg) : cfg_(std::move(cfg)) {
    validate_scenario(cfg_);
    link_ = make_link(cfg_.capacity, cfg_.classes, cfg_.mode.model);
    if (cfg_.mode.kind == RunKind::Cognitive)
        engine_.emplace(cfg_.cbr, cfg_.policies, derive_seed(cfg_.seed, 0xCB2));
    guard_ = ProfileGuard{cfg_.guard_tolerance, cfg_.demand.mean_size(), cfg_.demand.mean_holding,
                          static_cast<double>(cfg_.capacity)};

    // Arrivals are drawn relative to their pattern start and placed on an integer
    // clock, so a replayed repetition reproduces its windows bit for bit.
    const double rep_length = cfg_.repetition_length();
    for (int r = 0; r < cfg_.repetitions; ++r) {
        Ticks start = ticks(r * rep_length);
        for (std::size_t p = 0; p < cfg_.patterns.size(); ++p) {
            const auto seed = derive_seed(cfg_.seed, p, cfg_.replay_repetitions ? 0 : static_cast<std::uint64_t>(r) + 1);
            for (Arrival a : generate_arrivals(cfg_.patterns[p], cfg_.classes, cfg_.levels, cfg_.demand, cfg_.capacity,
                                               seed, 0.0)) {
                const Ticks at = start + ticks(a.time);
                a.time = seconds(at);
                arrivals_.push_back(a);
                arrival_ticks_.push_back(at);
                holding_ticks_.push_back(std::max<Ticks>(1, ticks(a.holding_time)));
            }
            start += ticks(cfg_.patterns[p].duration);
        }
    }

    report_.label = cfg_.run_label();
    report_.seed = cfg_.seed;
    report_.schedule_hash = schedule_hash(cfg_);
    report_.config_hash = config_hash(cfg_);
    report_.mode = cfg_.mode;
    report_.repetitions = cfg_.repetitions;
    report_.repetition_length = rep_length;
    for (const auto& tc : cfg_.classes) report_.class_names.push_back(tc.name);
    report_.totals = MetricCounters(cfg_.classes.size());
    report_.cases.retained_per_repetition.assign(static_cast<std::size_t>(cfg_.repetitions), 0);

    lender_area_.assign(cfg_.classes.size(), 0);
    window_base_ = MetricCounters(cfg_.classes.size());
    repetition_base_ = MetricCounters(cfg_.classes.size());
}

Simulation::Ticks Simulation::ticks(double s) { return static_cast<Ticks>(std::llround(s * 1e6)); }

int Simulation::repetition_at(double t) const {
    const double len = cfg_.repetition_length();
    if (len <= 0.0) return 0;
    const int r = static_cast<int>(std::floor(t / len + kTimeEps));
    return std::clamp(r, 0, cfg_.repetitions - 1);
}

std::string Simulation::pattern_at(double t) const {
    const double len = cfg_.repetition_length();
    double offset = t - repetition_at(t) * len;
    for (const auto& p : cfg_.patterns) {
        if (offset < p.duration - kTimeEps) return p.name;
        offset -= p.duration;
    }
    return cfg_.patterns.empty() ? std::string() : cfg_.patterns.back().name;
}

void Simulation::advance_to(Ticks t) {
    const Ticks dt = t - clock_;
    if (dt > 0) {
        used_area_ += link_.total_used() * dt;
        for (std::size_t l = 0; l < lender_area_.size(); ++l) lender_area_[l] += link_.used_per_lender[l] * dt;
        clock_ = t;
    }
    // Repetition boundaries: everything before the boundary belongs to the earlier repetition.
    const double len = cfg_.repetition_length();
    while (current_repetition_ < cfg_.repetitions - 1 && t >= ticks((current_repetition_ + 1) * len)) {
        report_.repetition_counters.push_back(link_.counters - repetition_base_);
        repetition_base_ = link_.counters;
        ++current_repetition_;
    }
}

void Simulation::drain_link_events() {
    for (auto& e : link_.events) {
        if (cfg_.events == EventDetail::Full || e.kind == LinkEventKind::Reconfigure || e.kind == LinkEventKind::Warning)
            report_.events.push_back(std::move(e));
    }
    link_.events.clear();
}

void Simulation::record_cycle(const CycleOutcome& out, double t) {
    ControlRecord rec;
    rec.time = t;
    rec.repetition = repetition_at(t);
    rec.kind = ControlKind::Cycle;
    rec.trigger = out.trigger;
    rec.result = std::string(result_name(out.result));
    rec.solution = out.solution;
    rec.source = out.source ? std::string(to_string(*out.source)) : std::string();
    rec.symptom = out.symptom;
    rec.score = out.score;
    rec.note = out.note;
    const std::string source = rec.source;
    report_.control.push_back(std::move(rec));

    if (out.result == CycleOutcome::Result::Applied && out.solution) {
        const int r = repetition_at(t);
        report_.timeline.push_back({t, r, t - r * cfg_.repetition_length(), *out.solution, source});
    }
}

void Simulation::fire_trigger(Trigger trigger, const Measurements& m, double t) {
    auto& triggers = report_.triggers;
    if (engine_->has_pending()) {
        (trigger == Trigger::Reactive ? triggers.reactive_suppressed : triggers.proactive_suppressed) += 1;
        ControlRecord rec;
        rec.time = t;
        rec.repetition = repetition_at(t);
        rec.kind = ControlKind::Suppressed;
        rec.trigger = trigger;
        rec.result = "Suppressed";
        rec.note = "revision in flight";
        report_.control.push_back(std::move(rec));
        return;
    }
    (trigger == Trigger::Reactive ? triggers.reactive_fired : triggers.proactive_fired) += 1;
    record_cycle(engine_->run_cycle(trigger, link_, m, t), t);
}

void Simulation::close_window(Ticks close) {
    const double t = seconds(close);
    const Ticks span = close - window_start_;
    const double duration = seconds(span);
    MetricCounters counters = link_.counters - window_base_;
    counters.window_id = static_cast<std::int64_t>(report_.windows.size());
    Measurements m = snapshot_measurements(link_, counters);
    m.duration = duration;
    if (span > 0) {
        m.utilization = static_cast<double>(used_area_) / (static_cast<double>(link_.capacity) * static_cast<double>(span));
        for (std::size_t l = 0; l < lender_area_.size(); ++l)
            m.class_utilization[l] = static_cast<double>(lender_area_[l]) /
                                     (static_cast<double>(link_.classes[l].bc) * static_cast<double>(span));
    }

    WindowRecord w;
    w.index = counters.window_id;
    w.repetition = repetition_at(seconds(window_start_));
    w.pattern = pattern_at(seconds(window_start_));
    w.start = seconds(window_start_);
    w.end = t;
    w.model = link_.active_model;
    w.counters = counters;
    w.measurements = m;

    window_start_ = close;
    used_area_ = 0;
    std::fill(lender_area_.begin(), lender_area_.end(), 0);
    window_base_ = link_.counters;
    last_window_ = m;

    if (!engine_) {
        report_.windows.push_back(std::move(w));
        return;
    }

    const auto symptom = evaluate_policies(measurement_attributes(m), contextual_attributes(link_, cfg_.cbr.goals),
                                           engine_->rules());
    if (symptom) w.symptom = symptom->tag;
    report_.windows.push_back(std::move(w));

    if (engine_->has_pending() && t - engine_->pending_since() >= cfg_.revision_timer - kTimeEps) {
        const RevisionOutcome rev = engine_->complete_revision(m, guard_);
        ControlRecord rec;
        rec.time = t;
        rec.repetition = repetition_at(t);
        rec.kind = ControlKind::Revision;
        rec.result = std::string(to_string(rev.verdict));
        rec.solution = rev.revised.solution;
        rec.symptom = rev.revised.problem.symptom;
        rec.retained = rev.retained;
        if (rev.verdict == Verdict::Inconclusive) rec.note = "traffic profile changed; case discarded, solution kept";
        report_.control.push_back(std::move(rec));
        if (rev.retained) report_.cases.retained_per_repetition[static_cast<std::size_t>(repetition_at(t - duration))] += 1;
    }

    if (symptom) fire_trigger(Trigger::Reactive, m, t);
}

void Simulation::proactive_tick(Ticks t) {
    if (!engine_ || !last_window_) return;
    fire_trigger(Trigger::Proactive, *last_window_, seconds(t));
}

void Simulation::run() {
    if (ran_) return;
    ran_ = true;

    const Ticks end = ticks(cfg_.duration());
    if (end <= 0) {
        report_.repetition_counters.assign(static_cast<std::size_t>(cfg_.repetitions),
                                           MetricCounters(cfg_.classes.size()));
        return;
    }
    report_.timeline.push_back({0.0, 0, 0.0, link_.active_model, "initial"});

    std::priority_queue<Event, std::vector<Event>, Later> queue;
    std::uint64_t seq = 0;
    const Ticks window = ticks(cfg_.window_length);
    for (Ticks t = window;; t += window) {
        queue.push({std::min(t, end), seq++, EventKind::WindowClose, 0});
        if (t >= end) break;
    }
    if (engine_ && cfg_.proactive_interval > 0.0) {
        const Ticks interval = ticks(cfg_.proactive_interval);
        for (Ticks t = interval; t <= end; t += interval) queue.push({t, seq++, EventKind::ProactiveTick, 0});
    }
    for (std::size_t i = 0; i < arrivals_.size(); ++i) queue.push({arrival_ticks_[i], seq++, EventKind::Arrival, i});

    while (!queue.empty()) {
        const Event ev = queue.top();
        queue.pop();
        if (ev.time > end) break;
        const bool control = ev.kind == EventKind::WindowClose || ev.kind == EventKind::ProactiveTick;
        if (!control && ev.time >= end) continue;
        advance_to(ev.time);

        switch (ev.kind) {
        case EventKind::WindowClose: close_window(ev.time); break;
        case EventKind::ProactiveTick: proactive_tick(ev.time); break;
        case EventKind::Arrival: {
            const Arrival& a = arrivals_[ev.payload];
            const auto decision = admit_lsp(link_, {a.class_index, a.bandwidth, a.time, a.holding_time});
            if (decision.accepted())
                queue.push({ev.time + holding_ticks_[ev.payload], seq++, EventKind::Departure,
                            static_cast<std::size_t>(*decision.lsp_id)});
            break;
        }
        case EventKind::Departure: {
            const auto id = static_cast<LspId>(ev.payload);
            if (link_.active_lsps.contains(id)) release_lsp(link_, id, true, seconds(ev.time));
            break;
        }
        }
        drain_link_events();
    }
    advance_to(end);
    drain_link_events();

    while (static_cast<int>(report_.repetition_counters.size()) < cfg_.repetitions) {
        report_.repetition_counters.push_back(link_.counters - repetition_base_);
        repetition_base_ = link_.counters;
    }
    report_.totals = link_.counters;
    report_.active_at_end = static_cast<std::int64_t>(link_.active_lsps.size());
    if (engine_) {
        report_.cases.positive = static_cast<std::int64_t>(engine_->positive().size());
        report_.cases.negative = static_cast<std::int64_t>(engine_->negative().size());
        report_.cases.engine = engine_->stats();
    }
}

SimulationReport run_scenario(const ScenarioConfig& cfg) {
    Simulation sim(cfg);
    sim.run();
    return sim.report();
}

std::vector<RepetitionSummary> split_by_repetition(const SimulationReport& report) {
    std::vector<RepetitionSummary> out;
    for (int r = 0; r < report.repetitions; ++r) {
        RepetitionSummary s;
        s.repetition = r;
        if (static_cast<std::size_t>(r) < report.repetition_counters.size()) s.counters = report.repetition_counters[r];
        if (static_cast<std::size_t>(r) < report.cases.retained_per_repetition.size())
            s.retained = report.cases.retained_per_repetition[r];
        for (const auto& e : report.timeline)
            if (e.repetition == r && e.cause != "initial") s.timeline.push_back(e);
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace bamcbr
