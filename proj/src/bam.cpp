#include "bamcbr/bam.hpp"

#include "bamcbr/errors.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>
#include <stdexcept>

namespace bamcbr {

std::string_view to_string(Model model) {
    switch (model) {
    case Model::MAM: return "MAM";
    case Model::RDM: return "RDM";
    case Model::ATCS: return "ATCS";
    case Model::Custom: return "custom";
    }
    return "custom";
}

Model parse_model(std::string_view text) {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "MAM") return Model::MAM;
    if (upper == "RDM") return Model::RDM;
    if (upper == "ATCS") return Model::ATCS;
    if (upper == "CUSTOM") return Model::Custom;
    throw ConfigError("unknown BAM model '" + std::string(text) + "'");
}

std::string_view to_string(LinkEventKind kind) {
    switch (kind) {
    case LinkEventKind::Admit: return "admit";
    case LinkEventKind::Block: return "block";
    case LinkEventKind::Preempt: return "preempt";
    case LinkEventKind::Devolve: return "devolve";
    case LinkEventKind::Release: return "release";
    case LinkEventKind::Reconfigure: return "reconfigure";
    case LinkEventKind::Warning: return "warning";
    }
    return "warning";
}

std::vector<std::string> class_config_issues(std::span<const TrafficClassConfig> classes, Mbps capacity) {
    std::vector<std::string> issues;
    if (capacity <= 0) issues.push_back("link.capacity must be positive");
    if (classes.empty()) {
        issues.push_back("classes must not be empty");
        return issues;
    }
    Mbps sum = 0;
    std::set<int> priorities;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const auto& tc = classes[i];
        const std::string where = "classes[" + std::to_string(i) + "]";
        if (tc.index != static_cast<int>(i))
            issues.push_back(where + ".index must be " + std::to_string(i) + " (contiguous from 0)");
        if (tc.bc <= 0) issues.push_back(where + ".bc must be positive");
        if (!priorities.insert(tc.priority).second)
            issues.push_back(where + ".priority duplicates another class");
        sum += tc.bc;
    }
    if (capacity > 0 && sum != capacity)
        issues.push_back("sum of classes[].bc (" + std::to_string(sum) + ") must equal link.capacity (" +
                         std::to_string(capacity) + ")");
    return issues;
}

SharingMatrix::SharingMatrix(std::size_t n) : n_(n), allow_(n * n, 0) {
    for (std::size_t i = 0; i < n; ++i) allow_[i * n + i] = 1;
}

bool SharingMatrix::allows(int borrower, int lender) const {
    return allow_.at(static_cast<std::size_t>(borrower) * n_ + static_cast<std::size_t>(lender)) != 0;
}

void SharingMatrix::set(int borrower, int lender, bool allowed) {
    if (borrower == lender) return;
    allow_.at(static_cast<std::size_t>(borrower) * n_ + static_cast<std::size_t>(lender)) = allowed ? 1 : 0;
}

SharingMatrix make_model_matrix(Model model, std::span<const TrafficClassConfig> classes) {
    if (classes.empty()) throw ConfigError("cannot build a sharing matrix without classes");
    std::set<int> priorities;
    for (const auto& tc : classes)
        if (!priorities.insert(tc.priority).second) throw ConfigError("class priorities must be unique");

    const auto n = classes.size();
    SharingMatrix matrix(n);
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t l = 0; l < n; ++l) {
            if (b == l) continue;
            bool allowed = false;
            switch (model) {
            case Model::MAM: allowed = false; break;
            case Model::RDM: allowed = classes[l].priority > classes[b].priority; break;
            case Model::ATCS: allowed = true; break;
            case Model::Custom: throw ConfigError("custom model has no preset matrix");
            }
            matrix.set(static_cast<int>(b), static_cast<int>(l), allowed);
        }
    }
    return matrix;
}

MetricCounters::MetricCounters(std::size_t classes)
    : arrivals(classes, 0), established(classes, 0), blocking(classes, 0), preemption(classes, 0),
      devolution(classes, 0), unbroken(classes, 0) {}

namespace {

std::int64_t sum(const std::vector<std::int64_t>& v) { return std::accumulate(v.begin(), v.end(), std::int64_t{0}); }

template <typename Op>
void combine(MetricCounters& lhs, const MetricCounters& rhs, Op op) {
    auto apply = [&](std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
        if (a.size() < b.size()) a.resize(b.size(), 0);
        for (std::size_t i = 0; i < b.size(); ++i) a[i] = op(a[i], b[i]);
    };
    apply(lhs.arrivals, rhs.arrivals);
    apply(lhs.established, rhs.established);
    apply(lhs.blocking, rhs.blocking);
    apply(lhs.preemption, rhs.preemption);
    apply(lhs.devolution, rhs.devolution);
    apply(lhs.unbroken, rhs.unbroken);
}

} // namespace

std::int64_t MetricCounters::total_arrivals() const { return sum(arrivals); }
std::int64_t MetricCounters::total_established() const { return sum(established); }
std::int64_t MetricCounters::total_blocking() const { return sum(blocking); }
std::int64_t MetricCounters::total_preemption() const { return sum(preemption); }
std::int64_t MetricCounters::total_devolution() const { return sum(devolution); }
std::int64_t MetricCounters::total_unbroken() const { return sum(unbroken); }

MetricCounters& MetricCounters::operator+=(const MetricCounters& other) {
    combine(*this, other, std::plus<>{});
    return *this;
}

MetricCounters& MetricCounters::operator-=(const MetricCounters& other) {
    combine(*this, other, std::minus<>{});
    return *this;
}

Mbps LinkState::spare(int lender) const {
    return classes.at(static_cast<std::size_t>(lender)).bc - used_per_lender.at(static_cast<std::size_t>(lender));
}

Mbps LinkState::total_used() const {
    return std::accumulate(used_per_lender.begin(), used_per_lender.end(), Mbps{0});
}

LinkState make_link(Mbps capacity, std::vector<TrafficClassConfig> classes, Model model) {
    if (auto issues = class_config_issues(classes, capacity); !issues.empty()) throw ConfigError(std::move(issues));
    LinkState state;
    state.capacity = capacity;
    state.matrix = make_model_matrix(model, classes);
    state.active_model = model;
    state.used_per_lender.assign(classes.size(), 0);
    state.counters = MetricCounters(classes.size());
    state.classes = std::move(classes);
    return state;
}

namespace {

// Position of a class in ascending priority order.
std::vector<int> priority_positions(const LinkState& state) {
    const auto n = state.class_count();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return state.classes[a].priority < state.classes[b].priority; });
    std::vector<int> position(n);
    for (std::size_t p = 0; p < n; ++p) position[order[p]] = static_cast<int>(p);
    return position;
}

Mbps permitted_spare(const LinkState& state, std::span<const int> lenders, std::span<const Mbps> used) {
    Mbps total = 0;
    for (int l : lenders) total += state.classes[l].bc - used[l];
    return total;
}

void check_request(const LinkState& state, const LspRequest& request) {
    if (request.class_index < 0 || static_cast<std::size_t>(request.class_index) >= state.class_count())
        throw std::invalid_argument("unknown traffic class " + std::to_string(request.class_index));
    if (request.bandwidth <= 0) throw std::invalid_argument("requested bandwidth must be positive");
}

void check_bounds(const LinkState& state) {
    Mbps total = 0;
    for (std::size_t l = 0; l < state.class_count(); ++l) {
        const Mbps used = state.used_per_lender[l];
        if (used < 0 || used > state.classes[l].bc)
            throw InvariantError("BC" + std::to_string(l) + " occupancy " + std::to_string(used) + " outside [0, " +
                                 std::to_string(state.classes[l].bc) + "]");
        total += used;
    }
    if (total > state.capacity) throw InvariantError("link occupancy exceeds capacity");
}

void after_mutation(const LinkState& state) {
    if (state.audit)
        verify_ledger(state);
    else
        check_bounds(state);
}

void emit(LinkState& state, LinkEvent event) { state.events.push_back(std::move(event)); }

} // namespace

std::vector<int> lender_order(const LinkState& state, int borrower) {
    const auto position = priority_positions(state);
    std::vector<int> lenders;
    for (int l = 0; l < static_cast<int>(state.class_count()); ++l)
        if (l != borrower && state.matrix.allows(borrower, l)) lenders.push_back(l);
    std::sort(lenders.begin(), lenders.end(), [&](int a, int b) {
        const int da = std::abs(position[a] - position[borrower]);
        const int db = std::abs(position[b] - position[borrower]);
        return da != db ? da < db : a < b;
    });
    lenders.insert(lenders.begin(), borrower);
    return lenders;
}

std::vector<LspId> reclaim_candidates(const LinkState& state, int owner) {
    std::vector<const LspRecord*> borrowers;
    for (const auto& [id, record] : state.active_lsps)
        if (record.class_index != owner && record.breakdown[owner] > 0) borrowers.push_back(&record);
    std::sort(borrowers.begin(), borrowers.end(), [&](const LspRecord* a, const LspRecord* b) {
        const int pa = state.classes[a->class_index].priority;
        const int pb = state.classes[b->class_index].priority;
        return pa != pb ? pa < pb : a->id > b->id;
    });
    std::vector<LspId> ids;
    ids.reserve(borrowers.size());
    for (const auto* record : borrowers) ids.push_back(record->id);
    return ids;
}

AdmissionDecision admit_lsp(LinkState& state, const LspRequest& request) {
    check_request(state, request);
    const int cls = request.class_index;
    const auto c = static_cast<std::size_t>(cls);

    state.counters.arrivals[c] += 1;
    auto block = [&]() {
        state.counters.blocking[c] += 1;
        emit(state, {request.arrival_time, LinkEventKind::Block, 0, cls, request.bandwidth, state.active_model, {}});
        return AdmissionDecision{};
    };

    if (request.bandwidth > state.capacity) return block();

    const auto lenders = lender_order(state, cls);
    std::vector<Mbps> used = state.used_per_lender;
    std::vector<LspId> victims;

    if (permitted_spare(state, lenders, used) < request.bandwidth) {
        for (LspId id : reclaim_candidates(state, cls)) {
            const auto& record = state.active_lsps.at(id);
            for (std::size_t l = 0; l < used.size(); ++l) used[l] -= record.breakdown[l];
            victims.push_back(id);
            if (permitted_spare(state, lenders, used) >= request.bandwidth) break;
        }
        if (permitted_spare(state, lenders, used) < request.bandwidth) return block();
    }

    AdmissionDecision decision;
    decision.outcome = AdmissionDecision::Outcome::Accepted;

    const int requester_priority = state.classes[c].priority;
    for (LspId id : victims) {
        auto node = state.active_lsps.extract(id);
        const auto& record = node.mapped();
        const auto vc = static_cast<std::size_t>(record.class_index);
        const bool lower = state.classes[vc].priority < requester_priority;
        const auto kind = lower ? VictimKind::Preempted : VictimKind::Devolved;
        if (lower)
            state.counters.preemption[vc] += 1;
        else
            state.counters.devolution[vc] += 1;
        decision.victims.push_back({id, record.class_index, record.bandwidth, kind});
        emit(state, {request.arrival_time, lower ? LinkEventKind::Preempt : LinkEventKind::Devolve, id,
                     record.class_index, record.bandwidth, state.active_model, {}});
    }

    std::vector<Mbps> breakdown(state.class_count(), 0);
    Mbps remaining = request.bandwidth;
    for (int l : lenders) {
        const Mbps take = std::min(remaining, state.classes[l].bc - used[l]);
        if (take <= 0) continue;
        breakdown[l] = take;
        used[l] += take;
        remaining -= take;
        if (remaining == 0) break;
    }
    if (remaining != 0) throw InvariantError("admission fill left a residue");

    state.used_per_lender = std::move(used);
    const LspId id = state.next_id++;
    state.active_lsps.emplace(
        id, LspRecord{id, cls, request.bandwidth, request.arrival_time, request.holding_time, breakdown});
    state.counters.established[c] += 1;
    emit(state, {request.arrival_time, LinkEventKind::Admit, id, cls, request.bandwidth, state.active_model, {}});

    decision.lsp_id = id;
    decision.breakdown = std::move(breakdown);
    after_mutation(state);
    return decision;
}

void release_lsp(LinkState& state, LspId id, bool completed, double time) {
    auto it = state.active_lsps.find(id);
    if (it == state.active_lsps.end()) {
        emit(state, {time, LinkEventKind::Warning, id, -1, 0, state.active_model, "release of unknown LSP"});
        return;
    }
    const LspRecord& record = it->second;
    for (std::size_t l = 0; l < state.class_count(); ++l) state.used_per_lender[l] -= record.breakdown[l];
    if (completed) state.counters.unbroken[static_cast<std::size_t>(record.class_index)] += 1;
    emit(state, {time, LinkEventKind::Release, id, record.class_index, record.bandwidth, state.active_model,
                 completed ? "completed" : "torn down"});
    state.active_lsps.erase(it);
    after_mutation(state);
}

void reconfigure_model(LinkState& state, Model model, double time) {
    auto matrix = make_model_matrix(model, state.classes);
    const Model previous = state.active_model;
    state.matrix = std::move(matrix);
    state.active_model = model;
    emit(state, {time, LinkEventKind::Reconfigure, 0, -1, 0, model,
                 std::string(to_string(previous)) + "->" + std::string(to_string(model))});
}

void reconfigure_matrix(LinkState& state, SharingMatrix matrix, double time) {
    if (matrix.size() != state.class_count()) throw ConfigError("sharing matrix size does not match class count");
    const Model previous = state.active_model;
    state.matrix = std::move(matrix);
    state.active_model = Model::Custom;
    emit(state, {time, LinkEventKind::Reconfigure, 0, -1, 0, Model::Custom,
                 std::string(to_string(previous)) + "->custom"});
}

void verify_ledger(const LinkState& state) {
    std::vector<Mbps> expected(state.class_count(), 0);
    for (const auto& [id, record] : state.active_lsps) {
        if (record.id != id) throw InvariantError("LSP record keyed under the wrong id");
        if (record.breakdown.size() != state.class_count())
            throw InvariantError("LSP " + std::to_string(id) + " breakdown has the wrong width");
        Mbps total = 0;
        for (std::size_t l = 0; l < expected.size(); ++l) {
            if (record.breakdown[l] < 0) throw InvariantError("negative breakdown entry");
            expected[l] += record.breakdown[l];
            total += record.breakdown[l];
        }
        if (total != record.bandwidth)
            throw InvariantError("LSP " + std::to_string(id) + " breakdown does not sum to its bandwidth");
    }
    if (expected != state.used_per_lender) throw InvariantError("occupancy is not the column sum of active LSPs");
    check_bounds(state);
}

} // namespace bamcbr
