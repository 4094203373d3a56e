#pragma once

// Per-link bandwidth allocation engine. A single sharing-permission matrix
// expresses MAM, RDM and ATCS (and any custom mix); admission, reclaim by
// preemption or devolution, release and model switching all run against the
// same ledger.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bamcbr {

using Mbps = std::int64_t;
using LspId = std::uint64_t;

enum class Model { MAM, RDM, ATCS, Custom };

inline constexpr std::array<Model, 3> kPresetModels{Model::MAM, Model::RDM, Model::ATCS};

std::string_view to_string(Model model);
/// Accepts "MAM", "RDM", "ATCS" and "custom" (case-insensitive). Throws ConfigError.
Model parse_model(std::string_view text);

struct TrafficClassConfig {
    int index = 0;
    int priority = 0; ///< higher value = higher priority
    Mbps bc = 0;      ///< bandwidth constraint owned by the class
    std::string name;

    bool operator==(const TrafficClassConfig&) const = default;
};

/// Returns one message per violated invariant; empty when the set is usable.
std::vector<std::string> class_config_issues(std::span<const TrafficClassConfig> classes, Mbps capacity);

/// allow(b, l): class b may occupy spare bandwidth inside class l's BC.
class SharingMatrix {
public:
    SharingMatrix() = default;
    /// Identity (no sharing) over n classes.
    explicit SharingMatrix(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    bool allows(int borrower, int lender) const;
    /// The diagonal is pinned to true.
    void set(int borrower, int lender, bool allowed);

    bool operator==(const SharingMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<std::uint8_t> allow_;
};

/// Preset matrices. MAM: identity. RDM: borrow only from higher-priority BCs.
/// ATCS: borrow from any BC. Throws ConfigError for Model::Custom or duplicate priorities.
SharingMatrix make_model_matrix(Model model, std::span<const TrafficClassConfig> classes);

struct LspRequest {
    int class_index = 0;
    Mbps bandwidth = 0;
    double arrival_time = 0.0;
    double holding_time = 0.0;
};

struct LspRecord {
    LspId id = 0;
    int class_index = 0;
    Mbps bandwidth = 0;
    double arrival_time = 0.0;
    double holding_time = 0.0;
    std::vector<Mbps> breakdown; ///< Mbps taken from each lender's BC, indexed by lender class

    bool operator==(const LspRecord&) const = default;
};

enum class VictimKind { Preempted, Devolved };

struct Victim {
    LspId id = 0;
    int class_index = 0;
    Mbps bandwidth = 0;
    VictimKind kind = VictimKind::Preempted;
};

struct AdmissionDecision {
    enum class Outcome { Accepted, Blocked };

    Outcome outcome = Outcome::Blocked;
    std::optional<LspId> lsp_id;
    std::vector<Mbps> breakdown;
    std::vector<Victim> victims;

    bool accepted() const noexcept { return outcome == Outcome::Accepted; }
};

/// Per-class tallies. Victims are counted under the victim's class.
struct MetricCounters {
    std::int64_t window_id = 0;
    std::vector<std::int64_t> arrivals;
    std::vector<std::int64_t> established;
    std::vector<std::int64_t> blocking;
    std::vector<std::int64_t> preemption;
    std::vector<std::int64_t> devolution;
    std::vector<std::int64_t> unbroken;

    MetricCounters() = default;
    explicit MetricCounters(std::size_t classes);

    std::size_t classes() const noexcept { return arrivals.size(); }

    std::int64_t total_arrivals() const;
    std::int64_t total_established() const;
    std::int64_t total_blocking() const;
    std::int64_t total_preemption() const;
    std::int64_t total_devolution() const;
    std::int64_t total_unbroken() const;

    MetricCounters& operator+=(const MetricCounters& other);
    MetricCounters& operator-=(const MetricCounters& other);
    friend MetricCounters operator-(MetricCounters lhs, const MetricCounters& rhs) { return lhs -= rhs; }
    friend MetricCounters operator+(MetricCounters lhs, const MetricCounters& rhs) { return lhs += rhs; }
    bool operator==(const MetricCounters&) const = default;
};

enum class LinkEventKind { Admit, Block, Preempt, Devolve, Release, Reconfigure, Warning };

std::string_view to_string(LinkEventKind kind);

struct LinkEvent {
    double time = 0.0;
    LinkEventKind kind = LinkEventKind::Admit;
    LspId lsp_id = 0;
    int class_index = -1;
    Mbps bandwidth = 0;
    Model model = Model::MAM;
    std::string note;

    bool operator==(const LinkEvent&) const = default;
};

struct LinkState {
    Mbps capacity = 0;
    std::vector<TrafficClassConfig> classes;
    SharingMatrix matrix;
    Model active_model = Model::MAM;
    std::map<LspId, LspRecord> active_lsps; ///< keyed by id; ids grow in admission order
    std::vector<Mbps> used_per_lender;      ///< occupancy of each BC, by anyone
    MetricCounters counters;                 ///< cumulative
    LspId next_id = 1;
    bool audit = false; ///< recompute the ledger after every mutation
    std::vector<LinkEvent> events;

    std::size_t class_count() const noexcept { return classes.size(); }
    Mbps spare(int lender) const;
    Mbps total_used() const;
};

/// Empty link running a preset model. Throws ConfigError when the classes are invalid.
LinkState make_link(Mbps capacity, std::vector<TrafficClassConfig> classes, Model model);

/// Permitted lenders for a borrower: its own BC first, then by increasing
/// priority distance, ties toward the lower class index.
std::vector<int> lender_order(const LinkState& state, int borrower);

/// LSPs of other classes occupying `owner`'s BC, in teardown order:
/// lowest priority first, then most recently admitted first.
std::vector<LspId> reclaim_candidates(const LinkState& state, int owner);

/// Admission with reclaim. Spare bandwidth across permitted lenders is used
/// first; only when it falls short are borrowers inside the requester's own BC
/// torn down, one whole LSP at a time, until the request fits. A blocked
/// request leaves the ledger untouched and only bumps blocking counters.
/// Throws std::invalid_argument on a non-positive bandwidth or unknown class.
AdmissionDecision admit_lsp(LinkState& state, const LspRequest& request);

/// Returns the LSP's breakdown to its lenders. Unknown ids log a warning and do nothing.
void release_lsp(LinkState& state, LspId id, bool completed, double time = 0.0);

/// Switches the sharing matrix. Existing LSPs keep their breakdowns.
void reconfigure_model(LinkState& state, Model model, double time = 0.0);
void reconfigure_matrix(LinkState& state, SharingMatrix matrix, double time = 0.0);

/// Throws InvariantError if the occupancy vector is not the column sum of the
/// active breakdowns or any BC or the capacity is exceeded.
void verify_ledger(const LinkState& state);

} // namespace bamcbr
