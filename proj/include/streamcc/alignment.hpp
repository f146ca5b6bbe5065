#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "streamcc/petri_net.hpp"

namespace streamcc {

using Cost = double;
/// Identifies the stream event a move consumed (its arrival index).
using EventRef = std::uint64_t;

enum class MoveKind : std::uint8_t { synchronous, log, model, silent_model };

const char* to_string(MoveKind kind) noexcept;

struct Move {
    MoveKind kind = MoveKind::log;
    std::optional<ActivityLabel> activity;
    std::optional<TransitionIndex> transition;
    std::optional<EventRef> event_ref;

    static Move synchronous(ActivityLabel a, TransitionIndex t, std::optional<EventRef> ref = {});
    static Move log(ActivityLabel a, std::optional<EventRef> ref = {});
    static Move model(TransitionIndex t);
    static Move silent(TransitionIndex t);

    /// Sync and log moves explain an event; model moves do not.
    bool consumes_event() const noexcept { return kind == MoveKind::synchronous || kind == MoveKind::log; }

    friend bool operator==(const Move&, const Move&) = default;
};

struct CostModel {
    Cost sync_cost = 0.0;
    Cost log_cost = 1.0;
    Cost model_cost = 1.0;
    Cost silent_model_cost = 0.0;

    Cost of(MoveKind kind) const noexcept;
    /// Throws ValidationError if any cost is negative.
    void validate() const;

    friend bool operator==(const CostModel&, const CostModel&) = default;
};

struct AlignmentState {
    Move move;
    Cost move_cost = 0.0;
    Marking marking_after;

    friend bool operator==(const AlignmentState&, const AlignmentState&) = default;
};

/// Stand-in for a forgotten prefix: the marking it reached and its accumulated cost.
struct SummaryState {
    Cost kappa_o = 0.0;
    Marking carry_marking;

    friend bool operator==(const SummaryState&, const SummaryState&) = default;
};

/// A prefix-alignment, optionally led by a summary of forgotten states.
///
/// `base_marking` is the marking the first state proceeds from: the net's initial
/// marking, or the summary's carry marking when a summary is present.
struct PrefixAlignment {
    std::optional<SummaryState> summary;
    std::vector<AlignmentState> states;
    Marking base_marking;

    /// States held in memory; a summary occupies one slot.
    std::size_t size() const noexcept { return states.size() + (summary ? 1 : 0); }
    bool empty() const noexcept { return states.empty() && !summary; }
    Cost residual_cost() const noexcept { return summary ? summary->kappa_o : 0.0; }

    friend bool operator==(const PrefixAlignment&, const PrefixAlignment&) = default;
};

struct TraceEvent {
    ActivityLabel activity;
    std::optional<EventRef> event_ref;
};

struct SearchOptions {
    std::size_t max_expansions = 1'000'000;
    /// Remaining-events lower bound; admissible for non-negative costs.
    bool use_heuristic = true;
};

struct SearchStats {
    std::size_t expansions = 0;
    std::size_t generated = 0;
};

/// Starts an empty prefix-alignment at the net's initial marking.
PrefixAlignment empty_alignment(const PetriNet& net);

Cost fitness_cost(const PrefixAlignment& pa) noexcept;
const Marking& current_marking(const PrefixAlignment& pa) noexcept;
/// Events explained by the non-summary states, in order.
std::vector<TraceEvent> log_projection(const PrefixAlignment& pa);

/// Appends a synchronous move if a transition labeled `activity` is enabled in the
/// current marking (lowest transition id wins). Silent transitions are not explored.
std::optional<PrefixAlignment> extend_model_semantics(const PetriNet& net, const PrefixAlignment& pa,
                                                      const ActivityLabel& activity,
                                                      std::optional<EventRef> event_ref = {},
                                                      const CostModel& costs = {});
/// In-place form of extend_model_semantics; returns false and leaves `pa` untouched on failure.
bool try_extend_model_semantics(const PetriNet& net, PrefixAlignment& pa, const ActivityLabel& activity,
                                std::optional<EventRef> event_ref = {}, const CostModel& costs = {});

/// Minimum-cost prefix-alignment of `trace` starting at `start`.
///
/// Uniform-cost search over (marking, trace position) with closed-set de-duplication.
/// Among equal-cost paths the search prefers synchronous, then silent, then model,
/// then log moves, and lower transition ids; the outcome is deterministic.
/// Throws SearchBudgetExceeded once `options.max_expansions` nodes have been expanded.
PrefixAlignment shortest_path_prefix_alignment(const PetriNet& net, const Marking& start,
                                               std::span<const TraceEvent> trace, const CostModel& costs = {},
                                               const SearchOptions& options = {}, SearchStats* stats = nullptr);

}  // namespace streamcc
