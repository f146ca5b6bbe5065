#include "streamcc/alignment.hpp"

#include <algorithm>
#include <queue>
#include <tuple>
#include <unordered_map>

#include "streamcc/errors.hpp"

namespace streamcc {

const char* to_string(MoveKind kind) noexcept {
    switch (kind) {
        case MoveKind::synchronous: return "sync";
        case MoveKind::log: return "log";
        case MoveKind::model: return "model";
        case MoveKind::silent_model: return "silent";
    }
    return "?";
}

Move Move::synchronous(ActivityLabel a, TransitionIndex t, std::optional<EventRef> ref) {
    return Move{MoveKind::synchronous, std::move(a), t, ref};
}

Move Move::log(ActivityLabel a, std::optional<EventRef> ref) {
    return Move{MoveKind::log, std::move(a), std::nullopt, ref};
}

Move Move::model(TransitionIndex t) { return Move{MoveKind::model, std::nullopt, t, std::nullopt}; }

Move Move::silent(TransitionIndex t) { return Move{MoveKind::silent_model, std::nullopt, t, std::nullopt}; }

Cost CostModel::of(MoveKind kind) const noexcept {
    switch (kind) {
        case MoveKind::synchronous: return sync_cost;
        case MoveKind::log: return log_cost;
        case MoveKind::model: return model_cost;
        case MoveKind::silent_model: return silent_model_cost;
    }
    return 0.0;
}

void CostModel::validate() const {
    if (sync_cost < 0 || log_cost < 0 || model_cost < 0 || silent_model_cost < 0)
        throw ValidationError("move costs must be non-negative");
}

PrefixAlignment empty_alignment(const PetriNet& net) {
    PrefixAlignment pa;
    pa.base_marking = net.initial_marking();
    return pa;
}

Cost fitness_cost(const PrefixAlignment& pa) noexcept {
    Cost total = pa.residual_cost();
    for (const auto& s : pa.states) total += s.move_cost;
    return total;
}

const Marking& current_marking(const PrefixAlignment& pa) noexcept {
    return pa.states.empty() ? pa.base_marking : pa.states.back().marking_after;
}

std::vector<TraceEvent> log_projection(const PrefixAlignment& pa) {
    std::vector<TraceEvent> trace;
    for (const auto& s : pa.states) {
        if (s.move.consumes_event()) trace.push_back(TraceEvent{*s.move.activity, s.move.event_ref});
    }
    return trace;
}

bool try_extend_model_semantics(const PetriNet& net, PrefixAlignment& pa, const ActivityLabel& activity,
                                std::optional<EventRef> event_ref, const CostModel& costs) {
    const Marking& m = current_marking(pa);
    for (TransitionIndex t : net.transitions_labeled(activity)) {
        if (!is_enabled(net, m, t)) continue;
        Marking next = fire(net, m, t);
        pa.states.push_back(AlignmentState{Move::synchronous(activity, t, event_ref), costs.sync_cost, std::move(next)});
        return true;
    }
    return false;
}

std::optional<PrefixAlignment> extend_model_semantics(const PetriNet& net, const PrefixAlignment& pa,
                                                      const ActivityLabel& activity,
                                                      std::optional<EventRef> event_ref, const CostModel& costs) {
    PrefixAlignment next = pa;
    if (!try_extend_model_semantics(net, next, activity, event_ref, costs)) return std::nullopt;
    return next;
}

namespace {

struct NodeKey {
    Marking marking;
    std::uint32_t position;

    friend bool operator==(const NodeKey&, const NodeKey&) = default;
};

struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const noexcept { return k.marking.hash() * 31 + k.position; }
};

struct Node {
    Marking marking;
    std::uint32_t position;
    Cost g;
    std::int64_t parent;
    MoveKind via;
    TransitionIndex transition;
    bool closed = false;
};

// (f, insertion sequence, node); smallest first.
using OpenEntry = std::tuple<Cost, std::uint64_t, std::uint32_t>;

}  // namespace

PrefixAlignment shortest_path_prefix_alignment(const PetriNet& net, const Marking& start,
                                               std::span<const TraceEvent> trace, const CostModel& costs,
                                               const SearchOptions& options, SearchStats* stats) {
    const auto length = static_cast<std::uint32_t>(trace.size());
    const Cost per_event = std::min(costs.sync_cost, costs.log_cost);
    auto heuristic = [&](std::uint32_t position) -> Cost {
        return options.use_heuristic ? per_event * static_cast<Cost>(length - position) : 0.0;
    };

    std::vector<Node> nodes;
    std::unordered_map<NodeKey, std::uint32_t, NodeKeyHash> index;
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;
    std::uint64_t sequence = 0;
    SearchStats local;

    auto relax = [&](Marking marking, std::uint32_t position, Cost g, std::int64_t parent, MoveKind via,
                     TransitionIndex t) {
        ++local.generated;
        auto [it, inserted] = index.try_emplace(NodeKey{marking, position}, static_cast<std::uint32_t>(nodes.size()));
        if (inserted) {
            nodes.push_back(Node{std::move(marking), position, g, parent, via, t});
        } else {
            Node& existing = nodes[it->second];
            if (existing.closed || !(g < existing.g)) return;
            existing.g = g;
            existing.parent = parent;
            existing.via = via;
            existing.transition = t;
        }
        open.emplace(g + heuristic(position), sequence++, it->second);
    };

    relax(start, 0, 0.0, -1, MoveKind::log, 0);

    std::optional<std::uint32_t> goal;
    while (!open.empty()) {
        auto [f, seq, id] = open.top();
        open.pop();
        if (nodes[id].closed || f != nodes[id].g + heuristic(nodes[id].position)) continue;
        nodes[id].closed = true;

        if (nodes[id].position == length) {
            goal = id;
            break;
        }
        if (local.expansions >= options.max_expansions) {
            if (stats) *stats = local;
            throw SearchBudgetExceeded(local.expansions);
        }
        ++local.expansions;

        // Copies: `nodes` may reallocate while successors are added.
        const Marking marking = nodes[id].marking;
        const std::uint32_t position = nodes[id].position;
        const Cost g = nodes[id].g;
        const ActivityLabel& activity = trace[position].activity;

        for (TransitionIndex t : net.transitions_labeled(activity)) {
            if (is_enabled(net, marking, t))
                relax(fire(net, marking, t), position + 1, g + costs.sync_cost, id, MoveKind::synchronous, t);
        }
        for (TransitionIndex t = 0; t < net.transitions().size(); ++t) {
            if (net.transition(t).silent() && is_enabled(net, marking, t))
                relax(fire(net, marking, t), position, g + costs.silent_model_cost, id, MoveKind::silent_model, t);
        }
        for (TransitionIndex t = 0; t < net.transitions().size(); ++t) {
            if (!net.transition(t).silent() && is_enabled(net, marking, t))
                relax(fire(net, marking, t), position, g + costs.model_cost, id, MoveKind::model, t);
        }
        relax(marking, position + 1, g + costs.log_cost, id, MoveKind::log, 0);
    }
    if (stats) *stats = local;
    // An all-log path always reaches the goal, so the queue cannot drain first.
    if (!goal) throw Error("shortest-path search terminated without reaching the goal");

    std::vector<std::uint32_t> path;
    for (std::int64_t n = *goal; nodes[n].parent >= 0; n = nodes[n].parent) path.push_back(static_cast<std::uint32_t>(n));
    std::reverse(path.begin(), path.end());

    PrefixAlignment result;
    result.base_marking = start;
    result.states.reserve(path.size());
    for (std::uint32_t n : path) {
        const Node& node = nodes[n];
        const std::uint32_t consumed = node.position - 1;
        Move move;
        switch (node.via) {
            case MoveKind::synchronous:
                move = Move::synchronous(trace[consumed].activity, node.transition, trace[consumed].event_ref);
                break;
            case MoveKind::log: move = Move::log(trace[consumed].activity, trace[consumed].event_ref); break;
            case MoveKind::model: move = Move::model(node.transition); break;
            case MoveKind::silent_model: move = Move::silent(node.transition); break;
        }
        result.states.push_back(AlignmentState{std::move(move), costs.of(node.via), node.marking});
    }
    return result;
}

}  // namespace streamcc
