#include "streamcc/policies.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "streamcc/errors.hpp"

namespace streamcc {

const char* to_string(PolicyKind kind) noexcept {
    switch (kind) {
        case PolicyKind::baseline: return "baseline";
        case PolicyKind::bounded_states: return "bounded-states";
        case PolicyKind::bounded_cases: return "bounded-cases";
        case PolicyKind::combined: return "combined";
    }
    return "?";
}

PolicyKind parse_policy_kind(const std::string& name) {
    std::string normalized = name;
    std::replace(normalized.begin(), normalized.end(), '_', '-');
    if (normalized == "baseline") return PolicyKind::baseline;
    if (normalized == "bounded-states") return PolicyKind::bounded_states;
    if (normalized == "bounded-cases") return PolicyKind::bounded_cases;
    if (normalized == "combined") return PolicyKind::combined;
    throw ValidationError("unknown policy '" + name + "'");
}

PolicyConfig PolicyConfig::baseline(CostModel costs) { return PolicyConfig{PolicyKind::baseline, {}, {}, costs}; }

PolicyConfig PolicyConfig::bounded_states(std::size_t w, CostModel costs) {
    return PolicyConfig{PolicyKind::bounded_states, w, {}, costs};
}

PolicyConfig PolicyConfig::bounded_cases(std::size_t n, CostModel costs) {
    return PolicyConfig{PolicyKind::bounded_cases, {}, n, costs};
}

PolicyConfig PolicyConfig::combined(std::size_t n, std::size_t w, CostModel costs) {
    return PolicyConfig{PolicyKind::combined, w, n, costs};
}

void PolicyConfig::validate() const {
    cost_model.validate();
    const bool needs_w = policy == PolicyKind::bounded_states || policy == PolicyKind::combined;
    const bool needs_n = policy == PolicyKind::bounded_cases || policy == PolicyKind::combined;
    const std::string name = to_string(policy);
    if (needs_w && !w) throw ValidationError(name + " requires a state limit w");
    if (needs_n && !n) throw ValidationError(name + " requires a case limit n");
    if (!needs_w && w) throw ValidationError(name + " does not take a state limit w");
    if (!needs_n && n) throw ValidationError(name + " does not take a case limit n");
    if (w && *w < 1) throw ValidationError("state limit w must be at least 1");
    if (n && *n < 1) throw ValidationError("case limit n must be at least 1");
}

std::string PolicyConfig::describe() const {
    std::ostringstream os;
    os << to_string(policy);
    if (w) os << " w=" << *w;
    if (n) os << " n=" << *n;
    return os.str();
}

Cost effective_cost(const CaseRecord& record) noexcept { return fitness_cost(record.alignment); }

const CaseRecord* CaseStore::find(const CaseId& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &*it->second.record;
}

namespace {

bool scans_before(const CaseRecord& a, const CaseRecord& b) {
    return std::tie(a.last_update, a.case_id) < std::tie(b.last_update, b.case_id);
}

/// Insertion point keeping `list` in scan order; records mostly arrive last, so search from the back.
template <typename List, typename Get>
auto scan_position(List& list, const CaseRecord& record, Get get) {
    auto pos = list.end();
    while (pos != list.begin()) {
        auto prev = std::prev(pos);
        if (!scans_before(record, get(*prev))) break;
        pos = prev;
    }
    return pos;
}

}  // namespace

const CaseRecord& CaseStore::upsert(CaseRecord record) {
    erase(record.case_id);
    const ForgetPreference preference = forget_preference(record);
    auto pos = scan_position(records_, record, [](const CaseRecord& r) -> const CaseRecord& { return r; });
    states_ += record.alignment.size();
    RecordIt it = records_.insert(pos, std::move(record));

    auto& ranked = by_preference_[static_cast<std::size_t>(preference) - 1];
    auto rank_pos = scan_position(ranked, *it, [](RecordIt r) -> const CaseRecord& { return *r; });
    auto rank = ranked.insert(rank_pos, it);
    index_.emplace(it->case_id, Slot{it, preference, rank});
    return *it;
}

std::optional<CaseRecord> CaseStore::erase(const CaseId& id) {
    auto found = index_.find(id);
    if (found == index_.end()) return std::nullopt;
    const Slot slot = found->second;
    index_.erase(found);
    by_preference_[static_cast<std::size_t>(slot.preference) - 1].erase(slot.rank);
    states_ -= slot.record->alignment.size();
    CaseRecord record = std::move(*slot.record);
    records_.erase(slot.record);
    return record;
}

const CaseRecord* CaseStore::preferred_victim() const noexcept {
    for (const auto& ranked : by_preference_) {
        if (!ranked.empty()) return &*ranked.front();
    }
    return nullptr;
}

const SummaryState* SummaryRepository::find(const CaseId& id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second.summary;
}

void SummaryRepository::put(const CaseId& id, SummaryState summary, std::uint64_t event_count) {
    entries_[id] = Entry{std::move(summary), event_count};
}

std::optional<SummaryRepository::Entry> SummaryRepository::take(const CaseId& id) {
    auto it = entries_.find(id);
    if (it == entries_.end()) return std::nullopt;
    Entry entry = std::move(it->second);
    entries_.erase(it);
    return entry;
}

std::size_t stored_state_count(const CaseStore& store, const SummaryRepository& repo) noexcept {
    return store.state_count() + repo.size();
}

namespace {

void truncate_in_place(PrefixAlignment& pa, std::size_t w) {
    if (pa.size() <= w) return;
    const std::size_t keep = std::max<std::size_t>(w, 2) - 1;
    if (pa.states.size() <= keep) return;
    const std::size_t fold = pa.states.size() - keep;

    SummaryState summary{pa.residual_cost(), pa.states[fold - 1].marking_after};
    for (std::size_t i = 0; i < fold; ++i) summary.kappa_o += pa.states[i].move_cost;
    pa.states.erase(pa.states.begin(), pa.states.begin() + static_cast<std::ptrdiff_t>(fold));
    pa.base_marking = summary.carry_marking;
    pa.summary = std::move(summary);
}

}  // namespace

PrefixAlignment truncate_states(const PrefixAlignment& pa, std::size_t w) {
    if (w < 1) throw ValidationError("state limit w must be at least 1");
    PrefixAlignment out = pa;
    truncate_in_place(out, w);
    return out;
}

ForgetPreference forget_preference(const CaseRecord& record) noexcept {
    const PrefixAlignment& pa = record.alignment;
    if (record.event_count == 1 && !pa.summary && pa.states.size() == 1 &&
        pa.states.front().move.kind == MoveKind::synchronous)
        return ForgetPreference::compliant_monuple;
    if (pa.residual_cost() > 0) return ForgetPreference::residual_cost;
    if (effective_cost(record) == 0) return ForgetPreference::conformant;
    return ForgetPreference::non_conformant;
}

CaseId select_forget_victim(const CaseStore& store) {
    const CaseRecord* victim = store.preferred_victim();
    if (!victim) throw Error("select_forget_victim called on an empty store");
    return victim->case_id;
}

const char* to_string(AlignmentMethod method) noexcept {
    return method == AlignmentMethod::model_semantics ? "model-semantics" : "shortest-path";
}

namespace {

EventOutcome process_event(const PetriNet& net, CaseStore& store, SummaryRepository* repo, const CaseEvent& event,
                           std::optional<std::size_t> n, std::optional<std::size_t> w, const CostModel& costs,
                           const SearchOptions& search) {
    EventOutcome outcome;
    outcome.case_id = event.case_id;

    CaseRecord record;
    std::optional<SummaryRepository::Entry> restored;
    if (auto existing = store.erase(event.case_id)) {
        record = std::move(*existing);
    } else {
        if (repo) restored = repo->take(event.case_id);
        if (n && repo && store.size() >= *n) {
            const CaseId victim = select_forget_victim(store);
            CaseRecord forgotten = *store.erase(victim);
            repo->put(victim, SummaryState{effective_cost(forgotten), current_marking(forgotten.alignment)},
                      forgotten.event_count);
            outcome.evicted = victim;
        }
        record.case_id = event.case_id;
        record.alignment = empty_alignment(net);
        if (restored) {
            record.alignment.base_marking = restored->summary.carry_marking;
            record.alignment.summary = restored->summary;
            record.event_count = restored->event_count;
            outcome.restored = true;
        }
    }

    try {
        if (try_extend_model_semantics(net, record.alignment, event.activity, event.arrival_index, costs)) {
            outcome.method = AlignmentMethod::model_semantics;
        } else {
            std::vector<TraceEvent> trace = log_projection(record.alignment);
            trace.push_back(TraceEvent{event.activity, event.arrival_index});
            SearchStats stats;
            PrefixAlignment fresh = shortest_path_prefix_alignment(net, record.alignment.base_marking, trace, costs,
                                                                   search, &stats);
            fresh.summary = std::move(record.alignment.summary);
            record.alignment = std::move(fresh);
            outcome.method = AlignmentMethod::shortest_path;
            outcome.expansions = stats.expansions;
        }
    } catch (const SearchBudgetExceeded& e) {
        // Leave the case where it was before this event.
        if (restored) {
            repo->put(event.case_id, restored->summary, restored->event_count);
        } else if (!record.alignment.empty() || record.event_count > 0) {
            store.upsert(std::move(record));
        }
        throw SearchBudgetExceeded(e.expansions(), event.case_id);
    }

    if (w) truncate_in_place(record.alignment, *w);
    record.last_update = event.arrival_index;
    ++record.event_count;
    outcome.cost = effective_cost(record);
    store.upsert(std::move(record));
    return outcome;
}

}  // namespace

EventOutcome process_event_baseline(const PetriNet& net, CaseStore& store, const CaseEvent& event,
                                    const CostModel& costs, const SearchOptions& search) {
    return process_event(net, store, nullptr, event, std::nullopt, std::nullopt, costs, search);
}

EventOutcome process_event_bounded_states(const PetriNet& net, CaseStore& store, const CaseEvent& event,
                                          std::size_t w, const CostModel& costs, const SearchOptions& search) {
    if (w < 1) throw ValidationError("state limit w must be at least 1");
    return process_event(net, store, nullptr, event, std::nullopt, w, costs, search);
}

EventOutcome process_event_bounded_cases(const PetriNet& net, CaseStore& store, SummaryRepository& repo,
                                         const CaseEvent& event, std::size_t n, const CostModel& costs,
                                         const SearchOptions& search) {
    if (n < 1) throw ValidationError("case limit n must be at least 1");
    return process_event(net, store, &repo, event, n, std::nullopt, costs, search);
}

EventOutcome process_event_combined(const PetriNet& net, CaseStore& store, SummaryRepository& repo,
                                    const CaseEvent& event, std::size_t n, std::size_t w, const CostModel& costs,
                                    const SearchOptions& search) {
    if (n < 1) throw ValidationError("case limit n must be at least 1");
    if (w < 1) throw ValidationError("state limit w must be at least 1");
    return process_event(net, store, &repo, event, n, w, costs, search);
}

ConformanceEngine::ConformanceEngine(const PetriNet& net, PolicyConfig config, SearchOptions search)
    : net_(&net), config_(std::move(config)), search_(search), store_(config_.n) {
    config_.validate();
}

EventOutcome ConformanceEngine::process(const CaseEvent& event) {
    EventOutcome outcome;
    const CostModel& costs = config_.cost_model;
    switch (config_.policy) {
        case PolicyKind::baseline: outcome = process_event_baseline(*net_, store_, event, costs, search_); break;
        case PolicyKind::bounded_states:
            outcome = process_event_bounded_states(*net_, store_, event, *config_.w, costs, search_);
            break;
        case PolicyKind::bounded_cases:
            outcome = process_event_bounded_cases(*net_, store_, repo_, event, *config_.n, costs, search_);
            break;
        case PolicyKind::combined:
            outcome = process_event_combined(*net_, store_, repo_, event, *config_.n, *config_.w, costs, search_);
            break;
    }
    if (outcome.method == AlignmentMethod::shortest_path) {
        ++searches_;
    } else {
        ++extensions_;
    }
    return outcome;
}

std::optional<Cost> ConformanceEngine::case_cost(const CaseId& id) const {
    if (const CaseRecord* r = store_.find(id)) return effective_cost(*r);
    if (const SummaryState* s = repo_.find(id)) return s->kappa_o;
    return std::nullopt;
}

std::optional<Cost> ConformanceEngine::residual_cost(const CaseId& id) const {
    if (const CaseRecord* r = store_.find(id)) return r->alignment.residual_cost();
    if (const SummaryState* s = repo_.find(id)) return s->kappa_o;
    return std::nullopt;
}

}  // namespace streamcc
