#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <list>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "streamcc/alignment.hpp"
#include "streamcc/petri_net.hpp"

namespace streamcc {

using CaseId = std::string;

enum class PolicyKind { baseline, bounded_states, bounded_cases, combined };

const char* to_string(PolicyKind kind) noexcept;
/// Accepts "baseline", "bounded-states", "bounded-cases", "combined" (underscores also accepted).
PolicyKind parse_policy_kind(const std::string& name);

struct PolicyConfig {
    PolicyKind policy = PolicyKind::baseline;
    /// State limit per case.
    std::optional<std::size_t> w;
    /// Limit on multi-state cases.
    std::optional<std::size_t> n;
    CostModel cost_model;

    static PolicyConfig baseline(CostModel costs = {});
    static PolicyConfig bounded_states(std::size_t w, CostModel costs = {});
    static PolicyConfig bounded_cases(std::size_t n, CostModel costs = {});
    static PolicyConfig combined(std::size_t n, std::size_t w, CostModel costs = {});

    /// Throws ValidationError when a limit is missing, zero, or not used by the policy.
    void validate() const;
    std::string describe() const;
};

struct CaseRecord {
    CaseId case_id;
    PrefixAlignment alignment;
    /// Arrival index of the latest event of this case.
    std::uint64_t last_update = 0;
    std::uint64_t event_count = 0;
};

Cost effective_cost(const CaseRecord& record) noexcept;

enum class ForgetPreference : int {
    compliant_monuple = 1,
    residual_cost = 2,
    conformant = 3,
    non_conformant = 4,
};

ForgetPreference forget_preference(const CaseRecord& record) noexcept;

/// Multi-state case memory. Records are kept in least-recently-updated order, which
/// is also the order in which the forgetting scan visits them.
class CaseStore {
public:
    explicit CaseStore(std::optional<std::size_t> capacity = std::nullopt) : capacity_(capacity) {}

    std::optional<std::size_t> capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return index_.size(); }
    bool empty() const noexcept { return index_.empty(); }
    bool contains(const CaseId& id) const { return index_.count(id) > 0; }

    const CaseRecord* find(const CaseId& id) const;

    /// Inserts or replaces the record, placing it by (last_update, case id).
    const CaseRecord& upsert(CaseRecord record);
    std::optional<CaseRecord> erase(const CaseId& id);

    /// Records in scan (least-recently-updated first) order.
    const std::list<CaseRecord>& records() const noexcept { return records_; }

    std::size_t state_count() const noexcept { return states_; }

    /// First record in scan order among those of the best forgetting preference; nullptr when empty.
    const CaseRecord* preferred_victim() const noexcept;

private:
    using RecordIt = std::list<CaseRecord>::iterator;
    struct Slot {
        RecordIt record;
        ForgetPreference preference;
        std::list<RecordIt>::iterator rank;
    };

    std::optional<std::size_t> capacity_;
    std::list<CaseRecord> records_;
    std::unordered_map<CaseId, Slot> index_;
    /// Per preference class, the records of that class in scan order.
    std::array<std::list<RecordIt>, 4> by_preference_;
    std::size_t states_ = 0;
};

/// Single-state summaries of cases forgotten from the CaseStore.
class SummaryRepository {
public:
    struct Entry {
        SummaryState summary;
        /// Bookkeeping only; not counted as a state.
        std::uint64_t event_count = 0;
    };

    std::size_t size() const noexcept { return entries_.size(); }
    bool contains(const CaseId& id) const { return entries_.count(id) > 0; }
    const SummaryState* find(const CaseId& id) const;
    void put(const CaseId& id, SummaryState summary, std::uint64_t event_count = 0);
    std::optional<Entry> take(const CaseId& id);
    const std::unordered_map<CaseId, Entry>& entries() const noexcept { return entries_; }

private:
    std::unordered_map<CaseId, Entry> entries_;
};

std::size_t stored_state_count(const CaseStore& store, const SummaryRepository& repo) noexcept;

/// Forgets the earliest states in excess of `w`, folding them into a leading summary.
/// A summary counts as one state; with w = 1 the summary and the newest state are kept.
PrefixAlignment truncate_states(const PrefixAlignment& pa, std::size_t w);

/// Single pass over the store in least-recently-updated order. A compliant monuple
/// stops the scan; otherwise the first case of the best preference class wins.
/// Precondition: store is not empty.
CaseId select_forget_victim(const CaseStore& store);

enum class AlignmentMethod { model_semantics, shortest_path };

const char* to_string(AlignmentMethod method) noexcept;

struct EventOutcome {
    CaseId case_id;
    Cost cost = 0.0;
    AlignmentMethod method = AlignmentMethod::model_semantics;
    std::optional<CaseId> evicted;
    bool restored = false;
    std::size_t expansions = 0;
};

/// Minimal event passed to the process_event_* functions.
struct CaseEvent {
    CaseId case_id;
    ActivityLabel activity;
    EventRef arrival_index = 0;
};

EventOutcome process_event_baseline(const PetriNet& net, CaseStore& store, const CaseEvent& event,
                                    const CostModel& costs = {}, const SearchOptions& search = {});
EventOutcome process_event_bounded_states(const PetriNet& net, CaseStore& store, const CaseEvent& event,
                                          std::size_t w, const CostModel& costs = {},
                                          const SearchOptions& search = {});
EventOutcome process_event_bounded_cases(const PetriNet& net, CaseStore& store, SummaryRepository& repo,
                                         const CaseEvent& event, std::size_t n, const CostModel& costs = {},
                                         const SearchOptions& search = {});
EventOutcome process_event_combined(const PetriNet& net, CaseStore& store, SummaryRepository& repo,
                                    const CaseEvent& event, std::size_t n, std::size_t w,
                                    const CostModel& costs = {}, const SearchOptions& search = {});

/// Owns one (D_C, R_C) pair and processes a stream strictly in order under one policy.
class ConformanceEngine {
public:
    ConformanceEngine(const PetriNet& net, PolicyConfig config, SearchOptions search = {});

    EventOutcome process(const CaseEvent& event);

    const PetriNet& net() const noexcept { return *net_; }
    const PolicyConfig& config() const noexcept { return config_; }
    const CaseStore& store() const noexcept { return store_; }
    const SummaryRepository& repository() const noexcept { return repo_; }
    std::size_t stored_states() const noexcept { return stored_state_count(store_, repo_); }

    /// Cost of a case wherever it lives; nullopt for unseen cases.
    std::optional<Cost> case_cost(const CaseId& id) const;
    std::optional<Cost> residual_cost(const CaseId& id) const;

    std::size_t shortest_path_count() const noexcept { return searches_; }
    std::size_t model_semantics_count() const noexcept { return extensions_; }

private:
    const PetriNet* net_;
    PolicyConfig config_;
    SearchOptions search_;
    CaseStore store_;
    SummaryRepository repo_;
    std::size_t searches_ = 0;
    std::size_t extensions_ = 0;
};

}  // namespace streamcc
