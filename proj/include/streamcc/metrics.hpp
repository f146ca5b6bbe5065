#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "streamcc/event_stream.hpp"
#include "streamcc/policies.hpp"

namespace streamcc {

enum class Conformance { conformant, non_conformant };

Conformance classify_cost(Cost cost) noexcept;
Conformance classify_case(const CaseRecord& record) noexcept;

/// Root-mean-square difference of (policy, baseline) cost pairs. Throws EmptyWindow on empty input.
double rmse(std::span<const std::pair<Cost, Cost>> pairs);

/// F1 of (policy, baseline) labels with non-conformant as the positive class and the
/// baseline as ground truth. 1.0 when neither side has any positive. Throws EmptyWindow on empty input.
double f1_score(std::span<const std::pair<Conformance, Conformance>> pairs);

/// Mean non-summary state count over the records of D_C; 0 for an empty store.
double average_states_per_case(const CaseStore& store);

struct WindowStats {
    std::size_t window_index = 0;
    std::size_t events_in_window = 0;
    std::size_t max_stored_states = 0;
    double rmse_fitness = 0.0;
    double f1_classification = 1.0;
    /// Microseconds.
    double apte = 0.0;
    std::size_t shortest_path_calls = 0;
    bool failed = false;
};

struct NamedPolicy {
    std::string name;
    PolicyConfig config;
};

struct PolicyRun {
    std::string name;
    PolicyConfig config;
    std::vector<WindowStats> windows;
    std::size_t shortest_path_count = 0;
    std::size_t model_semantics_count = 0;
    std::optional<std::string> failure;
};

struct ExperimentResult {
    /// The infinite-memory reference every policy is compared against.
    PolicyRun baseline;
    std::vector<PolicyRun> runs;
};

struct RunOptions {
    std::size_t window_size = 1000;
    SearchOptions search;
    /// Worker threads; each worker owns its own baseline engine.
    std::size_t jobs = 1;
    /// Called after each policy engine processed an event, with the policy's index.
    /// Invoked from worker threads when jobs > 1.
    std::function<void(std::size_t, const ConformanceEngine&)> after_event;
};

/// Replays `stream` through every policy, interleaved per event with a baseline engine.
/// RMSE and F1 for a window range over the cases that received an event in that window,
/// each compared at its last event of the window. A policy whose search budget runs out
/// is marked failed from that window on; the other policies continue. All policies must
/// share one cost model, which the baseline also uses.
ExperimentResult run_policies(const PetriNet& net, std::span<const StreamEvent> stream,
                              const std::vector<NamedPolicy>& policies, const RunOptions& options = {});

/// Mean per-event processing time (microseconds) per window of the original stream,
/// averaged over `k` sequential replications with renamed cases.
std::vector<double> measure_apte(const PetriNet& net, const EventLog& log, const PolicyConfig& policy,
                                 std::size_t k, std::size_t window_size, const SearchOptions& search = {});

/// Least-squares slope of `values` against their index.
double least_squares_slope(std::span<const double> values);

}  // namespace streamcc
