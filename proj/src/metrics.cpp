#include "streamcc/metrics.hpp"

#include <chrono>
#include <cmath>
#include <thread>
#include <unordered_map>

#include "streamcc/errors.hpp"

namespace streamcc {

Conformance classify_cost(Cost cost) noexcept {
    return cost == 0 ? Conformance::conformant : Conformance::non_conformant;
}

Conformance classify_case(const CaseRecord& record) noexcept { return classify_cost(effective_cost(record)); }

double rmse(std::span<const std::pair<Cost, Cost>> pairs) {
    if (pairs.empty()) throw EmptyWindow("RMSE over an empty window");
    double sum = 0.0;
    for (const auto& [policy, baseline] : pairs) sum += (policy - baseline) * (policy - baseline);
    return std::sqrt(sum / static_cast<double>(pairs.size()));
}

double f1_score(std::span<const std::pair<Conformance, Conformance>> pairs) {
    if (pairs.empty()) throw EmptyWindow("F1 over an empty window");
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& [predicted, actual] : pairs) {
        const bool p = predicted == Conformance::non_conformant;
        const bool a = actual == Conformance::non_conformant;
        tp += p && a;
        fp += p && !a;
        fn += !p && a;
    }
    if (tp + fp + fn == 0) return 1.0;
    return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

double average_states_per_case(const CaseStore& store) {
    if (store.empty()) return 0.0;
    std::size_t states = 0;
    for (const auto& r : store.records()) states += r.alignment.states.size();
    return static_cast<double>(states) / static_cast<double>(store.size());
}

double least_squares_slope(std::span<const double> values) {
    const auto n = static_cast<double>(values.size());
    if (values.size() < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto x = static_cast<double>(i);
        sx += x;
        sy += values[i];
        sxx += x * x;
        sxy += x * values[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

using Clock = std::chrono::steady_clock;

double micros_since(Clock::time_point start) {
    return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

/// Window bookkeeping for one engine compared against the baseline.
class WindowAccumulator {
public:
    void record(const CaseId& id, Cost cost, Cost baseline_cost, std::size_t stored, double micros, bool searched) {
        touched_[id] = {cost, baseline_cost};
        max_states_ = std::max(max_states_, stored);
        micros_ += micros;
        searches_ += searched;
    }

    WindowStats close(std::size_t index, std::size_t events, bool failed) {
        WindowStats w;
        w.window_index = index;
        w.events_in_window = events;
        w.failed = failed;
        if (!failed && !touched_.empty()) {
            std::vector<std::pair<Cost, Cost>> costs;
            std::vector<std::pair<Conformance, Conformance>> labels;
            costs.reserve(touched_.size());
            labels.reserve(touched_.size());
            for (const auto& [_, pair] : touched_) {
                costs.push_back(pair);
                labels.emplace_back(classify_cost(pair.first), classify_cost(pair.second));
            }
            w.rmse_fitness = rmse(costs);
            w.f1_classification = f1_score(labels);
            w.max_stored_states = max_states_;
            w.apte = events ? micros_ / static_cast<double>(events) : 0.0;
            w.shortest_path_calls = searches_;
        }
        touched_.clear();
        max_states_ = 0;
        micros_ = 0;
        searches_ = 0;
        return w;
    }

private:
    std::unordered_map<CaseId, std::pair<Cost, Cost>> touched_;
    std::size_t max_states_ = 0;
    double micros_ = 0;
    std::size_t searches_ = 0;
};

struct Lane {
    std::size_t policy_index;
    const NamedPolicy* policy;
    ConformanceEngine engine;
    WindowAccumulator window;
    PolicyRun run;
    bool failed = false;
};

/// Runs the baseline plus `lanes` over the stream; fills `baseline_run` when non-null.
void run_worker(const PetriNet& net, std::span<const StreamEvent> stream, std::vector<Lane>& lanes,
                PolicyRun* baseline_run, const RunOptions& options) {
    ConformanceEngine baseline(net, PolicyConfig::baseline(lanes.empty() ? CostModel{} : lanes.front().policy->config.cost_model),
                               options.search);
    WindowAccumulator baseline_window;
    std::size_t in_window = 0;
    std::size_t window_index = 0;

    for (std::size_t i = 0; i < stream.size(); ++i) {
        const CaseEvent event = stream[i].as_case_event();
        auto start = Clock::now();
        const EventOutcome reference = baseline.process(event);
        const double reference_micros = micros_since(start);
        baseline_window.record(event.case_id, reference.cost, reference.cost, baseline.stored_states(),
                               reference_micros, reference.method == AlignmentMethod::shortest_path);

        for (Lane& lane : lanes) {
            if (lane.failed) continue;
            try {
                start = Clock::now();
                const EventOutcome outcome = lane.engine.process(event);
                const double micros = micros_since(start);
                lane.window.record(event.case_id, outcome.cost, reference.cost, lane.engine.stored_states(), micros,
                                   outcome.method == AlignmentMethod::shortest_path);
                if (options.after_event) options.after_event(lane.policy_index, lane.engine);
            } catch (const SearchBudgetExceeded& e) {
                lane.failed = true;
                lane.run.failure = e.what();
            }
        }

        ++in_window;
        if (in_window == options.window_size || i + 1 == stream.size()) {
            WindowStats b = baseline_window.close(window_index, in_window, false);
            if (baseline_run) baseline_run->windows.push_back(b);
            for (Lane& lane : lanes) lane.run.windows.push_back(lane.window.close(window_index, in_window, lane.failed));
            in_window = 0;
            ++window_index;
        }
    }
    for (Lane& lane : lanes) {
        lane.run.shortest_path_count = lane.engine.shortest_path_count();
        lane.run.model_semantics_count = lane.engine.model_semantics_count();
    }
    if (baseline_run) {
        baseline_run->shortest_path_count = baseline.shortest_path_count();
        baseline_run->model_semantics_count = baseline.model_semantics_count();
    }
}

}  // namespace

ExperimentResult run_policies(const PetriNet& net, std::span<const StreamEvent> stream,
                              const std::vector<NamedPolicy>& policies, const RunOptions& options) {
    if (options.window_size < 1) throw ValidationError("window size must be at least 1");
    for (const auto& p : policies) {
        p.config.validate();
        if (!(p.config.cost_model == policies.front().config.cost_model))
            throw ValidationError("all policies of a run must share one cost model");
    }

    ExperimentResult result;
    result.baseline.name = "baseline";
    result.baseline.config = PolicyConfig::baseline(policies.empty() ? CostModel{} : policies.front().config.cost_model);

    const std::size_t workers = std::max<std::size_t>(1, std::min(options.jobs, policies.size()));
    std::vector<std::vector<Lane>> lanes(workers);
    for (std::size_t i = 0; i < policies.size(); ++i) {
        const NamedPolicy& p = policies[i];
        lanes[i % workers].push_back(Lane{i, &p, ConformanceEngine(net, p.config, options.search), {},
                                          PolicyRun{p.name, p.config, {}, 0, 0, std::nullopt}});
    }

    if (workers == 1) {
        run_worker(net, stream, lanes[0], &result.baseline, options);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> threads;
        for (std::size_t w = 0; w < workers; ++w) {
            threads.emplace_back([&, w] {
                try {
                    run_worker(net, stream, lanes[w], w == 0 ? &result.baseline : nullptr, options);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : threads) t.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    result.runs.resize(policies.size());
    for (std::size_t i = 0; i < policies.size(); ++i) {
        Lane& lane = lanes[i % workers][i / workers];
        result.runs[i] = std::move(lane.run);
    }
    return result;
}

std::vector<double> measure_apte(const PetriNet& net, const EventLog& log, const PolicyConfig& policy, std::size_t k,
                                 std::size_t window_size, const SearchOptions& search) {
    if (k < 1) throw ValidationError("replication count must be at least 1");
    if (window_size < 1) throw ValidationError("window size must be at least 1");
    const std::size_t length = log.events.size();
    if (length == 0) return {};
    const std::size_t windows = (length + window_size - 1) / window_size;
    std::vector<double> total(windows, 0.0);
    std::vector<std::size_t> counts(windows, 0);

    ConformanceEngine engine(net, policy, search);
    EventStream stream(log, k);
    while (auto e = stream.next()) {
        const CaseEvent event = e->as_case_event();
        const std::size_t window = (e->arrival_index % length) / window_size;
        auto start = Clock::now();
        engine.process(event);
        total[window] += micros_since(start);
        ++counts[window];
    }
    for (std::size_t w = 0; w < windows; ++w) total[w] /= static_cast<double>(counts[w]);
    return total;
}

}  // namespace streamcc
