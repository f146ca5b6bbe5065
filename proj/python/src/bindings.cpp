#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "streamcc/alignment.hpp"
#include "streamcc/errors.hpp"
#include "streamcc/event_stream.hpp"
#include "streamcc/experiment.hpp"
#include "streamcc/metrics.hpp"
#include "streamcc/pnml.hpp"
#include "streamcc/policies.hpp"

namespace py = pybind11;
using namespace streamcc;

namespace {

py::dict move_dict(const PetriNet& net, const AlignmentState& s) {
    py::dict d;
    d["kind"] = to_string(s.move.kind);
    d["activity"] = s.move.activity ? py::cast(*s.move.activity) : py::none();
    d["transition"] = s.move.transition ? py::cast(net.transition(*s.move.transition).id) : py::none();
    d["cost"] = s.move_cost;
    d["marking"] = net.named(s.marking_after);
    return d;
}

py::dict window_dict(const WindowStats& w) {
    py::dict d;
    d["window"] = w.window_index;
    d["events"] = w.events_in_window;
    d["failed"] = w.failed;
    if (!w.failed) {
        d["max_states"] = w.max_stored_states;
        d["rmse"] = w.rmse_fitness;
        d["f1"] = w.f1_classification;
        d["apte_us"] = w.apte;
    }
    return d;
}

py::dict run_dict(const PolicyRun& run) {
    py::dict d;
    d["name"] = run.name;
    d["policy"] = run.config.describe();
    py::list windows;
    for (const auto& w : run.windows) windows.append(window_dict(w));
    d["windows"] = windows;
    d["shortest_path_calls"] = run.shortest_path_count;
    d["failure"] = run.failure ? py::cast(*run.failure) : py::none();
    return d;
}

py::dict result_dict(const ExperimentResult& result) {
    py::dict d;
    d["baseline"] = run_dict(result.baseline);
    py::list runs;
    for (const auto& r : result.runs) runs.append(run_dict(r));
    d["runs"] = runs;
    return d;
}

std::vector<StreamEvent> to_stream(const std::vector<std::pair<std::string, std::string>>& events) {
    std::vector<StreamEvent> out;
    out.reserve(events.size());
    for (const auto& [c, a] : events) {
        StreamEvent e;
        e.case_id = c;
        e.activity = a;
        e.arrival_index = out.size();
        e.event_id = out.size() + 1;
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_streamcc, m) {
    m.doc() = "Online conformance checking of event streams under bounded memory";
    m.attr("__version__") = library_version();

    auto error = py::register_exception<Error>(m, "Error");
    py::register_exception<ParseError>(m, "ParseError", error);
    py::register_exception<ValidationError>(m, "ValidationError", error);
    py::register_exception<SearchBudgetExceeded>(m, "SearchBudgetExceeded", error);
    py::register_exception<EmptyWindow>(m, "EmptyWindow", error);

    py::class_<PetriNet>(m, "PetriNet")
        .def_property_readonly("places", &PetriNet::places)
        .def_property_readonly("transitions",
                               [](const PetriNet& net) {
                                   std::vector<std::pair<std::string, std::optional<std::string>>> out;
                                   for (const auto& t : net.transitions()) out.emplace_back(t.id, t.label);
                                   return out;
                               })
        .def_property_readonly("arc_count", &PetriNet::arc_count)
        .def_property_readonly("initial_marking", [](const PetriNet& net) { return net.named(net.initial_marking()); })
        .def_property_readonly("final_marking", [](const PetriNet& net) { return net.named(net.final_marking()); })
        .def("enabled",
             [](const PetriNet& net, const std::map<std::string, std::uint32_t>& marking) {
                 std::vector<std::string> ids;
                 for (auto t : enabled_transitions(net, net.marking(marking))) ids.push_back(net.transition(t).id);
                 return ids;
             },
             py::arg("marking"))
        .def("fire",
             [](const PetriNet& net, const std::map<std::string, std::uint32_t>& marking, const std::string& id) {
                 const auto t = net.transition_index(id);
                 if (!t) throw ValidationError("unknown transition '" + id + "'");
                 return net.named(fire(net, net.marking(marking), *t));
             },
             py::arg("marking"), py::arg("transition"));

    m.def("load_pnml",
          [](const std::filesystem::path& path, std::optional<std::map<std::string, std::uint32_t>> final_marking) {
              PnmlOptions options;
              options.final_marking = std::move(final_marking);
              return load_pnml_file(path, options);
          },
          py::arg("path"), py::arg("final_marking") = py::none());

    py::class_<CostModel>(m, "CostModel")
        .def(py::init([](Cost sync, Cost log, Cost model, Cost silent) {
                 CostModel c{sync, log, model, silent};
                 c.validate();
                 return c;
             }),
             py::arg("sync") = 0.0, py::arg("log") = 1.0, py::arg("model") = 1.0, py::arg("silent") = 0.0)
        .def_readonly("sync", &CostModel::sync_cost)
        .def_readonly("log", &CostModel::log_cost)
        .def_readonly("model", &CostModel::model_cost)
        .def_readonly("silent", &CostModel::silent_model_cost);

    py::class_<PolicyConfig>(m, "PolicyConfig")
        .def(py::init([](const std::string& policy, std::optional<std::size_t> w, std::optional<std::size_t> n,
                         std::optional<CostModel> costs) {
                 PolicyConfig c{parse_policy_kind(policy), w, n, costs.value_or(CostModel{})};
                 c.validate();
                 return c;
             }),
             py::arg("policy") = "baseline", py::arg("w") = py::none(), py::arg("n") = py::none(),
             py::arg("costs") = py::none())
        .def_property_readonly("policy", [](const PolicyConfig& c) { return std::string(to_string(c.policy)); })
        .def_readonly("w", &PolicyConfig::w)
        .def_readonly("n", &PolicyConfig::n)
        .def("__repr__", [](const PolicyConfig& c) { return "<PolicyConfig " + c.describe() + ">"; });

    py::class_<Event>(m, "Event")
        .def_readonly("event_id", &Event::event_id)
        .def_readonly("case_id", &Event::case_id)
        .def_readonly("activity", &Event::activity)
        .def_property_readonly("timestamp", [](const Event& e) { return format_timestamp(e.timestamp); });

    m.def("load_log", [](const std::filesystem::path& path) { return load_log_file(path).events; }, py::arg("path"));
    m.def("replay",
          [](const std::filesystem::path& path, std::size_t replications) {
              const EventLog log = load_log_file(path);
              std::vector<std::pair<std::string, std::string>> out;
              for (const auto& e : replicate_stream(log, replications)) out.emplace_back(e.case_id, e.activity);
              return out;
          },
          py::arg("path"), py::arg("replications") = 1, "Arrival-ordered (case_id, activity) pairs.");

    py::class_<ConformanceEngine>(m, "ConformanceEngine")
        .def(py::init([](const PetriNet& net, const PolicyConfig& config, std::size_t max_expansions) {
                 SearchOptions search;
                 search.max_expansions = max_expansions;
                 return ConformanceEngine(net, config, search);
             }),
             py::arg("net"), py::arg("policy"), py::arg("max_expansions") = SearchOptions{}.max_expansions,
             py::keep_alive<1, 2>())
        .def("process",
             [](ConformanceEngine& engine, const std::string& case_id, const std::string& activity) {
                 const EventRef index = engine.model_semantics_count() + engine.shortest_path_count();
                 const EventOutcome o = engine.process(CaseEvent{case_id, activity, index});
                 py::dict d;
                 d["case_id"] = o.case_id;
                 d["cost"] = o.cost;
                 d["method"] = to_string(o.method);
                 d["evicted"] = o.evicted ? py::cast(*o.evicted) : py::none();
                 d["restored"] = o.restored;
                 return d;
             },
             py::arg("case_id"), py::arg("activity"))
        .def("case_cost", &ConformanceEngine::case_cost, py::arg("case_id"))
        .def("residual_cost", &ConformanceEngine::residual_cost, py::arg("case_id"))
        .def_property_readonly("stored_states", &ConformanceEngine::stored_states)
        .def_property_readonly("cases_in_memory", [](const ConformanceEngine& e) { return e.store().size(); })
        .def_property_readonly("summaries", [](const ConformanceEngine& e) { return e.repository().size(); });

    m.def("align",
          [](const PetriNet& net, const std::vector<std::string>& trace, std::optional<CostModel> costs,
             std::size_t max_expansions) {
              std::vector<TraceEvent> events;
              for (const auto& a : trace) events.push_back({a, std::nullopt});
              SearchOptions search;
              search.max_expansions = max_expansions;
              const auto pa = shortest_path_prefix_alignment(net, net.initial_marking(), events,
                                                             costs.value_or(CostModel{}), search);
              py::list moves;
              for (const auto& s : pa.states) moves.append(move_dict(net, s));
              py::dict d;
              d["cost"] = fitness_cost(pa);
              d["moves"] = moves;
              return d;
          },
          py::arg("net"), py::arg("trace"), py::arg("costs") = py::none(),
          py::arg("max_expansions") = SearchOptions{}.max_expansions,
          "Minimum-cost prefix-alignment of `trace` from the initial marking.");

    m.def("rmse", [](const std::vector<std::pair<Cost, Cost>>& pairs) { return rmse(pairs); }, py::arg("pairs"));
    m.def("f1_score",
          [](const std::vector<std::pair<bool, bool>>& pairs) {
              std::vector<std::pair<Conformance, Conformance>> labels;
              auto as = [](bool nc) { return nc ? Conformance::non_conformant : Conformance::conformant; };
              for (auto [p, b] : pairs) labels.emplace_back(as(p), as(b));
              return f1_score(labels);
          },
          py::arg("pairs"), "Pairs of (policy, baseline) non-conformance flags.");

    m.def("run_policies",
          [](const PetriNet& net, const std::vector<std::pair<std::string, std::string>>& events,
             const std::vector<std::pair<std::string, PolicyConfig>>& policies, std::size_t window_size,
             std::size_t jobs) {
              std::vector<NamedPolicy> named;
              for (const auto& [name, config] : policies) named.push_back({name, config});
              RunOptions options;
              options.window_size = window_size;
              options.jobs = jobs;
              const auto stream = to_stream(events);
              ExperimentResult result;
              {
                  py::gil_scoped_release release;
                  result = run_policies(net, stream, named, options);
              }
              return result_dict(result);
          },
          py::arg("net"), py::arg("events"), py::arg("policies"), py::arg("window_size") = 1000, py::arg("jobs") = 1);

    m.def("run_experiment",
          [](const std::filesystem::path& config_path, bool write_outputs) {
              const ExperimentConfig config = load_experiment_config(config_path);
              ExperimentResult result;
              {
                  py::gil_scoped_release release;
                  result = run_experiment(config);
                  if (write_outputs) write_experiment_outputs(config, result);
              }
              return result_dict(result);
          },
          py::arg("config"), py::arg("write_outputs") = false);
}
