#include "cli.hpp"

#include <charconv>
#include <deque>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <CLI11.hpp>
#include <json.hpp>

#include "streamcc/errors.hpp"
#include "streamcc/event_stream.hpp"
#include "streamcc/experiment.hpp"
#include "streamcc/pnml.hpp"
#include "streamcc/policies.hpp"
#include "streamcc/synthetic.hpp"

namespace streamcc::cli {

namespace {

/// Raised for flag combinations that are rejected before any input is read.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string number(double value) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, end);
}

std::string csv_field(const std::string& raw) {
    if (raw.find_first_of(",\"\n\r") == std::string::npos) return raw;
    std::string quoted = "\"";
    for (char c : raw) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

struct ColumnFlags {
    std::string case_id = "case_id";
    std::string activity = "activity";
    std::string timestamp = "timestamp";

    void attach(CLI::App* cmd) {
        cmd->add_option("--case-column", case_id, "CSV column holding the case id")->capture_default_str();
        cmd->add_option("--activity-column", activity, "CSV column holding the activity")->capture_default_str();
        cmd->add_option("--timestamp-column", timestamp, "CSV column holding the timestamp")->capture_default_str();
    }
    CsvColumns columns() const { return CsvColumns{case_id, activity, timestamp}; }
};

PetriNet load_model(const std::string& model, const std::string& final_marking) {
    PnmlOptions options;
    if (!final_marking.empty()) options.final_marking = load_final_marking_file(final_marking);
    return load_pnml_file(model, options);
}

/// Output goes to `path`, or to `fallback` when the path is empty.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw Error("cannot write '" + path + "'");
            out_ = &file_;
        }
    }
    std::ostream& stream() { return *out_; }

private:
    std::ofstream file_;
    std::ostream* out_;
};

// -- check --------------------------------------------------------------------

struct CheckFlags {
    std::string model, log, final_marking, policy = "baseline", out, format = "csv";
    std::optional<std::size_t> w, n;
    std::size_t max_expansions = SearchOptions{}.max_expansions;
    ColumnFlags columns;
};

PolicyConfig policy_from_flags(const std::string& name, std::optional<std::size_t> w, std::optional<std::size_t> n) {
    PolicyConfig config;
    try {
        config.policy = parse_policy_kind(name);
        config.w = w;
        config.n = n;
        config.validate();
    } catch (const ValidationError& e) {
        throw UsageError(e.what());
    }
    return config;
}

struct CaseReport {
    std::uint64_t events = 0;
    std::uint64_t model_semantics = 0;
    std::uint64_t shortest_path = 0;
};

int cmd_check(const CheckFlags& flags, std::ostream& out, std::ostream& err) {
    const PolicyConfig config = policy_from_flags(flags.policy, flags.w, flags.n);
    if (flags.format != "csv" && flags.format != "json") throw UsageError("--format must be csv or json");

    const PetriNet net = load_model(flags.model, flags.final_marking);
    const EventLog log = load_log_file(flags.log, flags.columns.columns());
    const auto stream = replay(log);

    SearchOptions search;
    search.max_expansions = flags.max_expansions;
    ConformanceEngine engine(net, config, search);
    std::vector<CaseId> order;
    std::unordered_map<CaseId, CaseReport> reports;
    for (const StreamEvent& e : stream) {
        const EventOutcome outcome = engine.process(e.as_case_event());
        auto [it, inserted] = reports.try_emplace(e.case_id);
        if (inserted) order.push_back(e.case_id);
        ++it->second.events;
        ++(outcome.method == AlignmentMethod::shortest_path ? it->second.shortest_path : it->second.model_semantics);
    }

    Sink sink(flags.out, out);
    std::ostream& os = sink.stream();
    if (flags.format == "csv") {
        os << "case_id,cost,conformant,residual,events,model_semantics,shortest_path\n";
        for (const CaseId& id : order) {
            const CaseReport& r = reports.at(id);
            const Cost cost = *engine.case_cost(id);
            os << csv_field(id) << ',' << number(cost) << ',' << (cost == 0 ? "true" : "false") << ','
               << number(*engine.residual_cost(id)) << ',' << r.events << ',' << r.model_semantics << ','
               << r.shortest_path << '\n';
        }
    } else {
        nlohmann::ordered_json doc;
        doc["policy"] = config.describe();
        doc["events"] = stream.size();
        doc["model_semantics"] = engine.model_semantics_count();
        doc["shortest_path"] = engine.shortest_path_count();
        doc["stored_states"] = engine.stored_states();
        doc["cases"] = nlohmann::ordered_json::array();
        for (const CaseId& id : order) {
            const CaseReport& r = reports.at(id);
            const Cost cost = *engine.case_cost(id);
            doc["cases"].push_back({{"case_id", id},
                                    {"cost", cost},
                                    {"conformant", cost == 0},
                                    {"residual", *engine.residual_cost(id)},
                                    {"events", r.events},
                                    {"model_semantics", r.model_semantics},
                                    {"shortest_path", r.shortest_path}});
        }
        os << doc.dump(2) << '\n';
    }
    if (!flags.out.empty())
        err << "checked " << stream.size() << " events of " << order.size() << " cases with " << config.describe()
            << '\n';
    return ok;
}

// -- replay -------------------------------------------------------------------

struct ReplayFlags {
    std::string log, out;
    bool paced = false;
    double speedup = 3600.0;
    std::size_t max_sleep_ms = 1000;
    std::size_t replicate = 1;
    ColumnFlags columns;
};

int cmd_replay(const ReplayFlags& flags, std::ostream& out) {
    if (flags.replicate < 1) throw UsageError("--replicate must be at least 1");
    if (!(flags.speedup > 0)) throw UsageError("--speedup must be positive");
    const EventLog log = load_log_file(flags.log, flags.columns.columns());
    EventStream stream(log, flags.replicate);
    if (flags.paced) stream.set_paced(flags.speedup, std::chrono::milliseconds(flags.max_sleep_ms));
    Sink sink(flags.out, out);
    std::ostream& os = sink.stream();
    os << "arrival_index,event_id,case_id,activity,timestamp\n";
    while (auto e = stream.next()) {
        os << e->arrival_index << ',' << e->event_id << ',' << csv_field(e->case_id) << ',' << csv_field(e->activity) << ','
           << format_timestamp(e->timestamp) << '\n';
        if (flags.paced) os.flush();
    }
    return ok;
}

// -- validate-model -----------------------------------------------------------

struct ValidateFlags {
    std::string model, final_marking;
    std::size_t max_markings = 100000;
};

int cmd_validate_model(const ValidateFlags& flags, std::ostream& out) {
    const PetriNet net = load_model(flags.model, flags.final_marking);
    std::size_t silent = 0;
    std::map<std::string, std::vector<TransitionIndex>> by_label;
    for (TransitionIndex t = 0; t < net.transitions().size(); ++t) {
        const auto& tr = net.transition(t);
        if (tr.silent()) {
            ++silent;
        } else {
            by_label[*tr.label].push_back(t);
        }
    }
    out << "places: " << net.places().size() << '\n';
    out << "transitions: " << net.transitions().size() << '\n';
    out << "arcs: " << net.arc_count() << '\n';
    out << "silent transitions: " << silent << '\n';
    out << "initial marking: " << net.format(net.initial_marking()) << '\n';

    std::vector<std::string> duplicates;
    std::vector<std::string> warnings;
    for (const auto& [label, ts] : by_label) {
        if (ts.size() < 2) continue;
        std::string ids;
        for (TransitionIndex t : ts) ids += (ids.empty() ? "" : ",") + net.transition(t).id;
        duplicates.push_back(label + " (" + ids + ")");
        for (std::size_t i = 0; i < ts.size(); ++i) {
            for (std::size_t j = i + 1; j < ts.size(); ++j) {
                const auto& a = net.transition(ts[i]);
                const auto& b = net.transition(ts[j]);
                for (PlaceIndex p : a.inputs) {
                    if (std::find(b.inputs.begin(), b.inputs.end(), p) != b.inputs.end())
                        warnings.push_back("transitions " + a.id + " and " + b.id + " share label '" + label +
                                           "' and input place " + net.places()[p] +
                                           "; model-semantics extension picks " + a.id);
                }
            }
        }
    }
    out << "duplicate labels: " << (duplicates.empty() ? "none" : "") ;
    for (std::size_t i = 0; i < duplicates.size(); ++i) out << (i ? "; " : "") << duplicates[i];
    out << '\n';
    for (const auto& w : warnings) out << "warning: " << w << '\n';

    if (!net.has_final_marking()) {
        out << "final marking: not declared\n";
        return ok;
    }
    out << "final marking: " << net.format(net.final_marking()) << '\n';
    std::unordered_set<Marking, MarkingHash> seen{net.initial_marking()};
    std::deque<Marking> frontier{net.initial_marking()};
    bool reachable = false;
    while (!frontier.empty() && !reachable && seen.size() < flags.max_markings) {
        const Marking m = frontier.front();
        frontier.pop_front();
        if (is_final(net, m)) {
            reachable = true;
            break;
        }
        for (TransitionIndex t : enabled_transitions(net, m)) {
            Marking next = fire(net, m, t);
            if (seen.insert(next).second) frontier.push_back(std::move(next));
        }
    }
    if (!reachable) {
        for (const auto& m : frontier) reachable = reachable || is_final(net, m);
    }
    out << "final marking reachability: ";
    if (reachable) {
        out << "reachable";
    } else if (frontier.empty()) {
        out << "unreachable";
    } else {
        out << "unknown";
    }
    out << " (" << seen.size() << " markings explored, limit " << flags.max_markings << ")\n";
    return ok;
}

// -- experiment ---------------------------------------------------------------

struct ExperimentFlags {
    std::string config, out;
    std::optional<std::size_t> jobs;
    std::optional<std::uint64_t> seed;
};

int cmd_experiment(const ExperimentFlags& flags, std::ostream& out) {
    if (flags.jobs && *flags.jobs < 1) throw UsageError("--jobs must be at least 1");
    ExperimentConfig config = load_experiment_config(flags.config);
    if (flags.jobs) config.jobs = *flags.jobs;
    if (flags.seed) {
        if (!config.synthetic) throw UsageError("--seed applies only to configs with a synthetic source");
        config.synthetic->seed = *flags.seed;
    }
    if (!flags.out.empty()) config.output_dir = flags.out;

    const ExperimentResult result = run_experiment(config);
    write_experiment_outputs(config, result);

    out << std::left << std::setw(28) << "policy" << std::right << std::setw(9) << "windows" << std::setw(12)
        << "peak_states" << std::setw(10) << "max_rmse" << std::setw(9) << "min_f1" << std::setw(12)
        << "sp_calls" << '\n';
    auto row = [&](const PolicyRun& run) {
        std::size_t peak = 0;
        double rmse = 0, f1 = 1;
        for (const auto& w : run.windows) {
            if (w.failed) continue;
            peak = std::max(peak, w.max_stored_states);
            rmse = std::max(rmse, w.rmse_fitness);
            f1 = std::min(f1, w.f1_classification);
        }
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-28s%9zu%12zu%10.4f%9.4f%12zu", run.name.c_str(), run.windows.size(), peak,
                      rmse, f1, run.shortest_path_count);
        out << buf << (run.failure ? "  FAILED: " + *run.failure : std::string()) << '\n';
    };
    row(result.baseline);
    for (const auto& run : result.runs) row(run);
    out << "wrote " << result.runs.size() + 1 << " CSV files and manifest.json to " << config.output_dir.string()
        << '\n';
    return ok;
}

// -- generate -----------------------------------------------------------------

struct GenerateFlags {
    std::string log_out, model_out;
    std::uint64_t seed = 42;
    std::size_t cases = 1000;
    double noise = 0.3;
};

int cmd_generate(const GenerateFlags& flags, std::ostream& out) {
    if (flags.noise < 0 || flags.noise > 1) throw UsageError("--noise must lie in [0, 1]");
    const PetriNet net = synthetic::reference_process_net();
    synthetic::StreamOptions options;
    options.seed = flags.seed;
    options.cases = flags.cases;
    options.noise_rate = flags.noise;
    options.playout.weights = {{"H", 0.6}};
    const EventLog log = synthetic::generate_log(net, options);
    {
        Sink sink(flags.log_out, out);
        write_csv_log(sink.stream(), log);
    }
    if (!flags.model_out.empty()) {
        Sink sink(flags.model_out, out);
        write_pnml(sink.stream(), net, "reference_process");
    }
    return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Online conformance checking of event streams under bounded memory", "streamcc"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", library_version());

    CheckFlags check;
    auto* check_cmd = app.add_subcommand("check", "Replay a log through one memory policy and report per-case costs");
    check_cmd->add_option("--model", check.model, "PNML model")->required();
    check_cmd->add_option("--log", check.log, "CSV or XES event log")->required();
    check_cmd->add_option("--policy", check.policy, "baseline | bounded-states | bounded-cases | combined")
        ->capture_default_str();
    check_cmd->add_option("--w", check.w, "state limit per case");
    check_cmd->add_option("--n", check.n, "case limit");
    check_cmd->add_option("--out", check.out, "output file (default: stdout)");
    check_cmd->add_option("--format", check.format, "csv | json")->capture_default_str();
    check_cmd->add_option("--final-marking", check.final_marking, "JSON final marking overriding the PNML one")
        ;
    check_cmd->add_option("--max-expansions", check.max_expansions, "search budget per event")
        ->capture_default_str();
    check.columns.attach(check_cmd);

    ReplayFlags replay_flags;
    auto* replay_cmd = app.add_subcommand("replay", "Print the timestamp-ordered event stream of a log");
    replay_cmd->add_option("--log", replay_flags.log, "CSV or XES event log")->required();
    replay_cmd->add_flag("--paced", replay_flags.paced, "sleep between events in proportion to timestamp gaps");
    replay_cmd->add_option("--speedup", replay_flags.speedup, "log time per wall-clock time when paced")
        ->capture_default_str();
    replay_cmd->add_option("--max-sleep-ms", replay_flags.max_sleep_ms, "upper bound on a single pause")
        ->capture_default_str();
    replay_cmd->add_option("--replicate", replay_flags.replicate, "sequential copies with renamed cases")
        ->capture_default_str();
    replay_cmd->add_option("--out", replay_flags.out, "output file (default: stdout)");
    replay_flags.columns.attach(replay_cmd);

    ValidateFlags validate;
    auto* validate_cmd = app.add_subcommand("validate-model", "Report structure and hazards of a PNML model");
    validate_cmd->add_option("--model", validate.model, "PNML model")->required();
    validate_cmd->add_option("--final-marking", validate.final_marking, "JSON final marking")
        ;
    validate_cmd->add_option("--max-markings", validate.max_markings, "reachability exploration bound")
        ->capture_default_str();

    ExperimentFlags experiment;
    auto* experiment_cmd = app.add_subcommand("experiment", "Run a policy comparison and write per-window metrics");
    experiment_cmd->add_option("--config", experiment.config, "experiment JSON")->required();
    experiment_cmd->add_option("--jobs", experiment.jobs, "worker threads");
    experiment_cmd->add_option("--seed", experiment.seed, "seed of the synthetic source");
    experiment_cmd->add_option("--out", experiment.out, "output directory (overrides the config)");

    GenerateFlags generate;
    auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic log of the reference process");
    generate_cmd->add_option("--log-out", generate.log_out, "CSV destination")->required();
    generate_cmd->add_option("--model-out", generate.model_out, "also write the reference model as PNML");
    generate_cmd->add_option("--seed", generate.seed, "random seed")->capture_default_str();
    generate_cmd->add_option("--cases", generate.cases, "number of cases")->capture_default_str();
    generate_cmd->add_option("--noise", generate.noise, "probability of a noisy case")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage_error;
    }

    try {
        if (*check_cmd) return cmd_check(check, out, err);
        if (*replay_cmd) return cmd_replay(replay_flags, out);
        if (*validate_cmd) return cmd_validate_model(validate, out);
        if (*experiment_cmd) return cmd_experiment(experiment, out);
        if (*generate_cmd) return cmd_generate(generate, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    } catch (const SearchBudgetExceeded& e) {
        err << "error: " << e.what() << '\n';
        return search_budget;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return library_error;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return internal_error;
    }
    return usage_error;
}

}  // namespace streamcc::cli
