#include "streamcc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "streamcc/errors.hpp"
#include "streamcc/pnml.hpp"

#ifndef STREAMCC_VERSION
#define STREAMCC_VERSION "0.0.0"
#endif

namespace streamcc {

std::string library_version() { return STREAMCC_VERSION; }

void ExperimentConfig::validate() const {
    if (window_size < 1) throw ValidationError("window_size must be at least 1");
    if (replication < 1) throw ValidationError("replication must be at least 1");
    if (jobs < 1) throw ValidationError("jobs must be at least 1");
    if (!synthetic && (model.empty() || log.empty()))
        throw ValidationError("experiment needs \"model\" and \"log\" paths or a \"synthetic\" block");
    for (const auto& p : policies) {
        if (p.name.empty() || p.name.find_first_of("/\\") != std::string::npos)
            throw ValidationError("policy name '" + p.name + "' is not usable as a file name");
        try {
            p.config.validate();
        } catch (const ValidationError& e) {
            throw ValidationError("policy '" + p.name + "': " + e.what());
        }
    }
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return (path.is_absolute() || base.empty() ? path : base / path).lexically_normal();
}

std::size_t positive_size(const nlohmann::json& v, const char* what) {
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ValidationError(std::string(what) + " must be a non-negative integer");
    return v.get<std::size_t>();
}

std::vector<std::size_t> size_list(const nlohmann::json& v, const char* what) {
    std::vector<std::size_t> out;
    if (!v.is_array()) throw ValidationError(std::string(what) + " must be an array");
    for (const auto& x : v) out.push_back(positive_size(x, what));
    return out;
}

}  // namespace

ExperimentConfig parse_experiment_config(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw ParseError("experiment config must be a JSON object");
    ExperimentConfig config;
    try {
        if (doc.contains("model")) config.model = resolve(base_dir, doc["model"].get<std::string>());
        if (doc.contains("final_marking"))
            config.final_marking = resolve(base_dir, doc["final_marking"].get<std::string>());
        if (doc.contains("log")) config.log = resolve(base_dir, doc["log"].get<std::string>());
        if (doc.contains("columns")) {
            const auto& c = doc["columns"];
            config.columns.case_id = c.value("case_id", config.columns.case_id);
            config.columns.activity = c.value("activity", config.columns.activity);
            config.columns.timestamp = c.value("timestamp", config.columns.timestamp);
        }
        if (doc.contains("synthetic")) {
            const auto& s = doc["synthetic"];
            SyntheticSource src;
            src.seed = s.value("seed", src.seed);
            src.cases = s.value("cases", src.cases);
            src.noise_rate = s.value("noise_rate", src.noise_rate);
            if (s.contains("noise_kinds")) {
                src.noise_kinds.clear();
                for (const auto& k : s["noise_kinds"]) src.noise_kinds.push_back(synthetic::parse_noise_kind(k.get<std::string>()));
            }
            config.synthetic = src;
        }
        CostModel costs;
        if (doc.contains("costs")) {
            const auto& c = doc["costs"];
            costs.sync_cost = c.value("sync", costs.sync_cost);
            costs.log_cost = c.value("log", costs.log_cost);
            costs.model_cost = c.value("model", costs.model_cost);
            costs.silent_model_cost = c.value("silent", costs.silent_model_cost);
        }
        if (doc.contains("policies")) {
            for (const auto& p : doc["policies"]) {
                NamedPolicy np;
                np.config.policy = parse_policy_kind(p.at("policy").get<std::string>());
                if (p.contains("w")) np.config.w = positive_size(p["w"], "w");
                if (p.contains("n")) np.config.n = positive_size(p["n"], "n");
                np.config.cost_model = costs;
                np.name = p.value("name", np.config.describe());
                std::replace(np.name.begin(), np.name.end(), ' ', '-');
                std::erase(np.name, '=');
                config.policies.push_back(std::move(np));
            }
        }
        if (doc.contains("policy_grid")) {
            const auto& g = doc["policy_grid"];
            if (g.contains("bounded_states")) {
                for (auto w : size_list(g["bounded_states"].at("w"), "w"))
                    config.policies.push_back({"bounded-states-w" + std::to_string(w), PolicyConfig::bounded_states(w, costs)});
            }
            if (g.contains("bounded_cases")) {
                for (auto n : size_list(g["bounded_cases"].at("n"), "n"))
                    config.policies.push_back({"bounded-cases-n" + std::to_string(n), PolicyConfig::bounded_cases(n, costs)});
            }
            if (g.contains("combined")) {
                const auto ws = size_list(g["combined"].at("w"), "w");
                const auto ns = size_list(g["combined"].at("n"), "n");
                for (auto w : ws) {
                    for (auto n : ns)
                        config.policies.push_back({"combined-w" + std::to_string(w) + "-n" + std::to_string(n),
                                                   PolicyConfig::combined(n, w, costs)});
                }
            }
        }
        if (doc.contains("window_size")) config.window_size = positive_size(doc["window_size"], "window_size");
        if (doc.contains("replication")) config.replication = positive_size(doc["replication"], "replication");
        if (doc.contains("jobs")) config.jobs = positive_size(doc["jobs"], "jobs");
        if (doc.contains("output_dir")) config.output_dir = resolve(base_dir, doc["output_dir"].get<std::string>());
        if (doc.contains("max_expansions"))
            config.search.max_expansions = positive_size(doc["max_expansions"], "max_expansions");
        if (doc.contains("heuristic")) config.search.use_heuristic = doc["heuristic"].get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid experiment config: ") + e.what());
    }
    config.validate();
    return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open experiment config '" + path.string() + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid experiment config JSON: ") + e.what());
    }
    return parse_experiment_config(doc, path.parent_path());
}

nlohmann::json to_json(const ExperimentConfig& config) {
    nlohmann::json doc;
    if (config.synthetic) {
        nlohmann::json kinds = nlohmann::json::array();
        for (auto k : config.synthetic->noise_kinds) kinds.push_back(synthetic::to_string(k));
        doc["synthetic"] = {{"seed", config.synthetic->seed},
                            {"cases", config.synthetic->cases},
                            {"noise_rate", config.synthetic->noise_rate},
                            {"noise_kinds", kinds}};
    } else {
        doc["model"] = config.model.string();
        doc["log"] = config.log.string();
        if (config.final_marking) doc["final_marking"] = config.final_marking->string();
        doc["columns"] = {{"case_id", config.columns.case_id},
                          {"activity", config.columns.activity},
                          {"timestamp", config.columns.timestamp}};
    }
    if (!config.policies.empty()) {
        const CostModel& c = config.policies.front().config.cost_model;
        doc["costs"] = {{"sync", c.sync_cost}, {"log", c.log_cost}, {"model", c.model_cost}, {"silent", c.silent_model_cost}};
    }
    doc["policies"] = nlohmann::json::array();
    for (const auto& p : config.policies) {
        nlohmann::json entry{{"name", p.name}, {"policy", to_string(p.config.policy)}};
        if (p.config.w) entry["w"] = *p.config.w;
        if (p.config.n) entry["n"] = *p.config.n;
        doc["policies"].push_back(entry);
    }
    doc["window_size"] = config.window_size;
    doc["replication"] = config.replication;
    doc["output_dir"] = config.output_dir.string();
    doc["max_expansions"] = config.search.max_expansions;
    doc["heuristic"] = config.search.use_heuristic;
    doc["jobs"] = config.jobs;
    return doc;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    PetriNet net;
    EventLog log;
    if (config.synthetic) {
        net = synthetic::reference_process_net();
        synthetic::StreamOptions options;
        options.seed = config.synthetic->seed;
        options.cases = config.synthetic->cases;
        options.noise_rate = config.synthetic->noise_rate;
        options.noise_kinds = config.synthetic->noise_kinds;
        options.playout.weights = {{"H", 0.6}};
        log = synthetic::generate_log(net, options);
    } else {
        PnmlOptions options;
        if (config.final_marking) options.final_marking = load_final_marking_file(*config.final_marking);
        net = load_pnml_file(config.model, options);
        log = load_log_file(config.log, config.columns);
    }

    const auto stream = replay(log);
    RunOptions run_options;
    run_options.window_size = config.window_size;
    run_options.search = config.search;
    run_options.jobs = config.jobs;
    ExperimentResult result = run_policies(net, stream, config.policies, run_options);

    if (config.replication > 1) {
        auto apply = [&](PolicyRun& run) {
            if (run.failure) return;
            const auto apte = measure_apte(net, log, run.config, config.replication, config.window_size, config.search);
            for (std::size_t w = 0; w < run.windows.size() && w < apte.size(); ++w) run.windows[w].apte = apte[w];
        };
        apply(result.baseline);
        for (auto& run : result.runs) apply(run);
    }
    return result;
}

void write_window_csv(std::ostream& out, const PolicyRun& run) {
    out << "window,events,max_states,rmse,f1,apte_us\n";
    char buf[160];
    for (const WindowStats& w : run.windows) {
        if (w.failed) {
            std::snprintf(buf, sizeof(buf), "%zu,%zu,NA,NA,NA,NA\n", w.window_index, w.events_in_window);
        } else {
            std::snprintf(buf, sizeof(buf), "%zu,%zu,%zu,%.6f,%.6f,%.3f\n", w.window_index, w.events_in_window,
                          w.max_stored_states, w.rmse_fitness, w.f1_classification, w.apte);
        }
        out << buf;
    }
}

nlohmann::json run_manifest(const ExperimentConfig& config, const ExperimentResult& result) {
    nlohmann::json manifest;
    manifest["config"] = to_json(config);
    manifest["library_version"] = library_version();
    manifest["comparison"] =
        "per window, cases that received an event in the window, compared at their last event of the window";
    manifest["stored_states"] = "per-window peak of states in D_C (summaries count 1) plus |R_C|";
    manifest["apte"] = config.replication > 1
                           ? "mean over " + std::to_string(config.replication) + " replications, microseconds"
                           : std::string("single run, microseconds");
    auto describe = [](const PolicyRun& run) {
        nlohmann::json r{{"name", run.name},
                         {"policy", run.config.describe()},
                         {"shortest_path_calls", run.shortest_path_count},
                         {"model_semantics_extensions", run.model_semantics_count}};
        if (run.failure) r["failure"] = *run.failure;
        return r;
    };
    manifest["baseline"] = describe(result.baseline);
    manifest["runs"] = nlohmann::json::array();
    for (const auto& run : result.runs) manifest["runs"].push_back(describe(run));

    nlohmann::json env;
#if defined(__clang__)
    env["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
    env["compiler"] = std::string("gcc ") + __VERSION__;
#endif
    env["cplusplus"] = __cplusplus;
    env["hardware_concurrency"] = std::thread::hardware_concurrency();
    env["clock"] = "std::chrono::steady_clock";
    env["clock_period_ns"] = 1e9 * static_cast<double>(std::chrono::steady_clock::period::num) /
                             static_cast<double>(std::chrono::steady_clock::period::den);
    env["generated_at_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
    manifest["timing_environment"] = env;
    return manifest;
}

void write_experiment_outputs(const ExperimentConfig& config, const ExperimentResult& result) {
    std::filesystem::create_directories(config.output_dir);
    auto write = [&](const PolicyRun& run) {
        std::ofstream out(config.output_dir / (run.name + ".csv"));
        if (!out) throw Error("cannot write " + (config.output_dir / (run.name + ".csv")).string());
        write_window_csv(out, run);
    };
    write(result.baseline);
    for (const auto& run : result.runs) {
        if (run.name == "baseline") continue;
        write(run);
    }
    std::ofstream manifest(config.output_dir / "manifest.json");
    manifest << std::setw(2) << run_manifest(config, result) << '\n';
}

}  // namespace streamcc
