#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "streamcc/metrics.hpp"
#include "streamcc/synthetic.hpp"

namespace streamcc {

/// Generated model and log used instead of files.
struct SyntheticSource {
    std::uint64_t seed = 42;
    std::size_t cases = 1000;
    double noise_rate = 0.3;
    std::vector<synthetic::NoiseKind> noise_kinds{synthetic::NoiseKind::insert_foreign, synthetic::NoiseKind::remove};
};

struct ExperimentConfig {
    std::filesystem::path model;
    std::optional<std::filesystem::path> final_marking;
    std::filesystem::path log;
    CsvColumns columns;
    std::optional<SyntheticSource> synthetic;
    std::vector<NamedPolicy> policies;
    std::size_t window_size = 1000;
    /// Replications used for the APTE measurement; 1 reuses the comparison run's timings.
    std::size_t replication = 1;
    std::filesystem::path output_dir = "results";
    SearchOptions search;
    std::size_t jobs = 1;

    /// Throws ValidationError for window_size or replication below 1 and invalid policies.
    void validate() const;
};

/// Reads the JSON experiment description. Relative paths resolve against the file's directory.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const ExperimentConfig& config);

/// Loads (or generates) the inputs, runs every policy and returns per-window statistics.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// `window,events,max_states,rmse,f1,apte_us`; failed windows carry `NA` metrics.
void write_window_csv(std::ostream& out, const PolicyRun& run);

/// Writes one CSV per policy plus `baseline.csv` and `manifest.json` into config.output_dir.
void write_experiment_outputs(const ExperimentConfig& config, const ExperimentResult& result);

nlohmann::json run_manifest(const ExperimentConfig& config, const ExperimentResult& result);

std::string library_version();

}  // namespace streamcc
