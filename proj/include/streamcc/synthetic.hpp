#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "streamcc/event_stream.hpp"
#include "streamcc/petri_net.hpp"

namespace streamcc::synthetic {

/// Places s, q1, ..., f; transition i moves the token one step and carries labels[i].
PetriNet sequence_net(const std::vector<std::string>& labels);

/// A registration/assessment process with a choice, a concurrent block and a redo loop:
/// A (B|C) D (E||F) G (H D (E||F) G)* I. Labels are unique and there are no silent transitions.
PetriNet reference_process_net();

struct RandomNetOptions {
    std::size_t alphabet = 5;
    double silent_probability = 0.25;
    /// Probability that a labeled transition reuses an existing label.
    double duplicate_label_probability = 0.15;
};

/// Block-structured safe net with exactly one choice, one concurrent block and one loop,
/// in random order, using at most 8 transitions.
PetriNet random_block_net(std::mt19937_64& rng, const RandomNetOptions& options = {});

struct PlayoutOptions {
    /// Relative firing weight per label; unlisted transitions weigh 1.
    std::map<std::string, double> weights;
    std::size_t max_length = 64;
};

/// Random execution of the net from its initial marking until the final marking is
/// reached, no transition is enabled, or max_length labeled events were produced.
std::vector<std::string> playout(const PetriNet& net, std::mt19937_64& rng, const PlayoutOptions& options = {});

enum class NoiseKind { insert_foreign, remove, swap, duplicate, replace };

const char* to_string(NoiseKind kind) noexcept;
/// Accepts the names produced by to_string; throws ValidationError otherwise.
NoiseKind parse_noise_kind(const std::string& name);

/// Applies one random noise operation of the given kinds to `trace` at a position >= min_position.
void inject_noise(std::vector<std::string>& trace, std::mt19937_64& rng, const std::vector<NoiseKind>& kinds,
                  const std::vector<std::string>& alphabet, std::size_t min_position = 0);

struct StreamOptions {
    std::size_t cases = 1000;
    std::uint64_t seed = 42;
    /// Probability that a case receives a noise operation.
    double noise_rate = 0.3;
    std::vector<NoiseKind> noise_kinds{NoiseKind::insert_foreign, NoiseKind::remove};
    /// Seconds between consecutive case starts.
    double case_spacing = 60.0;
    /// Mean seconds between events of the same case.
    double mean_event_gap = 1800.0;
    PlayoutOptions playout;
};

/// Interleaved event log: each case is a playout of `net` (with optional noise), cases
/// start `case_spacing` apart and events follow exponential gaps.
EventLog generate_log(const PetriNet& net, const StreamOptions& options);

/// Labels occurring in the net, sorted.
std::vector<std::string> alphabet_of(const PetriNet& net);

}  // namespace streamcc::synthetic
