#include "streamcc/synthetic.hpp"

#include <algorithm>
#include <set>

#include "streamcc/errors.hpp"

namespace streamcc::synthetic {

PetriNet sequence_net(const std::vector<std::string>& labels) {
    PetriNetBuilder b;
    auto place_name = [&](std::size_t i) {
        if (i == 0) return std::string("s");
        if (i == labels.size()) return std::string("f");
        return "q" + std::to_string(i);
    };
    for (std::size_t i = 0; i <= labels.size(); ++i) b.place(place_name(i), i == 0 ? 1 : 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::string id = "t" + std::to_string(i + 1);
        b.transition(id, labels[i]);
        b.arc(place_name(i), id);
        b.arc(id, place_name(i + 1));
    }
    b.final_tokens(place_name(labels.size()));
    return b.build();
}

PetriNet reference_process_net() {
    PetriNetBuilder b;
    b.place("start", 1).place("registered").place("assessed").place("left").place("right");
    b.place("left_done").place("right_done").place("reviewed").place("end");
    auto t = [&](const std::string& id, const std::string& label, std::vector<std::string> in,
                 std::vector<std::string> out) {
        b.transition(id, label);
        for (auto& p : in) b.arc(p, id);
        for (auto& p : out) b.arc(id, p);
    };
    t("t_a", "A", {"start"}, {"registered"});
    t("t_b", "B", {"registered"}, {"assessed"});
    t("t_c", "C", {"registered"}, {"assessed"});
    t("t_d", "D", {"assessed"}, {"left", "right"});
    t("t_e", "E", {"left"}, {"left_done"});
    t("t_f", "F", {"right"}, {"right_done"});
    t("t_g", "G", {"left_done", "right_done"}, {"reviewed"});
    t("t_h", "H", {"reviewed"}, {"assessed"});
    t("t_i", "I", {"reviewed"}, {"end"});
    b.final_tokens("end");
    return b.build();
}

namespace {

double uniform(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace

PetriNet random_block_net(std::mt19937_64& rng, const RandomNetOptions& options) {
    PetriNetBuilder b;
    std::vector<std::string> used_labels;
    std::size_t next_fresh = 0;
    std::size_t transition_count = 0;
    std::size_t place_count = 0;

    auto new_place = [&](std::uint32_t tokens = 0) {
        std::string id = "p" + std::to_string(place_count++);
        b.place(id, tokens);
        return id;
    };
    auto label = [&]() -> std::optional<std::string> {
        if (uniform(rng) < options.silent_probability) return std::nullopt;
        if (!used_labels.empty() && uniform(rng) < options.duplicate_label_probability)
            return used_labels[pick(rng, used_labels.size())];
        std::string l(1, static_cast<char>('A' + (next_fresh < options.alphabet ? next_fresh++ : pick(rng, options.alphabet))));
        used_labels.push_back(l);
        return l;
    };
    auto transition = [&](std::vector<std::string> in, std::vector<std::string> out) {
        std::string id = "t" + std::to_string(transition_count++);
        b.transition(id, label());
        for (auto& p : in) b.arc(p, id);
        for (auto& p : out) b.arc(id, p);
    };

    std::vector<int> blocks{0, 1, 2};
    std::shuffle(blocks.begin(), blocks.end(), rng);
    std::string cursor = new_place(1);
    for (int block : blocks) {
        std::string next = new_place();
        switch (block) {
            case 0:  // exclusive choice
                transition({cursor}, {next});
                transition({cursor}, {next});
                break;
            case 1: {  // concurrent branches
                std::string a1 = new_place(), a2 = new_place(), b1 = new_place(), b2 = new_place();
                transition({cursor}, {a1, b1});
                transition({a1}, {a2});
                transition({b1}, {b2});
                transition({a2, b2}, {next});
                break;
            }
            default:  // body with redo
                transition({cursor}, {next});
                transition({next}, {cursor});
                break;
        }
        cursor = next;
    }
    b.final_tokens(cursor);
    return b.build();
}

std::vector<std::string> playout(const PetriNet& net, std::mt19937_64& rng, const PlayoutOptions& options) {
    std::vector<std::string> trace;
    Marking m = net.initial_marking();
    std::size_t firings = 0;
    while (trace.size() < options.max_length && firings < options.max_length * 4) {
        if (net.has_final_marking() && is_final(net, m)) break;
        auto enabled = enabled_transitions(net, m);
        if (enabled.empty()) break;
        std::vector<double> weights;
        for (TransitionIndex t : enabled) {
            const auto& l = net.transition(t).label;
            auto it = l ? options.weights.find(*l) : options.weights.end();
            weights.push_back(it == options.weights.end() ? 1.0 : it->second);
        }
        std::discrete_distribution<std::size_t> choose(weights.begin(), weights.end());
        TransitionIndex t = enabled[choose(rng)];
        m = fire(net, m, t);
        ++firings;
        if (const auto& l = net.transition(t).label) trace.push_back(*l);
    }
    return trace;
}

const char* to_string(NoiseKind kind) noexcept {
    switch (kind) {
        case NoiseKind::insert_foreign: return "insert";
        case NoiseKind::remove: return "remove";
        case NoiseKind::swap: return "swap";
        case NoiseKind::duplicate: return "duplicate";
        case NoiseKind::replace: return "replace";
    }
    return "?";
}

NoiseKind parse_noise_kind(const std::string& name) {
    for (NoiseKind k : {NoiseKind::insert_foreign, NoiseKind::remove, NoiseKind::swap, NoiseKind::duplicate,
                        NoiseKind::replace}) {
        if (name == to_string(k)) return k;
    }
    throw ValidationError("unknown noise kind '" + name + "'");
}

void inject_noise(std::vector<std::string>& trace, std::mt19937_64& rng, const std::vector<NoiseKind>& kinds,
                  const std::vector<std::string>& alphabet, std::size_t min_position) {
    if (kinds.empty() || trace.size() <= min_position) return;
    const NoiseKind kind = kinds[pick(rng, kinds.size())];
    const std::size_t pos = min_position + pick(rng, trace.size() - min_position);
    switch (kind) {
        case NoiseKind::insert_foreign: trace.insert(trace.begin() + static_cast<std::ptrdiff_t>(pos), "X"); break;
        case NoiseKind::remove:
            if (trace.size() > 1) trace.erase(trace.begin() + static_cast<std::ptrdiff_t>(pos));
            break;
        case NoiseKind::swap:
            if (pos + 1 < trace.size()) std::swap(trace[pos], trace[pos + 1]);
            break;
        case NoiseKind::duplicate:
            trace.insert(trace.begin() + static_cast<std::ptrdiff_t>(pos), trace[pos]);
            break;
        case NoiseKind::replace:
            if (!alphabet.empty()) trace[pos] = alphabet[pick(rng, alphabet.size())];
            break;
    }
}

std::vector<std::string> alphabet_of(const PetriNet& net) {
    std::set<std::string> labels;
    for (const auto& t : net.transitions()) {
        if (t.label) labels.insert(*t.label);
    }
    return {labels.begin(), labels.end()};
}

EventLog generate_log(const PetriNet& net, const StreamOptions& options) {
    using namespace std::chrono;
    std::mt19937_64 rng(options.seed);
    const auto alphabet = alphabet_of(net);
    std::exponential_distribution<double> gap(1.0 / options.mean_event_gap);
    const Timestamp origin = Timestamp{sys_days{year{2021} / 10 / 1}};

    EventLog log;
    for (std::size_t c = 0; c < options.cases; ++c) {
        auto trace = playout(net, rng, options.playout);
        if (uniform(rng) < options.noise_rate) inject_noise(trace, rng, options.noise_kinds, alphabet, 1);
        double t = static_cast<double>(c) * options.case_spacing + uniform(rng) * options.case_spacing;
        for (const auto& activity : trace) {
            Event e;
            e.case_id = "c" + std::to_string(c + 1);
            e.activity = activity;
            e.timestamp = origin + seconds(static_cast<std::int64_t>(t));
            log.events.push_back(std::move(e));
            t += 1.0 + gap(rng);
        }
    }
    std::stable_sort(log.events.begin(), log.events.end(),
                     [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
    for (std::size_t i = 0; i < log.events.size(); ++i) log.events[i].event_id = i + 1;
    return log;
}

}  // namespace streamcc::synthetic
