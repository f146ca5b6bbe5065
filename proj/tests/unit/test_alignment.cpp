#include <doctest.h>

#include <random>

#include "streamcc/alignment.hpp"
#include "streamcc/errors.hpp"
#include "streamcc/synthetic.hpp"
#include "support/nets.hpp"
#include "support/oracle.hpp"

using namespace streamcc;
using streamcc::testing::mark;

namespace {

std::vector<TraceEvent> trace_of(std::initializer_list<const char*> labels) {
    std::vector<TraceEvent> out;
    std::uint64_t ref = 0;
    for (const char* l : labels) out.push_back({l, ref++});
    return out;
}

/// Replays the moves of `pa` from its base marking and checks every recorded marking and cost.
void check_well_formed(const PetriNet& net, const PrefixAlignment& pa, const std::vector<TraceEvent>& trace,
                       const CostModel& costs = {}) {
    Marking m = pa.base_marking;
    std::size_t pos = 0;
    for (const AlignmentState& s : pa.states) {
        CHECK(s.move_cost == costs.of(s.move.kind));
        switch (s.move.kind) {
            case MoveKind::synchronous:
                REQUIRE(pos < trace.size());
                CHECK(*s.move.activity == trace[pos].activity);
                CHECK(net.transition(*s.move.transition).label == s.move.activity);
                m = fire(net, m, *s.move.transition);
                ++pos;
                break;
            case MoveKind::log:
                REQUIRE(pos < trace.size());
                CHECK(*s.move.activity == trace[pos].activity);
                ++pos;
                break;
            case MoveKind::model:
                CHECK_FALSE(net.transition(*s.move.transition).silent());
                m = fire(net, m, *s.move.transition);
                break;
            case MoveKind::silent_model:
                CHECK(net.transition(*s.move.transition).silent());
                m = fire(net, m, *s.move.transition);
                break;
        }
        CHECK(s.marking_after == m);
    }
    CHECK(pos == trace.size());
    REQUIRE((trace.empty() || !pa.states.empty()));
    if (!pa.states.empty()) CHECK(pa.states.back().move.consumes_event());
}

}  // namespace

TEST_CASE("costs") {
    PrefixAlignment pa;
    CHECK(fitness_cost(pa) == 0);
    pa.states = {{Move::log("X"), 0, {}}, {Move::log("Y"), 1, {}}, {Move::log("Z"), 0, {}}};
    CHECK(fitness_cost(pa) == 1);
    pa.states = {{Move::log("X"), 1, {}}};
    pa.summary = SummaryState{2, {}};
    CHECK(fitness_cost(pa) == 3);
    CHECK(pa.size() == 2);

    CostModel c;
    CHECK(c.of(MoveKind::synchronous) == 0);
    CHECK(c.of(MoveKind::log) == 1);
    CHECK(c.of(MoveKind::model) == 1);
    CHECK(c.of(MoveKind::silent_model) == 0);
    c.log_cost = -1;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("model-semantics extension") {
    const PetriNet seq = testing::seq_abc();
    auto pa = extend_model_semantics(seq, empty_alignment(seq), "A", 0);
    REQUIRE(pa);
    CHECK(pa->states.size() == 1);
    CHECK(pa->states[0].move.kind == MoveKind::synchronous);
    CHECK(current_marking(*pa) == mark(seq, {{"q1", 1}}));
    CHECK(fitness_cost(*pa) == 0);
    CHECK_FALSE(extend_model_semantics(seq, empty_alignment(seq), "C"));

    const PetriNet overview = testing::overview_net();
    auto ab = extend_model_semantics(overview, empty_alignment(overview), "A");
    REQUIRE(ab);
    ab = extend_model_semantics(overview, *ab, "B");
    REQUIRE(ab);
    CHECK(ab->states[1].move.transition == overview.transition_index("t2"));
    CHECK(fitness_cost(*ab) == 0);
    CHECK(testing::brute_force_cost(overview, overview.initial_marking(), {"A", "B"}) == 0);

    PrefixAlignment untouched = empty_alignment(seq);
    CHECK_FALSE(try_extend_model_semantics(seq, untouched, "B"));
    CHECK(untouched == empty_alignment(seq));
}

TEST_CASE("model-semantics picks the lowest transition id among duplicates") {
    PetriNetBuilder b;
    b.place("p", 1).place("x").place("y");
    b.transition("t_b", "A").transition("t_a", "A").transition("t_c", "B");
    b.arc("p", "t_b").arc("t_b", "x").arc("p", "t_a").arc("t_a", "y").arc("y", "t_c");
    const PetriNet net = b.build();
    auto pa = extend_model_semantics(net, empty_alignment(net), "A");
    REQUIRE(pa);
    CHECK(net.transition(*pa->states[0].move.transition).id == "t_a");
}

TEST_CASE("shortest-path prefix-alignment examples") {
    const PetriNet seq = testing::seq_abc();
    const auto start = seq.initial_marking();

    auto ab = trace_of({"A", "B"});
    auto pa = shortest_path_prefix_alignment(seq, start, ab);
    CHECK(pa.states.size() == 2);
    CHECK(fitness_cost(pa) == 0);
    CHECK(current_marking(pa) == mark(seq, {{"q2", 1}}));
    check_well_formed(seq, pa, ab);

    auto b = trace_of({"B"});
    pa = shortest_path_prefix_alignment(seq, start, b);
    CHECK(fitness_cost(pa) == 1);
    CHECK(testing::brute_force_cost(seq, start, {"B"}) == 1);
    REQUIRE(pa.states.size() == 1);
    CHECK(pa.states[0].move.kind == MoveKind::log);
    CHECK(current_marking(pa) == start);

    auto x = trace_of({"X"});
    pa = shortest_path_prefix_alignment(seq, start, x);
    REQUIRE(pa.states.size() == 1);
    CHECK(pa.states[0].move.kind == MoveKind::log);
    CHECK(fitness_cost(pa) == 1);

    auto axb = trace_of({"A", "X", "B"});
    pa = shortest_path_prefix_alignment(seq, start, axb);
    CHECK(fitness_cost(pa) == 1);
    check_well_formed(seq, pa, axb);

    pa = shortest_path_prefix_alignment(seq, start, {});
    CHECK(pa.states.empty());
}

TEST_CASE("search explores model moves when they pay off") {
    const PetriNet seq = synthetic::sequence_net({"A", "B", "C", "D"});
    auto t = trace_of({"A", "C", "D"});
    auto pa = shortest_path_prefix_alignment(seq, seq.initial_marking(), t);
    CHECK(fitness_cost(pa) == 1);
    check_well_formed(seq, pa, t);
    CHECK(std::count_if(pa.states.begin(), pa.states.end(),
                        [](const AlignmentState& s) { return s.move.kind == MoveKind::model; }) == 1);
}

TEST_CASE("silent transitions are free") {
    PetriNetBuilder b;
    b.place("p", 1).place("q").place("r");
    b.transition("t1", std::nullopt).transition("t2", "A");
    b.arc("p", "t1").arc("t1", "q").arc("q", "t2").arc("t2", "r");
    const PetriNet net = b.build();
    auto t = trace_of({"A"});
    auto pa = shortest_path_prefix_alignment(net, net.initial_marking(), t);
    CHECK(fitness_cost(pa) == 0);
    REQUIRE(pa.states.size() == 2);
    CHECK(pa.states[0].move.kind == MoveKind::silent_model);
    check_well_formed(net, pa, t);
}

TEST_CASE("projection and markings") {
    const PetriNet seq = testing::seq_abc();
    PrefixAlignment pa = empty_alignment(seq);
    CHECK(current_marking(pa) == seq.initial_marking());
    try_extend_model_semantics(seq, pa, "A", 7);
    const Marking before = current_marking(pa);
    pa.states.push_back({Move::log("Z", 8), 1, before});
    CHECK(current_marking(pa) == before);
    const auto projection = log_projection(pa);
    REQUIRE(projection.size() == 2);
    CHECK(projection[0].activity == "A");
    CHECK(projection[0].event_ref == 7u);
    CHECK(projection[1].activity == "Z");
}

TEST_CASE("search budget") {
    const PetriNet overview = testing::overview_net();
    auto t = trace_of({"X", "Y", "Z", "H"});
    SearchOptions tiny;
    tiny.max_expansions = 2;
    CHECK_THROWS_AS(shortest_path_prefix_alignment(overview, overview.initial_marking(), t, {}, tiny),
                    SearchBudgetExceeded);
    SearchStats stats;
    shortest_path_prefix_alignment(overview, overview.initial_marking(), t, {}, {}, &stats);
    CHECK(stats.expansions > 0);
    CHECK(stats.generated >= stats.expansions);
}

TEST_CASE("heuristic does not change optimal costs") {
    std::mt19937_64 rng(11);
    SearchOptions blind;
    blind.use_heuristic = false;
    for (int i = 0; i < 100; ++i) {
        const PetriNet net = synthetic::random_block_net(rng);
        synthetic::PlayoutOptions play;
        play.max_length = 8;
        auto labels = synthetic::playout(net, rng, play);
        synthetic::inject_noise(labels, rng, {synthetic::NoiseKind::swap, synthetic::NoiseKind::replace},
                                synthetic::alphabet_of(net));
        std::vector<TraceEvent> t;
        for (auto& l : labels) t.push_back({l, std::nullopt});
        const auto a = shortest_path_prefix_alignment(net, net.initial_marking(), t);
        const auto b = shortest_path_prefix_alignment(net, net.initial_marking(), t, {}, blind);
        CHECK(fitness_cost(a) == fitness_cost(b));
        check_well_formed(net, a, t);
    }
}

TEST_CASE("optimality against the brute-force oracle from arbitrary reachable markings") {
    std::mt19937_64 rng(12);
    const CostModel weighted{0.0, 2.0, 1.0, 0.0};
    for (int i = 0; i < 150; ++i) {
        const PetriNet net = synthetic::random_block_net(rng, {4, 0.3, 0.3});
        // Walk a few steps to obtain a non-initial start.
        Marking start = net.initial_marking();
        for (int s = 0; s < static_cast<int>(rng() % 3); ++s) {
            auto enabled = enabled_transitions(net, start);
            if (enabled.empty()) break;
            start = fire(net, start, enabled[rng() % enabled.size()]);
        }
        std::vector<std::string> labels;
        const auto alphabet = synthetic::alphabet_of(net);
        for (int k = 0; k < static_cast<int>(rng() % 6); ++k)
            labels.push_back(rng() % 5 == 0 || alphabet.empty() ? "X" : alphabet[rng() % alphabet.size()]);
        std::vector<TraceEvent> t;
        for (auto& l : labels) t.push_back({l, std::nullopt});
        const CostModel costs = i % 2 ? weighted : CostModel{};
        const auto pa = shortest_path_prefix_alignment(net, start, t, costs);
        CHECK(fitness_cost(pa) == testing::brute_force_cost(net, start, labels, costs));
        CHECK(pa.base_marking == start);
        check_well_formed(net, pa, t, costs);
    }
}
