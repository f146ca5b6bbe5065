#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "streamcc/errors.hpp"
#include "streamcc/petri_net.hpp"
#include "support/nets.hpp"

using namespace streamcc;
using streamcc::testing::mark;

namespace {

std::vector<std::string> ids(const PetriNet& net, const std::vector<TransitionIndex>& ts) {
    std::vector<std::string> out;
    for (auto t : ts) out.push_back(net.transition(t).id);
    return out;
}

TransitionIndex tid(const PetriNet& net, const char* id) { return *net.transition_index(id); }

}  // namespace

TEST_CASE("markings are canonical multisets") {
    Marking a;
    a.add(3);
    a.add(1, 2);
    Marking b{{1, 2}, {3, 1}};
    CHECK(a == b);
    CHECK(a.hash() == b.hash());
    CHECK(a.count(1) == 2);
    CHECK(a.count(7) == 0);
    CHECK(a.total() == 3);
    CHECK(a.remove(3));
    CHECK_FALSE(a.remove(3));
    CHECK(a.entries().size() == 1);
    a.add(5, 0);
    CHECK(a.entries().size() == 1);
}

TEST_CASE("enabled transitions") {
    const PetriNet overview = testing::overview_net();
    CHECK(ids(overview, enabled_transitions(overview, overview.initial_marking())) == std::vector<std::string>{"t1"});
    CHECK(enabled_transitions(overview, Marking{}).empty());

    const PetriNet seq = testing::seq_abc();
    CHECK(ids(seq, enabled_transitions(seq, mark(seq, {{"q1", 1}}))) == std::vector<std::string>{"t2"});
    CHECK(is_enabled(seq, mark(seq, {{"s", 1}}), tid(seq, "t1")));
    CHECK_FALSE(is_enabled(seq, mark(seq, {{"s", 1}}), tid(seq, "t3")));
}

TEST_CASE("a transition without input places is always enabled") {
    PetriNetBuilder b;
    b.place("out").transition("source", "S").arc("source", "out");
    const PetriNet net = b.build();
    CHECK(enabled_transitions(net, Marking{}).size() == 1);
    const Marking m = fire(net, fire(net, Marking{}, 0), 0);
    CHECK(m.count(*net.place_index("out")) == 2);
}

TEST_CASE("firing") {
    const PetriNet overview = testing::overview_net();
    Marking m = fire(overview, overview.initial_marking(), tid(overview, "t1"));
    CHECK(m == mark(overview, {{"p1", 1}}));
    m = fire(overview, m, tid(overview, "t2"));
    m = fire(overview, m, tid(overview, "t3"));
    CHECK(m == mark(overview, {{"p3", 1}}));
    CHECK_FALSE(is_final(overview, m));
    m = fire(overview, m, tid(overview, "t4"));
    CHECK(is_final(overview, m));

    const PetriNet seq = testing::seq_abc();
    CHECK(fire(seq, mark(seq, {{"s", 1}}), tid(seq, "t1")) == mark(seq, {{"q1", 1}}));
    CHECK_THROWS_AS(fire(seq, mark(seq, {{"s", 1}}), tid(seq, "t2")), FiringNotEnabled);
}

TEST_CASE("AND-split puts a token on each branch") {
    const PetriNet overview = testing::overview_net();
    Marking m = fire(overview, mark(overview, {{"p1", 1}}), tid(overview, "t5"));
    CHECK(m == mark(overview, {{"p4", 1}, {"p5", 1}}));
    CHECK(ids(overview, enabled_transitions(overview, m)) == std::vector<std::string>{"t6", "t7"});
    m = fire(overview, fire(overview, m, tid(overview, "t7")), tid(overview, "t6"));
    CHECK(ids(overview, enabled_transitions(overview, m)) == std::vector<std::string>{"t8"});
}

TEST_CASE("final marking") {
    const PetriNet seq = testing::seq_abc();
    CHECK_FALSE(is_final(seq, mark(seq, {{"s", 1}})));
    CHECK(is_final(seq, mark(seq, {{"f", 1}})));
    CHECK_FALSE(is_final(seq, mark(seq, {{"f", 2}})));
    CHECK(seq.has_final_marking());
    CHECK(seq.format(seq.final_marking()) == "[f]");
    CHECK(seq.format(mark(seq, {{"q1", 2}, {"f", 1}})) == "[f,q1^2]");
}

TEST_CASE("indices follow sorted ids regardless of insertion order") {
    PetriNetBuilder a, b;
    a.place("x", 1).place("y").transition("t2", "B").transition("t1", "A").arc("x", "t1").arc("t1", "y").arc("y", "t2");
    b.place("y").place("x", 1).transition("t1", "A").transition("t2", "B").arc("y", "t2").arc("x", "t1").arc("t1", "y");
    const PetriNet na = a.build(), nb = b.build();
    CHECK(na.places() == nb.places());
    CHECK(na.transition(0).id == "t1");
    CHECK(nb.transition(0).id == "t1");
    CHECK(na.initial_marking() == nb.initial_marking());
}

TEST_CASE("labels index transitions in id order") {
    PetriNetBuilder b;
    b.place("p", 1).transition("t9", "A").transition("t3", "A").transition("t5", std::nullopt);
    b.arc("p", "t9").arc("p", "t3").arc("p", "t5");
    const PetriNet net = b.build();
    auto labeled = net.transitions_labeled("A");
    REQUIRE(labeled.size() == 2);
    CHECK(net.transition(labeled[0]).id == "t3");
    CHECK(net.transition(labeled[1]).id == "t9");
    CHECK(net.transitions_labeled("Z").empty());
    CHECK(net.transition(*net.transition_index("t5")).silent());
}

TEST_CASE("builder rejects malformed nets") {
    auto base = [] {
        PetriNetBuilder b;
        b.place("p", 1).place("q").transition("t", "A");
        return b;
    };
    CHECK_THROWS_AS(base().place("p").build(), ValidationError);
    CHECK_THROWS_AS(base().transition("p", "B").build(), ValidationError);
    CHECK_THROWS_AS(base().arc("p", "missing").build(), ValidationError);
    CHECK_THROWS_AS(base().arc("p", "q").build(), ValidationError);
    CHECK_THROWS_AS(base().transition("u", "B").arc("t", "u").build(), ValidationError);
    CHECK_THROWS_AS(base().arc("p", "t").arc("p", "t").build(), ValidationError);
    CHECK_THROWS_AS(base().final_tokens("nowhere").build(), ValidationError);
    CHECK_THROWS_AS(base().transition("u", "").build(), ValidationError);
    CHECK_NOTHROW(base().arc("p", "t").arc("t", "q").build());
}

TEST_CASE("markings from place ids") {
    const PetriNet seq = testing::seq_abc();
    CHECK_THROWS_AS(seq.marking({{"nope", 1}}), ValidationError);
    CHECK(seq.marking({{"q1", 0}}).empty());
    const auto named = seq.named(mark(seq, {{"q2", 3}}));
    CHECK(named.at("q2") == 3);
    CHECK(named.size() == 1);
}

TEST_CASE("firing changes the token count by outputs minus inputs") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        const PetriNet net = synthetic::random_block_net(rng);
        Marking m = net.initial_marking();
        for (int step = 0; step < 10; ++step) {
            const auto enabled = enabled_transitions(net, m);
            if (enabled.empty()) break;
            const TransitionIndex t = enabled[rng() % enabled.size()];
            const Marking next = fire(net, m, t);
            const auto& tr = net.transition(t);
            CHECK(static_cast<std::int64_t>(next.total()) - static_cast<std::int64_t>(m.total()) ==
                  static_cast<std::int64_t>(tr.outputs.size()) - static_cast<std::int64_t>(tr.inputs.size()));
            m = next;
        }
    }
}

TEST_CASE("firing only affects transitions adjacent to the fired one") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
        const PetriNet net = synthetic::random_block_net(rng);
        // Random markings, not only reachable ones.
        Marking m;
        for (PlaceIndex p = 0; p < net.places().size(); ++p)
            if (rng() % 2) m.add(p, 1 + rng() % 2);
        for (TransitionIndex t : enabled_transitions(net, m)) {
            const Marking next = fire(net, m, t);
            const auto& tr = net.transition(t);
            std::set<PlaceIndex> touched(tr.inputs.begin(), tr.inputs.end());
            touched.insert(tr.outputs.begin(), tr.outputs.end());
            for (TransitionIndex u = 0; u < net.transitions().size(); ++u) {
                const auto& other = net.transition(u);
                const bool adjacent = std::any_of(other.inputs.begin(), other.inputs.end(),
                                                  [&](PlaceIndex p) { return touched.count(p) > 0; });
                if (!adjacent) CHECK(is_enabled(net, m, u) == is_enabled(net, next, u));
            }
            CHECK_NOTHROW(enabled_transitions(net, next));
        }
    }
}
