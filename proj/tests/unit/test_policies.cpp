#include <doctest.h>

#include <random>

#include "streamcc/errors.hpp"
#include "streamcc/policies.hpp"
#include "support/nets.hpp"

using namespace streamcc;
using streamcc::testing::mark;

namespace {

CaseEvent ev(const std::string& c, const std::string& a, EventRef i) { return {c, a, i}; }

PrefixAlignment chain(const PetriNet& net, std::initializer_list<const char*> labels) {
    PrefixAlignment pa = empty_alignment(net);
    EventRef ref = 0;
    for (const char* l : labels) {
        if (!try_extend_model_semantics(net, pa, l, ref)) pa.states.push_back({Move::log(l, ref), 1.0, current_marking(pa)});
        ++ref;
    }
    return pa;
}

CaseRecord record(const CaseId& id, PrefixAlignment pa, std::uint64_t last, std::uint64_t events) {
    return CaseRecord{id, std::move(pa), last, events};
}

/// Literal single pass over the store in scan order.
CaseId scan_victim(const CaseStore& store) {
    const CaseRecord* best = nullptr;
    for (const CaseRecord& r : store.records()) {
        const auto p = forget_preference(r);
        if (p == ForgetPreference::compliant_monuple) return r.case_id;
        if (!best || p < forget_preference(*best)) best = &r;
    }
    return best->case_id;
}

}  // namespace

TEST_CASE("policy configuration") {
    CHECK_NOTHROW(PolicyConfig::baseline().validate());
    CHECK_NOTHROW(PolicyConfig::combined(100, 5).validate());
    CHECK_THROWS_AS(PolicyConfig::bounded_states(0).validate(), ValidationError);
    CHECK_THROWS_AS(PolicyConfig::bounded_cases(0).validate(), ValidationError);
    PolicyConfig stray = PolicyConfig::baseline();
    stray.w = 3;
    CHECK_THROWS_AS(stray.validate(), ValidationError);
    PolicyConfig missing{PolicyKind::combined, 3, std::nullopt, {}};
    CHECK_THROWS_AS(missing.validate(), ValidationError);
    CHECK(PolicyConfig::combined(100, 5).describe() == "combined w=5 n=100");
    CHECK(parse_policy_kind("bounded_states") == PolicyKind::bounded_states);
    CHECK(parse_policy_kind("bounded-cases") == PolicyKind::bounded_cases);
    CHECK_THROWS_AS(parse_policy_kind("lru"), ValidationError);
    CHECK_THROWS_AS(ConformanceEngine(testing::seq_abc(), PolicyConfig::bounded_states(0)), ValidationError);
}

TEST_CASE("truncate_states") {
    const PetriNet seq = testing::seq_abc();
    const PrefixAlignment abc = chain(seq, {"A", "B", "C"});

    auto t2 = truncate_states(abc, 2);
    CHECK(t2.size() == 2);
    REQUIRE(t2.summary);
    CHECK(t2.summary->kappa_o == 0);
    CHECK(t2.summary->carry_marking == mark(seq, {{"q2", 1}}));
    CHECK(t2.base_marking == mark(seq, {{"q2", 1}}));
    CHECK(t2.states.size() == 1);
    CHECK(*t2.states[0].move.activity == "C");

    auto t1 = truncate_states(abc, 1);
    CHECK(t1.summary);
    CHECK(t1.states.size() == 1);

    CHECK(truncate_states(abc, 3) == abc);
    CHECK(truncate_states(abc, 10) == abc);
    CHECK_THROWS_AS(truncate_states(abc, 0), ValidationError);

    const PrefixAlignment axb = chain(seq, {"A", "X", "B"});
    auto t = truncate_states(axb, 2);
    CHECK(t.summary->kappa_o == 1);
    CHECK(fitness_cost(t) == fitness_cost(axb));

    // Folding an existing summary accumulates its cost.
    auto again = truncate_states(chain(seq, {"X", "A", "Y", "B"}), 3);
    CHECK(again.summary->kappa_o == 1);
    again.states.push_back({Move::log("Z"), 1.0, current_marking(again)});
    again = truncate_states(again, 2);
    CHECK(again.summary->kappa_o == 2);
    CHECK(fitness_cost(again) == 3);
    CHECK(again.size() == 2);
}

TEST_CASE("effective cost and stored states") {
    const PetriNet seq = testing::seq_abc();
    CaseStore store;
    SummaryRepository repo;
    CHECK(stored_state_count(store, repo) == 0);
    store.upsert(record("c1", chain(seq, {"A", "B"}), 1, 2));
    store.upsert(record("c2", truncate_states(chain(seq, {"X", "A", "B"}), 2), 2, 3));
    repo.put("c3", SummaryState{2.0, {}}, 4);
    CHECK(store.state_count() == 4);
    CHECK(stored_state_count(store, repo) == 5);
    CHECK(effective_cost(*store.find("c2")) == 1);
    CHECK(repo.find("c3")->kappa_o == 2);
    CHECK(repo.take("c3")->event_count == 4);
    CHECK_FALSE(repo.contains("c3"));
    store.erase("c1");
    CHECK(store.state_count() == 2);
    CHECK_FALSE(store.erase("c1"));
}

TEST_CASE("forget preference classes") {
    const PetriNet seq = testing::seq_abc();
    CHECK(forget_preference(record("a", chain(seq, {"A"}), 0, 1)) == ForgetPreference::compliant_monuple);
    CHECK(forget_preference(record("b", chain(seq, {"X"}), 0, 1)) == ForgetPreference::non_conformant);
    CHECK(forget_preference(record("c", chain(seq, {"A", "B"}), 0, 2)) == ForgetPreference::conformant);
    CHECK(forget_preference(record("d", truncate_states(chain(seq, {"X", "A", "B"}), 2), 0, 3)) ==
          ForgetPreference::residual_cost);
    PrefixAlignment restored = empty_alignment(seq);
    restored.summary = SummaryState{0.0, mark(seq, {{"q1", 1}})};
    restored.base_marking = restored.summary->carry_marking;
    REQUIRE(try_extend_model_semantics(seq, restored, "B"));
    CHECK(forget_preference(record("e", restored, 0, 2)) == ForgetPreference::conformant);
}

TEST_CASE("victim selection examples") {
    const PetriNet seq = testing::seq_abc();
    CaseStore store;
    store.upsert(record("bad", chain(seq, {"X"}), 1, 1));
    store.upsert(record("fit", chain(seq, {"A", "B"}), 2, 2));
    CHECK(select_forget_victim(store) == "fit");
    store.upsert(record("residual", truncate_states(chain(seq, {"X", "A", "B"}), 2), 3, 3));
    CHECK(select_forget_victim(store) == "residual");
    store.upsert(record("mono", chain(seq, {"A"}), 4, 1));
    CHECK(select_forget_victim(store) == "mono");
    // Moving the monuple to the front keeps it the victim.
    store.upsert(record("mono", chain(seq, {"A"}), 0, 1));
    CHECK(select_forget_victim(store) == "mono");
    CHECK_THROWS_AS(select_forget_victim(CaseStore{}), Error);
}

TEST_CASE("indexed victim selection agrees with a literal scan") {
    std::mt19937_64 rng(21);
    const PetriNet seq = synthetic::sequence_net({"A", "B", "C", "D"});
    CaseStore store;
    for (int step = 0; step < 3000; ++step) {
        const CaseId id = "c" + std::to_string(rng() % 40);
        const auto roll = rng() % 10;
        if (roll == 0) {
            store.erase(id);
        } else {
            std::vector<const char*> pool{"A", "B", "C", "D", "X"};
            PrefixAlignment pa = empty_alignment(seq);
            const std::size_t len = 1 + rng() % 4;
            for (std::size_t i = 0; i < len; ++i) {
                const char* l = pool[rng() % pool.size()];
                if (!try_extend_model_semantics(seq, pa, l)) pa.states.push_back({Move::log(l), 1.0, current_marking(pa)});
            }
            if (rng() % 3 == 0) pa = truncate_states(pa, 1 + rng() % 2);
            const std::uint64_t last = rng() % 50;
            store.upsert(record(id, pa, last, len + (rng() % 2)));
        }
        if (!store.empty()) REQUIRE(select_forget_victim(store) == scan_victim(store));
        std::size_t states = 0;
        for (const auto& r : store.records()) states += r.alignment.size();
        REQUIRE(store.state_count() == states);
    }
}

TEST_CASE("records stay in least-recently-updated order") {
    const PetriNet seq = testing::seq_abc();
    CaseStore store;
    store.upsert(record("b", chain(seq, {"A"}), 5, 1));
    store.upsert(record("a", chain(seq, {"A"}), 5, 1));
    store.upsert(record("c", chain(seq, {"A"}), 2, 1));
    std::vector<std::string> order;
    for (const auto& r : store.records()) order.push_back(r.case_id);
    CHECK(order == std::vector<std::string>{"c", "a", "b"});
}

TEST_CASE("baseline processing") {
    const PetriNet seq = testing::seq_abc();
    CaseStore store;
    auto o = process_event_baseline(seq, store, ev("c1", "A", 0));
    CHECK(o.method == AlignmentMethod::model_semantics);
    CHECK(o.cost == 0);
    o = process_event_baseline(seq, store, ev("c1", "C", 1));
    CHECK(o.method == AlignmentMethod::shortest_path);
    CHECK(o.cost == 1);
    o = process_event_baseline(seq, store, ev("c2", "B", 2));
    CHECK(o.cost == 1);
    CHECK(store.size() == 2);
    CHECK(store.find("c1")->event_count == 2);
    CHECK(store.find("c1")->last_update == 1);
}

TEST_CASE("bounded-states with w = 1 and a deviating second event") {
    const PetriNet seq = testing::seq_abc();
    CaseStore store;
    process_event_bounded_states(seq, store, ev("c", "A", 0), 1);
    auto o = process_event_bounded_states(seq, store, ev("c", "X", 1), 1);
    CHECK(o.cost == 1);
    const CaseRecord& r = *store.find("c");
    REQUIRE(r.alignment.summary);
    CHECK(r.alignment.summary->carry_marking == mark(seq, {{"q1", 1}}));
    CHECK(r.alignment.states.size() == 1);
    o = process_event_bounded_states(seq, store, ev("c", "B", 2), 1);
    CHECK(o.cost == 1);
    CHECK(o.method == AlignmentMethod::model_semantics);
    CHECK_THROWS_AS(process_event_bounded_states(seq, store, ev("c", "C", 3), 0), ValidationError);
}

TEST_CASE("bounded-states forgets context the search would have used") {
    const PetriNet seq = testing::seq_abc();
    CaseStore full, bounded;
    const std::vector<CaseEvent> events{ev("c", "A", 0), ev("c", "B", 1), ev("c", "A", 2)};
    Cost last_full = 0, last_bounded = 0;
    for (const auto& e : events) {
        last_full = process_event_baseline(seq, full, e).cost;
        last_bounded = process_event_bounded_states(seq, bounded, e, 1).cost;
    }
    CHECK(last_full == 1);
    CHECK(last_bounded >= last_full);
}

TEST_CASE("bounded-cases with n = 1 hand trace") {
    const PetriNet seq = testing::seq_abc();
    CaseStore store(1);
    SummaryRepository repo;
    auto o = process_event_bounded_cases(seq, store, repo, ev("c1", "A", 0), 1);
    CHECK_FALSE(o.evicted);
    o = process_event_bounded_cases(seq, store, repo, ev("c2", "X", 1), 1);
    CHECK(o.evicted == std::optional<CaseId>("c1"));
    CHECK(repo.find("c1")->carry_marking == mark(seq, {{"q1", 1}}));
    CHECK(repo.find("c1")->kappa_o == 0);
    o = process_event_bounded_cases(seq, store, repo, ev("c1", "B", 2), 1);
    CHECK(o.restored);
    CHECK(o.evicted == std::optional<CaseId>("c2"));
    CHECK(o.cost == 0);
    CHECK(o.method == AlignmentMethod::model_semantics);
    CHECK(repo.find("c2")->kappa_o == 1);
    CHECK(store.size() == 1);
    CHECK(store.find("c1")->event_count == 2);
    CHECK(store.find("c1")->alignment.summary);
    CHECK(stored_state_count(store, repo) == 3);
    // Restored summaries keep their residual when the next event deviates.
    o = process_event_bounded_cases(seq, store, repo, ev("c2", "A", 3), 1);
    CHECK(o.cost == 1);
    CHECK(store.find("c2")->alignment.residual_cost() == 1);
}

TEST_CASE("combined policy on a fitting case is exact") {
    const PetriNet seq = testing::seq_abc();
    CaseStore store(1);
    SummaryRepository repo;
    EventRef i = 0;
    for (const char* c : {"c1", "c2"})
        for (const char* a : {"A", "B", "C"}) {
            auto o = process_event_combined(seq, store, repo, ev(c, a, i++), 1, 2);
            CHECK(o.cost == 0);
        }
    CHECK(store.find("c2")->alignment.size() <= 2);
    CHECK(repo.contains("c1"));
}

TEST_CASE("residual cost never decreases and bounds hold") {
    std::mt19937_64 rng(33);
    for (int round = 0; round < 20; ++round) {
        const PetriNet net = synthetic::random_block_net(rng);
        const auto stream = testing::random_stream(net, rng, 15, 150);
        const std::size_t n = 1 + rng() % 4, w = 1 + rng() % 4;
        ConformanceEngine engine(net, PolicyConfig::combined(n, w));
        std::map<CaseId, Cost> residual;
        for (const auto& e : stream) {
            engine.process(e.as_case_event());
            CHECK(engine.store().size() <= n);
            for (const auto& r : engine.store().records()) CHECK(r.alignment.size() <= std::max<std::size_t>(w, 2));
            for (auto& [id, value] : residual) {
                const Cost now = *engine.residual_cost(id);
                CHECK(now >= value);
                value = now;
            }
            residual[e.case_id] = *engine.residual_cost(e.case_id);
        }
    }
}

TEST_CASE("costs under any policy never undercut the baseline") {
    std::mt19937_64 rng(34);
    for (int round = 0; round < 20; ++round) {
        const PetriNet net = synthetic::random_block_net(rng);
        const auto stream = testing::random_stream(net, rng, 10, 120);
        ConformanceEngine baseline(net, PolicyConfig::baseline());
        ConformanceEngine states(net, PolicyConfig::bounded_states(2));
        ConformanceEngine cases(net, PolicyConfig::bounded_cases(2));
        for (const auto& e : stream) {
            const Cost b = baseline.process(e.as_case_event()).cost;
            CHECK(states.process(e.as_case_event()).cost >= b);
            CHECK(cases.process(e.as_case_event()).cost >= b);
        }
    }
}

TEST_CASE("a failed search leaves the case where it was") {
    const PetriNet net = testing::overview_net();
    SearchOptions tiny;
    tiny.max_expansions = 1;
    CaseStore store(1);
    SummaryRepository repo;
    process_event_bounded_cases(net, store, repo, ev("c1", "A", 0), 1, {}, tiny);
    process_event_bounded_cases(net, store, repo, ev("c2", "A", 1), 1, {}, tiny);
    REQUIRE(repo.contains("c1"));
    const SummaryState before = *repo.find("c1");
    try {
        process_event_bounded_cases(net, store, repo, ev("c1", "H", 2), 1, {}, tiny);
        FAIL("expected SearchBudgetExceeded");
    } catch (const SearchBudgetExceeded& e) {
        CHECK(e.case_id() == "c1");
    }
    REQUIRE(repo.contains("c1"));
    CHECK(*repo.find("c1") == before);

    CaseStore base;
    process_event_baseline(net, base, ev("c", "A", 0), {}, tiny);
    CHECK_THROWS_AS(process_event_baseline(net, base, ev("c", "H", 1), {}, tiny), SearchBudgetExceeded);
    CHECK(base.find("c")->alignment.states.size() == 1);
}

TEST_CASE("engine counters and lookups") {
    const PetriNet seq = testing::seq_abc();
    ConformanceEngine engine(seq, PolicyConfig::bounded_cases(1));
    engine.process(ev("c1", "A", 0));
    engine.process(ev("c2", "C", 1));
    CHECK(engine.model_semantics_count() == 1);
    CHECK(engine.shortest_path_count() == 1);
    CHECK(engine.case_cost("c1") == 0.0);
    CHECK(engine.case_cost("c2") == 1.0);
    CHECK_FALSE(engine.case_cost("c3"));
    CHECK(engine.stored_states() == 2);
}
