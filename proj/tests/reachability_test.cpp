#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include <json.hpp>

#include "lexcontra/reachability.hpp"
#include "test_support.hpp"

using namespace lexcontra;

namespace {

Genotype geno(std::vector<int> v) { return Genotype{std::move(v)}; }

ModelParams small(std::uint64_t S, std::size_t D, int L) {
    ModelParams p;
    p.S = S;
    p.D = D;
    p.L = L;
    p.G = 50;
    p.mu = 0.1;
    p.t = 0.5;
    return p;
}

ReachGraph hand_graph(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges) {
    ReachGraph g;
    for (std::size_t i = 0; i < n; ++i) {
        ReachNode node;
        node.state = ReachState::make({geno({static_cast<int>(i)})});
        node.explored = true;
        g.nodes.push_back(node);
    }
    g.edges = std::move(edges);
    return g;
}

}  // namespace

TEST_CASE("state construction") {
    const auto s = ReachState::make({geno({1, 0}), geno({0, 0}), geno({1, 0})});
    CHECK(s.members == std::vector{geno({0, 0}), geno({1, 0})});
    CHECK(s.contains(geno({1, 0})));
    CHECK_FALSE(s.contains(geno({0, 1})));
    CHECK_THROWS_AS(ReachState::make({}), std::invalid_argument);
    CHECK(ReachState::make({geno({0, 2})}).contains_optimum(2));
    CHECK_FALSE(ReachState::make({geno({1, 2})}).contains_optimum(2));
}

TEST_CASE("survival filter") {
    const auto params = small(5, 3, 2);
    const auto zero = ReachState::make({zero_genotype(3)});
    CHECK(survival_filter(zero, params) == zero);

    // The mutant wins one objective in three and cannot persist at S = 5.
    const auto pair = ReachState::make({zero_genotype(3), geno({1, 0, 0})});
    CHECK(survival_filter(pair, params) == zero);

    ModelParams harsh = small(5, 20, 1);
    harsh.G = 50'000;
    CHECK_FALSE(survival_filter(ReachState::make(pareto_genotypes(20, 1)), harsh).has_value());

    SUBCASE("idempotent on random states") {
        Rng rng(12);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t D = 2 + uniform_index(rng, 3);
            const auto p = small(5 + 10 * uniform_index(rng, 4), D, 3);
            std::vector<Genotype> members;
            for (std::size_t k = 0; k < 1 + uniform_index(rng, 5); ++k)
                members.push_back(testing::random_genotype(rng, D, 3));
            const auto once = survival_filter(ReachState::make(members), p);
            if (!once) continue;
            CHECK(survival_filter(*once, p) == once);
            for (const auto& m : evaluate_members(once->members, p)) CHECK(m.survival >= p.t);
        }
    }
}

TEST_CASE("successors examples") {
    const auto zero = ReachState::make({zero_genotype(3)});
    CHECK(successors(zero, small(5, 3, 2)) == std::vector{zero});

    const auto next = successors(zero, small(30, 3, 2));
    std::vector<ReachState> expected{zero};
    for (const auto& g : adjacent_genotypes(zero_genotype(3), 2))
        expected.push_back(ReachState::make({zero_genotype(3), g}));
    std::sort(expected.begin(), expected.end());
    CHECK(next == expected);
}

TEST_CASE("explore examples") {
    SUBCASE("starting on an optimum") {
        const auto g = explore(ReachState::make({geno({2, 0, 0})}), small(5, 3, 2));
        CHECK(g.classification == Reachability::reachable);
        CHECK(g.nodes.size() == 1);
        CHECK(g.budget_used == 0);
    }
    SUBCASE("infeasible small landscape is closed and unreachable") {
        const auto g = explore(ReachState::make({zero_genotype(3)}), small(5, 3, 2));
        CHECK(g.classification == Reachability::unreachable);
        CHECK(g.nodes.size() == 1);
        CHECK(g.frontier_size() == 0);
    }
    SUBCASE("feasible small landscape reaches an optimum") {
        const auto g = explore(ReachState::make({zero_genotype(3)}), small(30, 3, 2));
        CHECK(g.classification == Reachability::reachable);
        CHECK(std::any_of(g.nodes.begin(), g.nodes.end(),
                          [](const ReachNode& n) { return n.contains_optimum; }));
    }
    SUBCASE("tiny budget leaves the answer open") {
        const auto g = explore(ReachState::make({zero_genotype(3)}), small(30, 3, 4), 1);
        CHECK(g.classification == Reachability::indeterminate);
        CHECK(g.budget_used == 1);
        CHECK(g.frontier_size() > 0);
    }
}

TEST_CASE("unreachable verdicts are closed under re-expansion") {
    for (std::uint64_t S : {3u, 5u, 8u})
        for (std::size_t D : {3u, 4u})
            for (double eps : {0.0, 1.0}) {
                auto p = small(S, D, 3);
                p.epsilon = EpsilonPolicy::constant(eps);
                const auto g = explore(ReachState::make({zero_genotype(D)}), p);
                if (g.classification != Reachability::unreachable) continue;
                std::set<ReachState> known;
                for (const auto& n : g.nodes) {
                    CHECK(n.explored);
                    CHECK_FALSE(n.state.contains_optimum(p.L));
                    known.insert(n.state);
                }
                for (const auto& n : g.nodes)
                    for (const auto& s : successors(n.state, p)) CHECK(known.count(s) == 1);
            }
}

TEST_CASE("exploration is deterministic") {
    auto p = small(30, 4, 4);
    p.epsilon = EpsilonPolicy::constant(1.0);
    const auto start = ReachState::make({zero_genotype(4)});
    CHECK(export_graph(explore(start, p, 200)) == export_graph(explore(start, p, 200)));
}

TEST_CASE("unreachable verdict agrees with simulation") {
    for (std::size_t D : {3u, 5u}) {
        auto p = small(5, D, 10);
        REQUIRE(explore(ReachState::make({zero_genotype(D)}), p).classification ==
                Reachability::unreachable);
        p.max_steps = 5'000;
        for (std::size_t r = 0; r < 30; ++r) {
            ModelParams q = p;
            q.seed = replicate_seed(p, r);
            CHECK_FALSE(run(q).found_optimum);
        }
    }
}

TEST_CASE("short landscapes escape the threshold abstraction") {
    // At L = 2 the resident can be lost while a single mutant is kept; the
    // lone specialist is then unopposed and climbs two steps to an optimum.
    auto p = small(5, 3, 2);
    REQUIRE(explore(ReachState::make({zero_genotype(3)}), p).classification ==
            Reachability::unreachable);
    p.max_steps = 2'000;
    p.seed = 1;
    CHECK(run(p).found_optimum);
}

TEST_CASE("graph export") {
    const auto g = explore(ReachState::make({zero_genotype(3)}), small(30, 3, 2));
    const auto doc = nlohmann::json::parse(export_graph(g, 2));
    CHECK(doc["nodes"].size() == g.nodes.size());
    CHECK(doc["edges"].size() == g.edges.size());
    CHECK(doc["classification"] == "reachable");
    CHECK(doc["budget_used"] == g.budget_used);
    const auto& first = doc["nodes"][0];
    CHECK(first["genotypes"] == nlohmann::json::array({nlohmann::json::array({0, 0, 0})}));
    CHECK(first["x"] == 1);
    CHECK(first["y"] == 0);
    for (const auto& e : doc["edges"]) CHECK(e["from"].get<std::size_t>() < g.nodes.size());
}

TEST_CASE("scc, cycles and sinks on hand-built graphs") {
    SUBCASE("chain") {
        const auto g = hand_graph(3, {{0, 1}, {1, 2}, {2, 2}});
        CHECK(strongly_connected_components(g).size() == 3);
        CHECK_FALSE(has_cycle_excluding_self_loops(g));
        CHECK(sink_nodes(g) == std::vector<std::size_t>{2});
    }
    SUBCASE("loop with a tail") {
        const auto g = hand_graph(4, {{0, 1}, {1, 2}, {2, 0}, {2, 3}});
        const auto sccs = strongly_connected_components(g);
        CHECK(sccs == std::vector<std::vector<std::size_t>>{{0, 1, 2}, {3}});
        CHECK(has_cycle_excluding_self_loops(g));
        CHECK(sink_nodes(g) == std::vector<std::size_t>{3});
    }
    SUBCASE("unexplored nodes are not sinks") {
        auto g = hand_graph(2, {{0, 1}});
        g.nodes[1].explored = false;
        CHECK(sink_nodes(g).empty());
    }
}
