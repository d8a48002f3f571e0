// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "cli.hpp"
#include "lexcontra/probability.hpp"
#include "lexcontra/reachability.hpp"
#include "lexcontra/selection.hpp"
#include "lexcontra/stochastic_model.hpp"
#include "test_support.hpp"

using namespace lexcontra;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
    std::vector<std::string> notes;
};

ModelParams desk(std::uint64_t S, double eps = 0.0) {
    ModelParams p;
    p.S = S;
    p.D = 5;
    p.L = 10;
    p.G = 50;
    p.mu = 0.1;
    p.t = 0.5;
    p.epsilon = EpsilonPolicy::constant(eps);
    p.max_steps = 10'000;
    p.seed = 20'240'601;
    return p;
}

Verdict oracle_equivalence() {
    Rng rng(1);
    double worst = 0.0;
    const int pools = 240;
    for (int i = 0; i < pools; ++i) {
        const std::size_t D = 1 + uniform_index(rng, 5);
        const auto pop = testing::random_population(rng, D, 1 + uniform_index(rng, 6), -3, 3, 3);
        const std::vector<double> eps(D, static_cast<double>(i % 3));
        const auto fast = p_lex_all(pop, eps);
        const auto slow = p_lex_bruteforce_all(pop, eps);
        for (std::size_t k = 0; k < pop.size(); ++k) worst = std::max(worst, std::abs(fast[k] - slow[k]));
    }
    return {worst <= 1e-12, fmt::format("{} pools, max |diff| = {:.3g}", pools, worst), {}};
}

template <class F>
std::pair<unsigned, unsigned> crossing(F f) {
    unsigned D = 1;
    while (f(D + 1) >= 0.5) ++D;
    return {D, D + 1};
}

Verdict single_crossing() {
    const auto [last, first_below] = crossing(hernandez_single);
    return {last >= 45 && first_below <= 47,
            fmt::format("single(D) >= 0.5 up to D={} ({:.4f}), below from D={} ({:.4f})", last,
                        hernandez_single(last), first_below, hernandez_single(first_below)),
            {}};
}

Verdict joint_crossing() {
    const auto [last, first_below] = crossing(hernandez_joint);
    return {last >= 34 && first_below <= 36,
            fmt::format("joint(D) >= 0.5 up to D={} ({:.4f}), below from D={} ({:.4f})", last,
                        hernandez_joint(last), first_below, hernandez_joint(first_below)),
            {}};
}

Verdict feasibility_boundary() {
    const auto big = max_feasible_dimension({512, 50'000, 0.5});
    const auto small = max_feasible_dimension({10, 500, 0.5});
    const auto start = std::chrono::steady_clock::now();
    std::ostringstream csv, err;
    const int code = cli::run({"feasibility", "--grid", "--grid-min", "10", "--grid-max", "100000",
                               "--grid-points", "25", "--t", "0.5"},
                              csv, err);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto text = csv.str();
    const auto lines = std::count(text.begin(), text.end(), '\n');
    const bool ok = big && *big >= 45 && *big <= 47 && small == 2u && code == 0 && lines == 626 &&
                    secs < 5.0;
    return {ok,
            fmt::format("S=512,G=50000 -> {}; S=10,G=500 -> {}; grid {} rows in {:.3f} s",
                        big ? std::to_string(*big) : "unbounded",
                        small ? std::to_string(*small) : "unbounded", lines - 1, secs),
            {}};
}

Verdict infeasible_region() {
    const auto est = estimate_p_fail(desk(5), 30);
    return {est.p_fail == 1.0,
            fmt::format("S=5: {}/{} failures, p_fail = {}", est.failures, est.replicates, est.p_fail),
            {}};
}

Verdict feasible_region() {
    auto p = desk(30);
    p.max_steps = 100'000;
    const auto est = estimate_p_fail(p, 30);
    return {est.p_fail <= 0.5,
            fmt::format("S=30: {}/{} failures, p_fail = {:.3f} [{:.3f}, {:.3f}]", est.failures,
                        est.replicates, est.p_fail, est.ci.low, est.ci.high),
            {}};
}

Verdict monotone_in_S() {
    const auto rows = sweep({{5, 15, 30, 60}, {5}, {EpsilonPolicy::constant(0.0)}}, desk(5), 30);
    bool ok = true;
    std::string series;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        series += fmt::format("{}S={}:{:.3f}", i ? ", " : "", rows[i].params.S, rows[i].estimate.p_fail);
        if (i && rows[i].estimate.p_fail > rows[i - 1].estimate.p_fail + 0.15) ok = false;
    }
    return {ok, "p_fail " + series, {}};
}

Verdict reachability() {
    Verdict v;
    auto small = desk(5);
    small.D = 3;
    small.L = 2;
    const auto closed = explore(ReachState::make({zero_genotype(3)}), small, 100'000);
    const bool small_ok =
        closed.classification == Reachability::unreachable && closed.frontier_size() == 0;

    const auto start = ReachState::make({zero_genotype(5)});
    const auto strict = explore(start, desk(30, 0.0), 1000);
    const auto loop = explore(start, desk(30, 1.0), 1000);
    const auto wide = explore(start, desk(30, 2.0), 1000);
    const bool strict_ok = !has_cycle_excluding_self_loops(strict);
    const bool loop_ok = has_cycle_excluding_self_loops(loop);

    auto largest_scc = [](const ReachGraph& g) {
        std::size_t best = 0;
        for (const auto& c : strongly_connected_components(g)) best = std::max(best, c.size());
        return best;
    };
    v.pass = small_ok && strict_ok && loop_ok;
    v.detail = fmt::format("D=3,L=2: {} ({} nodes); eps=0: {} nodes, acyclic={}; eps=1: {}, {} nodes, "
                           "cycle={}",
                           to_string(closed.classification), closed.nodes.size(),
                           strict.nodes.size(), strict_ok, to_string(loop.classification),
                           loop.nodes.size(), loop_ok);
    v.notes.push_back(fmt::format("eps=0: {}, budget used {}, frontier {}",
                                  to_string(strict.classification), strict.budget_used,
                                  strict.frontier_size()));
    v.notes.push_back(fmt::format("eps=1: largest SCC {} of {} nodes, sinks {}", largest_scc(loop),
                                  loop.nodes.size(), sink_nodes(loop).size()));
    v.notes.push_back(fmt::format("eps=2: {}, {} nodes, largest SCC {}, sinks {}",
                                  to_string(wide.classification), wide.nodes.size(),
                                  largest_scc(wide), sink_nodes(wide).size()));
    return v;
}

Verdict invariants() {
    Rng rng(9);
    double worst_sum = 0.0;
    for (int i = 0; i < 500; ++i) {
        const std::size_t D = 1 + uniform_index(rng, 8);
        const auto pop = testing::random_population(rng, D, 1 + uniform_index(rng, 20), -4, 4, 3);
        const auto p = p_lex_all(pop, std::vector<double>(D, static_cast<double>(i % 3)));
        double total = 0.0;
        for (std::size_t k = 0; k < pop.size(); ++k)
            total += p[k] * static_cast<double>(pop.multiplicity[k]);
        worst_sum = std::max(worst_sum, std::abs(total - 1.0));
    }

    auto base = desk(5);
    base.max_steps = 1'000;
    const SweepGrid grid{{5, 30}, {3, 5}, {EpsilonPolicy::constant(0.0), EpsilonPolicy::mad()}};
    std::ostringstream a, b;
    write_sweep_csv(a, sweep(grid, base, 6, 1));
    write_sweep_csv(b, sweep(grid, base, 6, 4));
    const bool identical = a.str() == b.str();

    int mad_mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> v(1 + uniform_index(rng, 50));
        for (double& x : v) x = static_cast<double>(uniform_index(rng, 201)) - 100.0;
        auto sorted = v;
        std::sort(sorted.begin(), sorted.end());
        auto med = [](const std::vector<double>& s) {
            const std::size_t n = s.size();
            return n % 2 ? s[n / 2] : (s[n / 2 - 1] + s[n / 2]) / 2.0;
        };
        const double m = med(sorted);
        std::vector<double> dev;
        for (double x : sorted) dev.push_back(std::abs(x - m));
        std::sort(dev.begin(), dev.end());
        if (mad(v) != med(dev)) ++mad_mismatches;
    }
    return {worst_sum <= 1e-9 && identical && mad_mismatches == 0,
            fmt::format("max |sum-1| = {:.3g}; sweep CSV identical = {}; MAD mismatches = {}/1000",
                        worst_sum, identical, mad_mismatches),
            {}};
}

}  // namespace

int main() {
    struct Criterion {
        const char* id;
        const char* name;
        double time_limit;  // seconds, 0 = none
        std::function<Verdict()> check;
    };
    const std::vector<Criterion> criteria{
        {"AC1", "p_lex matches the permutation oracle", 30.0, oracle_equivalence},
        {"AC2", "single-objective survival crossing", 1.0, single_crossing},
        {"AC3", "joint survival crossing", 1.0, joint_crossing},
        {"AC4", "feasibility boundary", 0.0, feasibility_boundary},
        {"AC5", "infeasible region always fails", 0.0, infeasible_region},
        {"AC6", "feasible region succeeds", 0.0, feasible_region},
        {"AC7", "p_fail non-increasing in S", 0.0, monotone_in_S},
        {"AC8", "reachability structures", 0.0, reachability},
        {"AC9", "normalization and determinism", 0.0, invariants},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v = c.check();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit > 0.0 && secs >= c.time_limit) {
            v.pass = false;
            v.detail += fmt::format("; exceeded {} s", c.time_limit);
        }
        failed += !v.pass;
        fmt::print("[{}] {} {}: {} ({:.2f} s)\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail, secs);
        for (const auto& n : v.notes) fmt::print("       {}\n", n);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
    return failed ? 1 : 0;
}
