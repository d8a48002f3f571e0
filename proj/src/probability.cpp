#include "lexcontra/probability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

#include "lexcontra/rng.hpp"

namespace lexcontra {

DistinctPopulation DistinctPopulation::from_profiles(std::span<const ScoreProfile> individuals) {
    if (individuals.empty()) throw std::invalid_argument("population is empty");
    const std::size_t D = individuals.front().dimension();
    if (D == 0) throw std::invalid_argument("profiles must have at least one objective");
    DistinctPopulation pop;
    for (const auto& p : individuals) {
        if (p.dimension() != D)
            throw std::invalid_argument("profiles in a population must share one dimension");
        if (auto idx = pop.index_of(p)) {
            ++pop.multiplicity[*idx];
        } else {
            pop.profiles.push_back(p);
            pop.multiplicity.push_back(1);
        }
    }
    return pop;
}

std::size_t DistinctPopulation::total_count() const noexcept {
    return std::accumulate(multiplicity.begin(), multiplicity.end(), std::size_t{0});
}

std::optional<std::size_t> DistinctPopulation::index_of(const ScoreProfile& p) const noexcept {
    auto it = std::find(profiles.begin(), profiles.end(), p);
    if (it == profiles.end()) return std::nullopt;
    return static_cast<std::size_t>(it - profiles.begin());
}

namespace {

void check_epsilon(const DistinctPopulation& pop, std::span<const double> epsilon) {
    if (pop.profiles.empty()) throw std::invalid_argument("population is empty");
    if (epsilon.size() != pop.dimension())
        throw std::invalid_argument(fmt::format("expected {} epsilon values, got {}",
                                                pop.dimension(), epsilon.size()));
    for (double e : epsilon)
        if (!std::isfinite(e) || e < 0.0)
            throw std::invalid_argument("epsilon must be non-negative");
}

using Index = std::uint32_t;

struct KeyHash {
    std::size_t operator()(const std::vector<Index>& key) const noexcept {
        std::uint64_t h = key.size();
        for (Index k : key) h = mix64(h ^ k);
        return static_cast<std::size_t>(h);
    }
};

// Recursive solver. A subproblem is a sorted subset of distinct-profile
// indices plus a sorted list of remaining objectives; its value is the
// group selection probability of each subset member.
class PlexSolver {
public:
    PlexSolver(const DistinctPopulation& pop, std::span<const double> epsilon,
               PlexOptions options)
        : pop_(pop), epsilon_(epsilon), options_(options) {}

    std::vector<double> solve(const std::vector<Index>& subset,
                              const std::vector<Index>& objectives) {
        if (subset.size() == 1) return {1.0};

        std::vector<Index> active;
        std::vector<std::vector<Index>> elite_sets;
        for (Index j : objectives) {
            auto elite = elite_subset(subset, j);
            if (options_.prune_objectives && elite.size() == subset.size()) continue;
            active.push_back(j);
            elite_sets.push_back(std::move(elite));
        }

        if (active.empty()) {
            std::vector<double> out;
            double total = 0.0;
            for (Index i : subset) total += static_cast<double>(pop_.multiplicity[i]);
            for (Index i : subset) out.push_back(static_cast<double>(pop_.multiplicity[i]) / total);
            return out;
        }

        std::vector<Index> key;
        if (options_.memoize) {
            key.reserve(subset.size() + active.size() + 1);
            key.insert(key.end(), subset.begin(), subset.end());
            key.push_back(std::numeric_limits<Index>::max());
            key.insert(key.end(), active.begin(), active.end());
            if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        }

        std::vector<double> result(subset.size(), 0.0);
        std::vector<Index> rest;
        rest.reserve(active.size());
        for (std::size_t a = 0; a < active.size(); ++a) {
            rest.clear();
            for (std::size_t b = 0; b < active.size(); ++b)
                if (b != a) rest.push_back(active[b]);
            const auto& elite = elite_sets[a];
            const auto child = solve(elite, rest);
            // elite is a sorted sub-sequence of subset; merge-walk to align.
            std::size_t pos = 0;
            for (std::size_t e = 0; e < elite.size(); ++e) {
                while (subset[pos] != elite[e]) ++pos;
                result[pos] += child[e];
            }
        }
        const double n = static_cast<double>(active.size());
        for (double& r : result) r /= n;

        if (options_.memoize) memo_.emplace(std::move(key), result);
        return result;
    }

private:
    std::vector<Index> elite_subset(const std::vector<Index>& subset, Index j) const {
        double best = -std::numeric_limits<double>::infinity();
        for (Index i : subset) best = std::max(best, score(i, j));
        std::vector<Index> elite;
        for (Index i : subset)
            if (score(i, j) + epsilon_[j] >= best) elite.push_back(i);
        return elite;
    }

    double score(Index i, Index j) const {
        return static_cast<double>(pop_.profiles[i].scores[j]);
    }

    const DistinctPopulation& pop_;
    std::span<const double> epsilon_;
    PlexOptions options_;
    std::unordered_map<std::vector<Index>, std::vector<double>, KeyHash> memo_;
};

}  // namespace

std::vector<double> p_lex_all(const DistinctPopulation& pop, std::span<const double> epsilon,
                              PlexOptions options) {
    check_epsilon(pop, epsilon);
    std::vector<Index> subset(pop.size());
    std::iota(subset.begin(), subset.end(), Index{0});
    std::vector<Index> objectives(pop.dimension());
    std::iota(objectives.begin(), objectives.end(), Index{0});

    PlexSolver solver(pop, epsilon, options);
    auto group = solver.solve(subset, objectives);
    for (std::size_t i = 0; i < group.size(); ++i)
        group[i] /= static_cast<double>(pop.multiplicity[i]);
    return group;
}

double p_lex(const ScoreProfile& target, const DistinctPopulation& pop,
             std::span<const double> epsilon, PlexOptions options) {
    const auto idx = pop.index_of(target);
    if (!idx) throw std::invalid_argument("target profile is not in the population");
    return p_lex_all(pop, epsilon, options)[*idx];
}

double p_lex(const ScoreProfile& target, const DistinctPopulation& pop, double epsilon) {
    const std::vector<double> eps(pop.dimension(), epsilon);
    return p_lex(target, pop, eps);
}

void validate(const SurvivalParams& params) {
    if (params.S < 1) throw std::invalid_argument("S must be at least 1");
    if (params.G < 1) throw std::invalid_argument("G must be at least 1");
    if (!(params.t > 0.0 && params.t < 1.0))
        throw std::invalid_argument(fmt::format("t must lie in (0, 1), got {}", params.t));
}

double p_survival(double p, std::uint64_t S, std::uint64_t G) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument(fmt::format("probability {} outside [0, 1]", p));
    if (p >= 1.0) return 1.0;
    if (p <= 0.0) return 0.0;
    // miss = (1 - p)^S; result = (1 - miss)^G
    const double log_miss = static_cast<double>(S) * std::log1p(-p);
    const double miss = std::exp(log_miss);
    if (miss >= 1.0) return 0.0;
    return std::exp(static_cast<double>(G) * std::log1p(-miss));
}

double p_survival(double p, const SurvivalParams& params) { return p_survival(p, params.S, params.G); }

double min_viable_plex(const SurvivalParams& params) {
    validate(params);
    // 1 - t^(1/G), accurate for large G
    const double gap = -std::expm1(std::log(params.t) / static_cast<double>(params.G));
    return -std::expm1(std::log(gap) / static_cast<double>(params.S));
}

std::optional<std::uint64_t> max_feasible_dimension(const SurvivalParams& params) {
    const double needed = min_viable_plex(params);
    if (!(needed > 0.0)) return std::nullopt;
    const double bound = 1.0 / needed;
    if (bound >= 0x1.0p53) return std::nullopt;
    auto D = static_cast<std::uint64_t>(std::floor(bound));
    // Equality in the inequality counts as feasible; absorb rounding either way.
    while (D > 1 && needed > 1.0 / static_cast<double>(D)) --D;
    while (needed <= 1.0 / static_cast<double>(D + 1)) ++D;
    return D;
}

double hernandez_single(std::uint64_t D) {
    if (D < 1) throw std::invalid_argument("D must be at least 1");
    return p_survival(1.0 / static_cast<double>(D), 512, 50000);
}

double hernandez_joint(std::uint64_t D) {
    return std::pow(hernandez_single(D), static_cast<double>(D));
}

std::vector<std::uint64_t> log_spaced(std::uint64_t lo, std::uint64_t hi, std::size_t points) {
    if (lo < 1 || hi < lo) throw std::invalid_argument("log range needs 1 <= lo <= hi");
    if (points < 1) throw std::invalid_argument("need at least one grid point");
    std::vector<std::uint64_t> out;
    const double a = std::log10(static_cast<double>(lo));
    const double b = std::log10(static_cast<double>(hi));
    for (std::size_t k = 0; k < points; ++k) {
        const double x = points == 1 ? a : a + (b - a) * static_cast<double>(k) /
                                                   static_cast<double>(points - 1);
        const auto v = static_cast<std::uint64_t>(std::llround(std::pow(10.0, x)));
        if (out.empty() || out.back() != v) out.push_back(v);
    }
    return out;
}

std::vector<FeasibilityCell> feasibility_grid(std::span<const std::uint64_t> S_values,
                                              std::span<const std::uint64_t> G_values, double t) {
    std::vector<FeasibilityCell> out;
    out.reserve(S_values.size() * G_values.size());
    for (std::uint64_t S : S_values)
        for (std::uint64_t G : G_values)
            out.push_back({S, G, max_feasible_dimension(SurvivalParams{S, G, t})});
    return out;
}

}  // namespace lexcontra
