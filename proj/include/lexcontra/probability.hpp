#pragma once

/// @file probability.hpp
/// @brief Exact lexicase selection probabilities and survival analytics.
///
/// p_lex is the probability that one lexicase selection event picks a given
/// individual. It averages, over the objective chosen first, the selection
/// probability within the subset that is epsilon-elite on that objective,
/// recursing with the objective removed. Eliteness is measured against the
/// best score within the current subset (semi-dynamic filtering).
///
/// The solver works on distinct profiles with multiplicities, skips
/// objectives on which every current candidate is already elite, and
/// memoizes subproblems keyed by (candidate subset, remaining objectives).
/// p_lex_bruteforce enumerates every objective ordering and is kept as an
/// independent check on the recursive solver.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lexcontra/landscape.hpp"

namespace lexcontra {

/// Distinct score profiles and how many individuals carry each one.
struct DistinctPopulation {
    std::vector<ScoreProfile> profiles;
    std::vector<std::size_t> multiplicity;

    /// Groups equal profiles, keeping first-seen order. Throws on an empty
    /// or ragged input.
    static DistinctPopulation from_profiles(std::span<const ScoreProfile> individuals);

    std::size_t size() const noexcept { return profiles.size(); }
    std::size_t dimension() const noexcept {
        return profiles.empty() ? 0 : profiles.front().dimension();
    }
    std::size_t total_count() const noexcept;
    std::optional<std::size_t> index_of(const ScoreProfile& p) const noexcept;
};

/// Solver switches. Both optimizations are exact; turning them off exists
/// so tests can confirm that.
struct PlexOptions {
    bool prune_objectives = true;
    bool memoize = true;
};

/// Per-individual selection probability for every distinct profile, in
/// population order. `epsilon` holds one value per objective.
std::vector<double> p_lex_all(const DistinctPopulation& pop, std::span<const double> epsilon,
                              PlexOptions options = {});

/// Throws std::invalid_argument if target is not in pop.
double p_lex(const ScoreProfile& target, const DistinctPopulation& pop,
             std::span<const double> epsilon, PlexOptions options = {});
double p_lex(const ScoreProfile& target, const DistinctPopulation& pop, double epsilon);

inline constexpr std::size_t kBruteForceMaxDimension = 8;

/// Enumerates all D! objective orderings. Throws std::invalid_argument for
/// D above kBruteForceMaxDimension.
std::vector<double> p_lex_bruteforce_all(const DistinctPopulation& pop,
                                         std::span<const double> epsilon);
double p_lex_bruteforce(const ScoreProfile& target, const DistinctPopulation& pop,
                        std::span<const double> epsilon);
double p_lex_bruteforce(const ScoreProfile& target, const DistinctPopulation& pop, double epsilon);

struct SurvivalParams {
    std::uint64_t S = 1;  // selection events per generation
    std::uint64_t G = 1;  // generations to survive
    double t = 0.5;       // survival threshold, in (0, 1)
};

void validate(const SurvivalParams& params);

/// (1 - (1 - p)^S)^G, evaluated in log space.
double p_survival(double p, std::uint64_t S, std::uint64_t G);
double p_survival(double p, const SurvivalParams& params);

/// Smallest p with p_survival(p) >= t: 1 - (1 - t^(1/G))^(1/S).
double min_viable_plex(const SurvivalParams& params);

/// Largest D with min_viable_plex <= 1/D. std::nullopt means unbounded
/// (the threshold underflowed to zero).
std::optional<std::uint64_t> max_feasible_dimension(const SurvivalParams& params);

/// Survival of one specialist among D at S=512, G=50000.
double hernandez_single(std::uint64_t D);

/// Joint survival of D specialists at S=512, G=50000.
double hernandez_joint(std::uint64_t D);

struct FeasibilityCell {
    std::uint64_t S = 0;
    std::uint64_t G = 0;
    std::optional<std::uint64_t> max_D;
};

/// Integer values spaced evenly in log10 between lo and hi inclusive;
/// duplicates after rounding are dropped.
std::vector<std::uint64_t> log_spaced(std::uint64_t lo, std::uint64_t hi, std::size_t points);

/// max_feasible_dimension over the cartesian product, S-major order.
std::vector<FeasibilityCell> feasibility_grid(std::span<const std::uint64_t> S_values,
                                              std::span<const std::uint64_t> G_values, double t);

}  // namespace lexcontra
