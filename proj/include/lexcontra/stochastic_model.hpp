#pragma once

/// @file stochastic_model.hpp
/// @brief Fuzzy-population model of lexicase selection on contradictory
/// objectives, and Monte Carlo estimation of its failure probability.
///
/// One model step is one epoch of G generations. Each genotype i in the
/// current (crisp) population stays with probability s_i = p_survival of
/// its p_lex, and each of its mutational neighbours arrives with
/// probability s_i * mu. Arrivals of the same genotype from several
/// sources combine as independent events. The resulting fuzzy set is
/// sampled member by member to give the next crisp population.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "lexcontra/landscape.hpp"
#include "lexcontra/rng.hpp"
#include "lexcontra/selection.hpp"

namespace lexcontra {

struct ModelParams {
    std::uint64_t S = 30;
    std::size_t D = 5;
    int L = 10;
    std::uint64_t G = 500;
    double mu = 0.01;
    double t = 0.5;
    EpsilonPolicy epsilon{};
    std::uint64_t max_steps = 100'000;
    std::uint64_t seed = 0;
    /// Divide mu by the neighbour count instead of giving every neighbour mu.
    bool normalize_mutation = false;
    bool stop_on_optimum = true;

    Bounds bounds() const noexcept { return Bounds{D, L}; }
};

/// Throws std::invalid_argument naming the first field out of range.
void validate(const ModelParams& params);

/// Sorted, duplicate-free set of genotypes.
using CrispPopulation = std::vector<Genotype>;

/// Genotype -> membership probability in (0, 1].
using FuzzyPopulation = std::map<Genotype, double>;

struct MemberFitness {
    Genotype genotype;
    double p_lex = 0.0;
    double survival = 0.0;
};

/// p_lex and p_survival for every member of a crisp population, with
/// epsilon resolved from the params' policy over the population's profiles.
std::vector<MemberFitness> evaluate_members(const CrispPopulation& pop, const ModelParams& params);

/// Deterministic half of a step: the next fuzzy population.
FuzzyPopulation fuzzy_next(const CrispPopulation& pop, const ModelParams& params);

/// Independent Bernoulli draw per member, in genotype order. An empty draw
/// keeps the highest-membership member (first in genotype order on ties).
CrispPopulation defuzzify(const FuzzyPopulation& fuzzy, Rng& rng);

CrispPopulation step(const CrispPopulation& pop, const ModelParams& params, Rng& rng);

struct RunOutcome {
    bool found_optimum = false;
    std::optional<std::uint64_t> first_hit_step;
    std::uint64_t steps_run = 0;
    std::set<ScoreProfile> discovered_profiles;
    CrispPopulation final_population;

    friend bool operator==(const RunOutcome&, const RunOutcome&) = default;
};

using StepObserver =
    std::function<void(std::uint64_t step, const FuzzyPopulation&, const CrispPopulation&)>;

/// Evolves from the all-zeros singleton for up to max_steps epochs.
RunOutcome run(const ModelParams& params, const StepObserver& observer = {});

struct BinomialInterval {
    double low = 0.0;
    double high = 1.0;
};

/// Wilson score interval for `successes` out of `trials` (95% by default).
BinomialInterval wilson_interval(std::size_t successes, std::size_t trials,
                                 double z = 1.959963984540054);

struct FailureEstimate {
    std::size_t replicates = 0;
    std::size_t failures = 0;
    double p_fail = 0.0;
    BinomialInterval ci;
};

/// Seed of one replicate, a function of the master seed, the cell's
/// parameter values, and the replicate index.
std::uint64_t replicate_seed(const ModelParams& params, std::size_t replicate);

/// Runs `replicates` independently seeded runs. `threads` = 0 uses all cores.
FailureEstimate estimate_p_fail(const ModelParams& params, std::size_t replicates,
                                std::size_t threads = 0);

struct SweepGrid {
    std::vector<std::uint64_t> S;
    std::vector<std::size_t> D;
    std::vector<EpsilonPolicy> epsilons;
};

struct SweepRow {
    ModelParams params;
    FailureEstimate estimate;
};

/// One row per (S, D, epsilon) cell, S-major then D then epsilon.
std::vector<SweepRow> sweep(const SweepGrid& grid, const ModelParams& base,
                            std::size_t replicates, std::size_t threads = 0);

inline constexpr const char* kSweepCsvHeader =
    "S,D,epsilon_mode,epsilon_value,G,L,mu,t,max_steps,replicates,failures,p_fail,ci_low,ci_high";

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace lexcontra
