#include "lexcontra/stochastic_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "lexcontra/parallel.hpp"
#include "lexcontra/probability.hpp"

namespace lexcontra {

void validate(const ModelParams& params) {
    if (params.S < 1) throw std::invalid_argument("S must be at least 1");
    if (params.D < 1) throw std::invalid_argument("D must be at least 1");
    if (params.L < 1) throw std::invalid_argument("L must be at least 1");
    if (params.G < 1) throw std::invalid_argument("G must be at least 1");
    if (!(params.mu >= 0.0 && params.mu <= 1.0))
        throw std::invalid_argument(fmt::format("mu must lie in [0, 1], got {}", params.mu));
    if (!(params.t > 0.0 && params.t < 1.0))
        throw std::invalid_argument(fmt::format("t must lie in (0, 1), got {}", params.t));
    if (params.max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
    validate(params.epsilon);
}

std::vector<MemberFitness> evaluate_members(const CrispPopulation& pop, const ModelParams& params) {
    std::vector<ScoreProfile> profiles;
    profiles.reserve(pop.size());
    for (const auto& g : pop) profiles.push_back(evaluate_scores(g));

    const auto eps = generation_epsilons(profiles, params.epsilon);
    // Distinct genotypes can share a profile only when D == 2.
    const auto distinct = DistinctPopulation::from_profiles(profiles);
    const auto plex = p_lex_all(distinct, eps);

    std::vector<MemberFitness> out;
    out.reserve(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const double p = plex[*distinct.index_of(profiles[i])];
        out.push_back({pop[i], p, p_survival(p, params.S, params.G)});
    }
    return out;
}

FuzzyPopulation fuzzy_next(const CrispPopulation& pop, const ModelParams& params) {
    // Probability that a genotype does NOT arrive from any source.
    std::map<Genotype, double> miss;
    auto arrive = [&miss](const Genotype& g, double m) {
        auto [it, inserted] = miss.try_emplace(g, 1.0);
        it->second *= 1.0 - m;
    };

    for (const auto& member : evaluate_members(pop, params)) {
        if (member.survival <= 0.0) continue;
        arrive(member.genotype, member.survival);
        const auto neighbours = adjacent_genotypes(member.genotype, params.L);
        if (neighbours.empty()) continue;
        double rate = params.mu;
        if (params.normalize_mutation) rate /= static_cast<double>(neighbours.size());
        const double m = member.survival * rate;
        if (m <= 0.0) continue;
        for (const auto& n : neighbours) arrive(n, m);
    }

    FuzzyPopulation fuzzy;
    for (auto& [g, q] : miss) {
        const double membership = 1.0 - q;
        if (membership > 0.0) fuzzy.emplace_hint(fuzzy.end(), g, std::min(membership, 1.0));
    }
    return fuzzy;
}

CrispPopulation defuzzify(const FuzzyPopulation& fuzzy, Rng& rng) {
    CrispPopulation out;
    for (const auto& [g, m] : fuzzy)
        if (bernoulli(rng, m)) out.push_back(g);
    if (out.empty() && !fuzzy.empty()) {
        auto best = fuzzy.begin();
        for (auto it = fuzzy.begin(); it != fuzzy.end(); ++it)
            if (it->second > best->second) best = it;
        out.push_back(best->first);
    }
    return out;
}

namespace {

CrispPopulation step_impl(const CrispPopulation& pop, const ModelParams& params, Rng& rng,
                          FuzzyPopulation& fuzzy) {
    fuzzy = fuzzy_next(pop, params);
    if (!fuzzy.empty()) return defuzzify(fuzzy, rng);
    // Every survival probability underflowed to zero. Keep the member most
    // likely to be selected so the population never goes extinct.
    const auto members = evaluate_members(pop, params);
    auto best = std::max_element(members.begin(), members.end(),
                                 [](const MemberFitness& a, const MemberFitness& b) {
                                     return a.p_lex < b.p_lex;
                                 });
    return {best->genotype};
}

bool contains_optimum(const CrispPopulation& pop, int L) {
    return std::any_of(pop.begin(), pop.end(),
                       [L](const Genotype& g) { return is_pareto_optimal(g, L); });
}

}  // namespace

CrispPopulation step(const CrispPopulation& pop, const ModelParams& params, Rng& rng) {
    if (pop.empty()) throw std::invalid_argument("population is empty");
    FuzzyPopulation fuzzy;
    return step_impl(pop, params, rng, fuzzy);
}

RunOutcome run(const ModelParams& params, const StepObserver& observer) {
    validate(params);
    Rng rng(params.seed);
    RunOutcome outcome;
    CrispPopulation pop{zero_genotype(params.D)};

    auto record = [&](std::uint64_t t) {
        for (const auto& g : pop) outcome.discovered_profiles.insert(evaluate_scores(g));
        if (!outcome.found_optimum && contains_optimum(pop, params.L)) {
            outcome.found_optimum = true;
            outcome.first_hit_step = t;
        }
    };
    record(0);

    FuzzyPopulation fuzzy;
    for (std::uint64_t t = 1; t <= params.max_steps; ++t) {
        if (outcome.found_optimum && params.stop_on_optimum) break;
        pop = step_impl(pop, params, rng, fuzzy);
        outcome.steps_run = t;
        if (observer) observer(t, fuzzy, pop);
        record(t);
    }
    outcome.final_population = pop;
    return outcome;
}

BinomialInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    BinomialInterval ci{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    if (successes == 0) ci.low = 0.0;
    if (successes == trials) ci.high = 1.0;
    return ci;
}

std::uint64_t replicate_seed(const ModelParams& params, std::size_t replicate) {
    return derive_seed(params.seed,
                       {params.S, params.D, static_cast<std::uint64_t>(params.L), params.G,
                        std::bit_cast<std::uint64_t>(params.mu),
                        std::bit_cast<std::uint64_t>(params.t),
                        static_cast<std::uint64_t>(params.epsilon.mode),
                        static_cast<std::uint64_t>(params.epsilon.variant),
                        std::bit_cast<std::uint64_t>(params.epsilon.value), params.max_steps,
                        static_cast<std::uint64_t>(replicate)});
}

namespace {

FailureEstimate summarize(const std::vector<char>& found) {
    FailureEstimate est;
    est.replicates = found.size();
    est.failures = static_cast<std::size_t>(std::count(found.begin(), found.end(), 0));
    est.p_fail = est.replicates == 0 ? 0.0
                                     : static_cast<double>(est.failures) /
                                           static_cast<double>(est.replicates);
    est.ci = wilson_interval(est.failures, est.replicates);
    return est;
}

}  // namespace

FailureEstimate estimate_p_fail(const ModelParams& params, std::size_t replicates,
                                std::size_t threads) {
    if (replicates < 1) throw std::invalid_argument("replicates must be at least 1");
    validate(params);
    std::vector<char> found(replicates, 0);
    parallel_for(
        replicates,
        [&](std::size_t r) {
            ModelParams p = params;
            p.seed = replicate_seed(params, r);
            p.stop_on_optimum = true;
            found[r] = run(p).found_optimum ? 1 : 0;
        },
        threads);
    return summarize(found);
}

std::vector<SweepRow> sweep(const SweepGrid& grid, const ModelParams& base, std::size_t replicates,
                            std::size_t threads) {
    if (grid.S.empty() || grid.D.empty() || grid.epsilons.empty())
        throw std::invalid_argument("sweep grid has an empty axis");
    if (replicates < 1) throw std::invalid_argument("replicates must be at least 1");

    std::vector<SweepRow> rows;
    for (auto S : grid.S)
        for (auto D : grid.D)
            for (const auto& eps : grid.epsilons) {
                ModelParams p = base;
                p.S = S;
                p.D = D;
                p.epsilon = eps;
                validate(p);
                rows.push_back({p, {}});
            }

    // Flatten cells x replicates so one slow cell does not serialize the rest.
    std::vector<char> found(rows.size() * replicates, 0);
    parallel_for(
        found.size(),
        [&](std::size_t job) {
            const auto& cell = rows[job / replicates].params;
            ModelParams p = cell;
            p.seed = replicate_seed(cell, job % replicates);
            p.stop_on_optimum = true;
            found[job] = run(p).found_optimum ? 1 : 0;
        },
        threads);

    for (std::size_t c = 0; c < rows.size(); ++c) {
        const auto first = found.begin() + static_cast<std::ptrdiff_t>(c * replicates);
        rows[c].estimate =
            summarize(std::vector<char>(first, first + static_cast<std::ptrdiff_t>(replicates)));
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << kSweepCsvHeader << '\n';
    for (const auto& row : rows) {
        const auto& p = row.params;
        const auto& e = row.estimate;
        const double eps_value = p.epsilon.mode == EpsilonMode::constant ? p.epsilon.value : 0.0;
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", p.S, p.D,
                           to_string(p.epsilon.mode), eps_value, p.G, p.L, p.mu, p.t, p.max_steps,
                           e.replicates, e.failures, e.p_fail, e.ci.low, e.ci.high);
    }
}

}  // namespace lexcontra
