// Ordering-enumeration oracle for p_lex. Deliberately shares no code with
// the recursive solver: it expands multiplicities into individuals and
// replays the filtering cascade for every permutation of the objectives.

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "lexcontra/probability.hpp"

namespace lexcontra {

std::vector<double> p_lex_bruteforce_all(const DistinctPopulation& pop,
                                         std::span<const double> epsilon) {
    const std::size_t D = pop.dimension();
    if (pop.profiles.empty()) throw std::invalid_argument("population is empty");
    if (D > kBruteForceMaxDimension)
        throw std::invalid_argument(
            fmt::format("D={} exceeds the enumeration guard of {}", D, kBruteForceMaxDimension));
    if (epsilon.size() != D) throw std::invalid_argument("epsilon must have one value per objective");

    std::vector<std::size_t> owner;  // individual -> distinct profile
    for (std::size_t i = 0; i < pop.size(); ++i)
        owner.insert(owner.end(), pop.multiplicity[i], i);

    std::vector<double> wins(owner.size(), 0.0);
    std::vector<std::size_t> order(D);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t orderings = 0;
    do {
        ++orderings;
        std::vector<std::size_t> alive(owner.size());
        std::iota(alive.begin(), alive.end(), std::size_t{0});
        for (std::size_t j : order) {
            if (alive.size() <= 1) break;
            double best = static_cast<double>(pop.profiles[owner[alive.front()]].scores[j]);
            for (std::size_t a : alive)
                best = std::max(best, static_cast<double>(pop.profiles[owner[a]].scores[j]));
            std::erase_if(alive, [&](std::size_t a) {
                return static_cast<double>(pop.profiles[owner[a]].scores[j]) + epsilon[j] < best;
            });
        }
        for (std::size_t a : alive) wins[a] += 1.0 / static_cast<double>(alive.size());
    } while (std::next_permutation(order.begin(), order.end()));

    std::vector<double> out(pop.size(), 0.0);
    for (std::size_t a = 0; a < owner.size(); ++a) out[owner[a]] += wins[a];
    for (std::size_t i = 0; i < pop.size(); ++i)
        out[i] /= static_cast<double>(orderings) * static_cast<double>(pop.multiplicity[i]);
    return out;
}

double p_lex_bruteforce(const ScoreProfile& target, const DistinctPopulation& pop,
                        std::span<const double> epsilon) {
    const auto idx = pop.index_of(target);
    if (!idx) throw std::invalid_argument("target profile is not in the population");
    return p_lex_bruteforce_all(pop, epsilon)[*idx];
}

double p_lex_bruteforce(const ScoreProfile& target, const DistinctPopulation& pop, double epsilon) {
    const std::vector<double> eps(pop.dimension(), epsilon);
    return p_lex_bruteforce(target, pop, eps);
}

}  // namespace lexcontra
