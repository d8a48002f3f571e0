#pragma once

/// @file landscape.hpp
/// @brief Maximally contradictory fitness landscape.
///
/// A genotype is a vector of D integers in [0, L]. Objective i scores
/// v_i minus the sum of every other position, so raising one position
/// raises exactly one objective and lowers all the others by the same
/// amount. The only Pareto-optimal profiles lexicase selection can pick
/// are the D "specialists" with L in one position and 0 elsewhere.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lexcontra/rng.hpp"

namespace lexcontra {

using Score = std::int64_t;

struct Genotype {
    std::vector<int> values;

    friend auto operator<=>(const Genotype&, const Genotype&) = default;
    friend bool operator==(const Genotype&, const Genotype&) = default;

    std::size_t dimension() const noexcept { return values.size(); }
};

struct ScoreProfile {
    std::vector<Score> scores;

    friend auto operator<=>(const ScoreProfile&, const ScoreProfile&) = default;
    friend bool operator==(const ScoreProfile&, const ScoreProfile&) = default;

    std::size_t dimension() const noexcept { return scores.size(); }
};

/// Landscape bounds: D objectives, values in [0, L].
struct Bounds {
    std::size_t D = 1;
    int L = 1;
};

/// Throws std::invalid_argument if g has the wrong length or a value out of range.
void validate(const Genotype& g, const Bounds& bounds);

Genotype zero_genotype(std::size_t D);

ScoreProfile evaluate_scores(const Genotype& g);

/// All valid genotypes one unit step away in exactly one position, in
/// lexicographic order. Steps leaving [0, L] are omitted.
std::vector<Genotype> adjacent_genotypes(const Genotype& g, int L);

/// Genotypes with L in one position and 0 elsewhere, position order.
std::vector<Genotype> pareto_genotypes(std::size_t D, int L);

/// Profiles of pareto_genotypes(D, L).
std::vector<ScoreProfile> pareto_selectable_set(std::size_t D, int L);

bool is_pareto_optimal(const Genotype& g, int L) noexcept;
bool is_pareto_optimal(const ScoreProfile& p, int L) noexcept;

/// With probability mu, a uniformly chosen neighbour of g; otherwise g.
Genotype mutate(const Genotype& g, double mu, int L, Rng& rng);

/// Sum of values, i.e. the number of unit steps from the all-zeros genotype.
long distance_from_zero(const Genotype& g) noexcept;

// Text forms used by the CLI and the CSV/JSON writers.
std::string to_string(const Genotype& g);
std::string to_string(const ScoreProfile& p);
std::vector<long long> parse_integer_list(std::string_view text);
Genotype parse_genotype(std::string_view text, const Bounds& bounds);

}  // namespace lexcontra
