#pragma once

/// @file selection.hpp
/// @brief Lexicase and epsilon-lexicase parent selection.
///
/// A selection event walks the objectives in a random order and, at each
/// step, keeps only candidates whose score is within epsilon of a reference
/// best. The three epsilon-lexicase variants differ in what that reference
/// is measured against:
///
///  - static: best and epsilon over the whole pool, computed once;
///  - semi-dynamic: best over the current candidates, epsilon once per
///    generation over the whole pool;
///  - dynamic: both best and epsilon over the current candidates.
///
/// With epsilon = 0 all three reduce to plain lexicase selection.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "lexcontra/landscape.hpp"
#include "lexcontra/rng.hpp"

namespace lexcontra {

enum class EpsilonMode { constant, mad };
enum class EpsilonVariant { static_, semi_dynamic, dynamic };

struct EpsilonPolicy {
    EpsilonMode mode = EpsilonMode::constant;
    double value = 0.0;  // used when mode == constant
    EpsilonVariant variant = EpsilonVariant::semi_dynamic;

    static EpsilonPolicy constant(double eps,
                                  EpsilonVariant v = EpsilonVariant::semi_dynamic);
    static EpsilonPolicy mad(EpsilonVariant v = EpsilonVariant::semi_dynamic);
};

/// Throws std::invalid_argument on negative or non-finite epsilon.
void validate(const EpsilonPolicy& policy);

std::string_view to_string(EpsilonMode mode) noexcept;
std::string_view to_string(EpsilonVariant variant) noexcept;
EpsilonMode parse_epsilon_mode(std::string_view text);
EpsilonVariant parse_epsilon_variant(std::string_view text);

struct PoolMember {
    std::size_t id = 0;
    ScoreProfile profile;
};

/// Non-empty set of candidates sharing one objective dimension.
class SelectionPool {
public:
    explicit SelectionPool(std::vector<PoolMember> members);
    static SelectionPool from_profiles(std::span<const ScoreProfile> profiles);

    std::span<const PoolMember> members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }
    std::size_t dimension() const noexcept { return members_.front().profile.dimension(); }
    bool contains(std::size_t id) const noexcept;

private:
    std::vector<PoolMember> members_;
};

/// Median; the mean of the two middle elements for even lengths.
/// Throws std::invalid_argument on an empty list.
double median(std::vector<double> values);

/// Median absolute deviation from the median.
double mad(std::span<const double> values);

/// Median absolute deviation of one objective over the whole pool.
double mad_epsilon(const SelectionPool& pool, std::size_t objective);

/// Per-objective epsilon fixed for one generation (constant, or MAD over
/// the full pool).
std::vector<double> generation_epsilons(std::span<const ScoreProfile> population,
                                        const EpsilonPolicy& policy);

struct SelectionStep {
    std::size_t objective = 0;
    double reference_best = 0.0;
    double epsilon = 0.0;
    std::vector<std::size_t> survivors;  // ids, pool order
};

struct SelectionTrace {
    std::vector<SelectionStep> steps;
    std::vector<std::size_t> final_candidates;
    std::size_t selected = 0;
};

/// One selection event with a fixed objective ordering. `ordering` must be
/// a permutation of 0..D-1. Final ties are broken uniformly via rng.
std::size_t select_one(const SelectionPool& pool, std::span<const std::size_t> ordering,
                       const EpsilonPolicy& policy, Rng& rng, SelectionTrace* trace = nullptr);

/// One selection event with a uniformly shuffled ordering.
std::size_t select(const SelectionPool& pool, const EpsilonPolicy& policy, Rng& rng,
                   SelectionTrace* trace = nullptr);

}  // namespace lexcontra
