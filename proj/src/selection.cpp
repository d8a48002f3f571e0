#include "lexcontra/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace lexcontra {

EpsilonPolicy EpsilonPolicy::constant(double eps, EpsilonVariant v) {
    return EpsilonPolicy{EpsilonMode::constant, eps, v};
}

EpsilonPolicy EpsilonPolicy::mad(EpsilonVariant v) { return EpsilonPolicy{EpsilonMode::mad, 0.0, v}; }

void validate(const EpsilonPolicy& policy) {
    if (!std::isfinite(policy.value) || policy.value < 0.0)
        throw std::invalid_argument(fmt::format("epsilon must be a non-negative number, got {}",
                                                policy.value));
}

std::string_view to_string(EpsilonMode mode) noexcept {
    return mode == EpsilonMode::constant ? "constant" : "mad";
}

std::string_view to_string(EpsilonVariant variant) noexcept {
    switch (variant) {
        case EpsilonVariant::static_: return "static";
        case EpsilonVariant::semi_dynamic: return "semi-dynamic";
        case EpsilonVariant::dynamic: return "dynamic";
    }
    return "semi-dynamic";
}

EpsilonMode parse_epsilon_mode(std::string_view text) {
    if (text == "constant") return EpsilonMode::constant;
    if (text == "mad") return EpsilonMode::mad;
    throw std::invalid_argument(fmt::format("unknown epsilon mode '{}'", text));
}

EpsilonVariant parse_epsilon_variant(std::string_view text) {
    if (text == "static") return EpsilonVariant::static_;
    if (text == "semi-dynamic") return EpsilonVariant::semi_dynamic;
    if (text == "dynamic") return EpsilonVariant::dynamic;
    throw std::invalid_argument(fmt::format("unknown epsilon variant '{}'", text));
}

SelectionPool::SelectionPool(std::vector<PoolMember> members) : members_(std::move(members)) {
    if (members_.empty()) throw std::invalid_argument("selection pool is empty");
    const std::size_t D = members_.front().profile.dimension();
    if (D == 0) throw std::invalid_argument("profiles must have at least one objective");
    for (const auto& m : members_)
        if (m.profile.dimension() != D)
            throw std::invalid_argument("profiles in a pool must share one dimension");
}

SelectionPool SelectionPool::from_profiles(std::span<const ScoreProfile> profiles) {
    std::vector<PoolMember> members;
    members.reserve(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i) members.push_back({i, profiles[i]});
    return SelectionPool(std::move(members));
}

bool SelectionPool::contains(std::size_t id) const noexcept {
    return std::any_of(members_.begin(), members_.end(),
                       [id](const PoolMember& m) { return m.id == id; });
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of an empty list");
    const std::size_t n = values.size();
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    const double upper = *mid;
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), mid);
    return (lower + upper) / 2.0;
}

double mad(std::span<const double> values) {
    const double centre = median(std::vector<double>(values.begin(), values.end()));
    std::vector<double> deviations;
    deviations.reserve(values.size());
    for (double v : values) deviations.push_back(std::abs(v - centre));
    return median(std::move(deviations));
}

namespace {

std::vector<double> objective_column(std::span<const ScoreProfile> population,
                                     std::size_t objective) {
    std::vector<double> column;
    column.reserve(population.size());
    for (const auto& p : population) column.push_back(static_cast<double>(p.scores[objective]));
    return column;
}

}  // namespace

double mad_epsilon(const SelectionPool& pool, std::size_t objective) {
    if (objective >= pool.dimension())
        throw std::out_of_range(fmt::format("objective {} out of range", objective));
    std::vector<double> column;
    for (const auto& m : pool.members())
        column.push_back(static_cast<double>(m.profile.scores[objective]));
    return mad(column);
}

std::vector<double> generation_epsilons(std::span<const ScoreProfile> population,
                                        const EpsilonPolicy& policy) {
    if (population.empty()) throw std::invalid_argument("population is empty");
    const std::size_t D = population.front().dimension();
    if (policy.mode == EpsilonMode::constant) return std::vector<double>(D, policy.value);
    std::vector<double> eps(D);
    for (std::size_t j = 0; j < D; ++j) eps[j] = mad(objective_column(population, j));
    return eps;
}

std::size_t select_one(const SelectionPool& pool, std::span<const std::size_t> ordering,
                       const EpsilonPolicy& policy, Rng& rng, SelectionTrace* trace) {
    const auto members = pool.members();
    const std::size_t D = pool.dimension();
    {
        std::vector<std::size_t> sorted(ordering.begin(), ordering.end());
        std::sort(sorted.begin(), sorted.end());
        std::vector<std::size_t> identity(D);
        std::iota(identity.begin(), identity.end(), std::size_t{0});
        if (sorted != identity)
            throw std::invalid_argument("ordering must be a permutation of the objectives");
    }

    std::vector<ScoreProfile> profiles;
    profiles.reserve(members.size());
    for (const auto& m : members) profiles.push_back(m.profile);
    const std::vector<double> generation_eps = generation_epsilons(profiles, policy);

    auto score = [&](std::size_t idx, std::size_t j) {
        return static_cast<double>(members[idx].profile.scores[j]);
    };

    std::vector<std::size_t> candidates(members.size());
    std::iota(candidates.begin(), candidates.end(), std::size_t{0});

    for (std::size_t j : ordering) {
        if (candidates.size() <= 1) break;

        double best = -INFINITY;
        double eps = generation_eps[j];
        switch (policy.variant) {
            case EpsilonVariant::static_:
                for (std::size_t i = 0; i < members.size(); ++i) best = std::max(best, score(i, j));
                break;
            case EpsilonVariant::semi_dynamic:
                for (std::size_t i : candidates) best = std::max(best, score(i, j));
                break;
            case EpsilonVariant::dynamic: {
                std::vector<double> column;
                column.reserve(candidates.size());
                for (std::size_t i : candidates) {
                    best = std::max(best, score(i, j));
                    column.push_back(score(i, j));
                }
                if (policy.mode == EpsilonMode::mad) eps = mad(column);
                break;
            }
        }

        std::vector<std::size_t> kept;
        for (std::size_t i : candidates)
            if (score(i, j) >= best - eps) kept.push_back(i);
        // Static pass/fail: if nobody in the current pool passes, everyone
        // ties on "fail" and the pool is unchanged.
        if (!kept.empty()) candidates = std::move(kept);

        if (trace) {
            SelectionStep step{j, best, eps, {}};
            for (std::size_t i : candidates) step.survivors.push_back(members[i].id);
            trace->steps.push_back(std::move(step));
        }
    }

    const std::size_t chosen = candidates[uniform_index(rng, candidates.size())];
    if (trace) {
        trace->final_candidates.clear();
        for (std::size_t i : candidates) trace->final_candidates.push_back(members[i].id);
        trace->selected = members[chosen].id;
    }
    return members[chosen].id;
}

std::size_t select(const SelectionPool& pool, const EpsilonPolicy& policy, Rng& rng,
                   SelectionTrace* trace) {
    std::vector<std::size_t> ordering(pool.dimension());
    std::iota(ordering.begin(), ordering.end(), std::size_t{0});
    for (std::size_t i = ordering.size(); i > 1; --i)
        std::swap(ordering[i - 1], ordering[uniform_index(rng, i)]);
    return select_one(pool, ordering, policy, rng, trace);
}

}  // namespace lexcontra
