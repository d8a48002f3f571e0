#pragma once

/// @file reachability.hpp
/// @brief State-space exploration of population compositions under the
/// survival-threshold abstraction.
///
/// A state is a set of distinct genotypes. Under the threshold abstraction
/// a member persists iff its p_survival is at least t; members below it are
/// removed, which changes everyone else's p_lex, so the filter is applied
/// until nothing more is removed. A transition keeps the survivors and may
/// add one mutant of a survivor. Exploration is breadth-first from a start
/// state and classifies the Pareto-optimal genotypes as reachable,
/// unreachable (closed region without an optimum) or indeterminate (budget
/// exhausted first).

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lexcontra/landscape.hpp"
#include "lexcontra/stochastic_model.hpp"

namespace lexcontra {

struct ReachState {
    std::vector<Genotype> members;  // sorted, distinct, non-empty

    /// Sorts and deduplicates. Throws std::invalid_argument when empty.
    static ReachState make(std::vector<Genotype> genotypes);

    bool contains(const Genotype& g) const;
    bool contains_optimum(int L) const;

    friend auto operator<=>(const ReachState&, const ReachState&) = default;
    friend bool operator==(const ReachState&, const ReachState&) = default;
};

enum class Reachability { reachable, unreachable, indeterminate };

std::string_view to_string(Reachability r) noexcept;

/// Repeatedly drops members with p_survival < t until stable. Returns
/// std::nullopt if every member would be dropped.
std::optional<ReachState> survival_filter(const ReachState& state, const ModelParams& params);

/// Distinct fixed-point states reachable in one transition, sorted.
std::vector<ReachState> successors(const ReachState& state, const ModelParams& params);

struct ReachNode {
    ReachState state;
    bool explored = false;
    bool contains_optimum = false;
    std::size_t depth = 0;  // transitions from the start state
};

struct ReachGraph {
    std::vector<ReachNode> nodes;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // (from, to) node ids
    Reachability classification = Reachability::indeterminate;
    std::size_t budget_used = 0;

    std::size_t frontier_size() const noexcept;
};

inline constexpr std::size_t kDefaultNodeBudget = 1000;

/// Breadth-first exploration; within a layer states are expanded in
/// canonical order. `node_budget` caps the number of expanded states.
ReachGraph explore(const ReachState& start, const ModelParams& params,
                   std::size_t node_budget = kDefaultNodeBudget);

/// JSON document with nodes, edges, classification and layout hints
/// (x = unique genotypes, y = largest genotype distance from zero).
std::string export_graph(const ReachGraph& graph, int indent = -1);

/// Tarjan SCCs over all nodes; each component sorted, components ordered
/// by their smallest node id.
std::vector<std::vector<std::size_t>> strongly_connected_components(const ReachGraph& graph);

/// True iff some cycle of length >= 2 exists.
bool has_cycle_excluding_self_loops(const ReachGraph& graph);

/// Explored nodes without an edge to any other node.
std::vector<std::size_t> sink_nodes(const ReachGraph& graph);

}  // namespace lexcontra
