#include "lexcontra/reachability.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace lexcontra {

ReachState ReachState::make(std::vector<Genotype> genotypes) {
    if (genotypes.empty()) throw std::invalid_argument("a population state cannot be empty");
    std::sort(genotypes.begin(), genotypes.end());
    genotypes.erase(std::unique(genotypes.begin(), genotypes.end()), genotypes.end());
    return ReachState{std::move(genotypes)};
}

bool ReachState::contains(const Genotype& g) const {
    return std::binary_search(members.begin(), members.end(), g);
}

bool ReachState::contains_optimum(int L) const {
    return std::any_of(members.begin(), members.end(),
                       [L](const Genotype& g) { return is_pareto_optimal(g, L); });
}

std::string_view to_string(Reachability r) noexcept {
    switch (r) {
        case Reachability::reachable: return "reachable";
        case Reachability::unreachable: return "unreachable";
        case Reachability::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

std::optional<ReachState> survival_filter(const ReachState& state, const ModelParams& params) {
    std::vector<Genotype> current = state.members;
    while (true) {
        std::vector<Genotype> kept;
        for (const auto& m : evaluate_members(current, params))
            if (m.survival >= params.t) kept.push_back(m.genotype);
        if (kept.empty()) return std::nullopt;
        if (kept.size() == current.size()) return ReachState{std::move(current)};
        current = std::move(kept);
    }
}

namespace {

using FilterCache = std::map<ReachState, std::optional<ReachState>>;

const std::optional<ReachState>& cached_filter(const ReachState& s, const ModelParams& params,
                                               FilterCache& cache) {
    auto it = cache.find(s);
    if (it == cache.end()) it = cache.emplace(s, survival_filter(s, params)).first;
    return it->second;
}

std::vector<ReachState> successors_impl(const ReachState& state, const ModelParams& params,
                                        FilterCache& cache) {
    const auto survivors = cached_filter(state, params, cache);
    if (!survivors) return {};

    std::vector<ReachState> out{*survivors};
    for (const auto& g : survivors->members) {
        for (auto& mutant : adjacent_genotypes(g, params.L)) {
            if (survivors->contains(mutant)) continue;
            std::vector<Genotype> extended = survivors->members;
            extended.push_back(std::move(mutant));
            const auto& next = cached_filter(ReachState::make(std::move(extended)), params, cache);
            if (next) out.push_back(*next);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

std::vector<ReachState> successors(const ReachState& state, const ModelParams& params) {
    FilterCache cache;
    return successors_impl(state, params, cache);
}

std::size_t ReachGraph::frontier_size() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const ReachNode& n) { return !n.explored; }));
}

ReachGraph explore(const ReachState& start, const ModelParams& params, std::size_t node_budget) {
    if (node_budget < 1) throw std::invalid_argument("node budget must be at least 1");
    validate(params);

    ReachGraph graph;
    std::map<ReachState, std::size_t> ids;
    auto add_node = [&](const ReachState& s, std::size_t depth) {
        auto [it, inserted] = ids.try_emplace(s, graph.nodes.size());
        if (inserted) graph.nodes.push_back({s, false, s.contains_optimum(params.L), depth});
        return std::pair{it->second, inserted};
    };

    add_node(start, 0);
    if (graph.nodes.front().contains_optimum) {
        graph.classification = Reachability::reachable;
        return graph;
    }

    FilterCache cache;
    std::vector<std::size_t> layer{0};
    bool found = false;
    bool out_of_budget = false;
    while (!layer.empty() && !found && !out_of_budget) {
        std::sort(layer.begin(), layer.end(), [&](std::size_t a, std::size_t b) {
            return graph.nodes[a].state < graph.nodes[b].state;
        });
        std::vector<std::size_t> next_layer;
        for (std::size_t id : layer) {
            if (graph.budget_used == node_budget) {
                out_of_budget = true;
                break;
            }
            const ReachState state = graph.nodes[id].state;
            const std::size_t depth = graph.nodes[id].depth;
            graph.nodes[id].explored = true;
            ++graph.budget_used;
            for (const auto& s : successors_impl(state, params, cache)) {
                auto [to, inserted] = add_node(s, depth + 1);
                graph.edges.emplace_back(id, to);
                if (inserted) {
                    next_layer.push_back(to);
                    if (graph.nodes[to].contains_optimum) found = true;
                }
            }
            if (found) break;
        }
        layer = std::move(next_layer);
    }

    if (found)
        graph.classification = Reachability::reachable;
    else if (graph.frontier_size() == 0)
        graph.classification = Reachability::unreachable;
    else
        graph.classification = Reachability::indeterminate;
    return graph;
}

std::string export_graph(const ReachGraph& graph, int indent) {
    using nlohmann::json;
    json nodes = json::array();
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        const auto& n = graph.nodes[i];
        json genotypes = json::array();
        long max_distance = 0;
        for (const auto& g : n.state.members) {
            genotypes.push_back(g.values);
            max_distance = std::max(max_distance, distance_from_zero(g));
        }
        const auto unique = n.state.members.size();
        nodes.push_back({{"id", i},
                         {"genotypes", std::move(genotypes)},
                         {"unique_genotypes", unique},
                         {"max_distance", max_distance},
                         {"explored", n.explored},
                         {"contains_optimum", n.contains_optimum},
                         {"depth", n.depth},
                         {"x", unique},
                         {"y", max_distance}});
    }
    json edges = json::array();
    for (const auto& [from, to] : graph.edges) edges.push_back({{"from", from}, {"to", to}});

    json doc{{"classification", to_string(graph.classification)},
             {"budget_used", graph.budget_used},
             {"nodes", std::move(nodes)},
             {"edges", std::move(edges)}};
    return doc.dump(indent);
}

std::vector<std::vector<std::size_t>> strongly_connected_components(const ReachGraph& graph) {
    const std::size_t n = graph.nodes.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& [from, to] : graph.edges) adj[from].push_back(to);

    // Iterative Tarjan.
    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> components;
    std::size_t counter = 0;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        std::vector<std::pair<std::size_t, std::size_t>> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            auto& [v, next_edge] = call.back();
            if (next_edge < adj[v].size()) {
                const std::size_t w = adj[v][next_edge++];
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            const std::size_t done = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
            if (low[done] == index[done]) {
                std::vector<std::size_t> component;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    component.push_back(w);
                } while (w != done);
                std::sort(component.begin(), component.end());
                components.push_back(std::move(component));
            }
        }
    }
    std::sort(components.begin(), components.end());
    return components;
}

bool has_cycle_excluding_self_loops(const ReachGraph& graph) {
    const auto components = strongly_connected_components(graph);
    return std::any_of(components.begin(), components.end(),
                       [](const auto& c) { return c.size() > 1; });
}

std::vector<std::size_t> sink_nodes(const ReachGraph& graph) {
    std::vector<char> has_exit(graph.nodes.size(), 0);
    for (const auto& [from, to] : graph.edges)
        if (from != to) has_exit[from] = 1;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i)
        if (graph.nodes[i].explored && !has_exit[i]) out.push_back(i);
    return out;
}

}  // namespace lexcontra
