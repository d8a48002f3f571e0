#include "lexcontra/landscape.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace lexcontra {

void validate(const Genotype& g, const Bounds& bounds) {
    if (bounds.D < 1) throw std::invalid_argument("D must be at least 1");
    if (bounds.L < 1) throw std::invalid_argument("L must be at least 1");
    if (g.values.size() != bounds.D)
        throw std::invalid_argument(
            fmt::format("genotype has {} values, expected D={}", g.values.size(), bounds.D));
    for (int v : g.values) {
        if (v < 0) throw std::invalid_argument(fmt::format("value {} is negative", v));
        if (v > bounds.L)
            throw std::invalid_argument(fmt::format("value {} exceeds L={}", v, bounds.L));
    }
}

Genotype zero_genotype(std::size_t D) { return Genotype{std::vector<int>(D, 0)}; }

ScoreProfile evaluate_scores(const Genotype& g) {
    const Score total = std::accumulate(g.values.begin(), g.values.end(), Score{0});
    ScoreProfile p;
    p.scores.reserve(g.values.size());
    for (int v : g.values) p.scores.push_back(2 * Score{v} - total);
    return p;
}

std::vector<Genotype> adjacent_genotypes(const Genotype& g, int L) {
    std::vector<Genotype> out;
    out.reserve(2 * g.values.size());
    for (std::size_t k = 0; k < g.values.size(); ++k) {
        if (g.values[k] > 0) {
            Genotype h = g;
            --h.values[k];
            out.push_back(std::move(h));
        }
        if (g.values[k] < L) {
            Genotype h = g;
            ++h.values[k];
            out.push_back(std::move(h));
        }
    }
    std::sort(out.begin(), out.end());  // canonical order
    return out;
}

std::vector<Genotype> pareto_genotypes(std::size_t D, int L) {
    if (D < 1) throw std::invalid_argument("D must be at least 1");
    if (L < 1) throw std::invalid_argument("L must be at least 1");
    std::vector<Genotype> out;
    out.reserve(D);
    for (std::size_t k = 0; k < D; ++k) {
        Genotype g = zero_genotype(D);
        g.values[k] = L;
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<ScoreProfile> pareto_selectable_set(std::size_t D, int L) {
    std::vector<ScoreProfile> out;
    for (const auto& g : pareto_genotypes(D, L)) out.push_back(evaluate_scores(g));
    return out;
}

bool is_pareto_optimal(const Genotype& g, int L) noexcept {
    std::size_t at_limit = 0;
    for (int v : g.values) {
        if (v == L)
            ++at_limit;
        else if (v != 0)
            return false;
    }
    return at_limit == 1;
}

bool is_pareto_optimal(const ScoreProfile& p, int L) noexcept {
    std::size_t at_limit = 0;
    for (Score s : p.scores) {
        if (s == L)
            ++at_limit;
        else if (s != -L)
            return false;
    }
    return at_limit == 1;
}

Genotype mutate(const Genotype& g, double mu, int L, Rng& rng) {
    if (!bernoulli(rng, mu)) return g;
    auto neighbours = adjacent_genotypes(g, L);
    if (neighbours.empty()) return g;
    return neighbours[uniform_index(rng, neighbours.size())];
}

long distance_from_zero(const Genotype& g) noexcept {
    return std::accumulate(g.values.begin(), g.values.end(), 0L);
}

std::string to_string(const Genotype& g) { return fmt::format("{}", fmt::join(g.values, ",")); }

std::string to_string(const ScoreProfile& p) {
    return fmt::format("{}", fmt::join(p.scores, ","));
}

std::vector<long long> parse_integer_list(std::string_view text) {
    std::vector<long long> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t end = text.find(',', pos);
        std::string_view field = text.substr(pos, end == std::string_view::npos ? end : end - pos);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
            field.remove_prefix(1);
        while (!field.empty() &&
               (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
            field.remove_suffix(1);
        if (!field.empty() && field.front() == '+') field.remove_prefix(1);
        long long value = 0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size())
            throw std::invalid_argument(fmt::format("'{}' is not an integer", field));
        out.push_back(value);
        if (end == std::string_view::npos) break;
        pos = end + 1;
    }
    return out;
}

Genotype parse_genotype(std::string_view text, const Bounds& bounds) {
    Genotype g;
    for (long long v : parse_integer_list(text)) {
        if (v > bounds.L)
            throw std::invalid_argument(fmt::format("value {} exceeds L={}", v, bounds.L));
        if (v < 0) throw std::invalid_argument(fmt::format("value {} is negative", v));
        g.values.push_back(static_cast<int>(v));
    }
    validate(g, bounds);
    return g;
}

}  // namespace lexcontra
