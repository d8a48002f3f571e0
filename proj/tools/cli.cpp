#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "lexcontra/landscape.hpp"
#include "lexcontra/probability.hpp"
#include "lexcontra/reachability.hpp"
#include "lexcontra/selection.hpp"
#include "lexcontra/stochastic_model.hpp"

namespace lexcontra::cli {
namespace {

using nlohmann::json;

// Flags shared by the model-driven subcommands. S, D, epsilon and
// epsilon-mode accept comma-separated lists; only `sweep` may pass more
// than one value.
struct ModelFlags {
    std::vector<std::uint64_t> S{30};
    std::vector<std::size_t> D{5};
    int L = 10;
    std::uint64_t G = 500;
    double mu = 0.01;
    double t = 0.5;
    std::vector<double> epsilon{0.0};
    std::vector<std::string> epsilon_mode{"constant"};
    std::string variant = "semi-dynamic";
    std::uint64_t steps = 100'000;
    std::uint64_t seed = 0;
    std::string preset;
    bool normalize_mutation = false;

    CLI::Option* opt_D = nullptr;
    CLI::Option* opt_G = nullptr;
    CLI::Option* opt_steps = nullptr;
};

void add_model_flags(CLI::App* app, ModelFlags& f) {
    app->add_option("--S", f.S, "Population size (selection events per generation)")
        ->delimiter(',');
    f.opt_D = app->add_option("--D", f.D, "Number of objectives")->delimiter(',');
    app->add_option("--L", f.L, "Upper bound of genotype values");
    f.opt_G = app->add_option("--G", f.G, "Generations per epoch");
    app->add_option("--mu", f.mu, "Per-genome mutation probability per epoch");
    app->add_option("--t", f.t, "Survival threshold");
    app->add_option("--epsilon", f.epsilon, "Constant epsilon value(s)")->delimiter(',');
    app->add_option("--epsilon-mode", f.epsilon_mode, "constant or mad")->delimiter(',');
    app->add_option("--variant", f.variant, "static, semi-dynamic or dynamic");
    f.opt_steps = app->add_option("--steps", f.steps, "Epoch budget per run");
    app->add_option("--seed", f.seed, "Master seed");
    app->add_option("--preset", f.preset, "default, or desk: G=50, D=5, steps=10000 unless given");
    app->add_flag("--normalize-mutation", f.normalize_mutation,
                  "Divide mu by the number of neighbours");
}

void apply_preset(ModelFlags& f) {
    if (f.preset.empty() || f.preset == "default") return;
    if (f.preset != "desk") throw std::invalid_argument(fmt::format("unknown preset '{}'", f.preset));
    if (f.opt_G->count() == 0) f.G = 50;
    if (f.opt_D->count() == 0) f.D = {5};
    if (f.opt_steps->count() == 0) f.steps = 10'000;
}

std::vector<EpsilonPolicy> epsilon_policies(const ModelFlags& f) {
    const EpsilonVariant variant = parse_epsilon_variant(f.variant);
    std::vector<EpsilonPolicy> out;
    for (const auto& m : f.epsilon_mode) {
        if (parse_epsilon_mode(m) == EpsilonMode::mad) {
            out.push_back(EpsilonPolicy::mad(variant));
        } else {
            for (double e : f.epsilon) out.push_back(EpsilonPolicy::constant(e, variant));
        }
    }
    if (out.empty()) throw std::invalid_argument("no epsilon setting given");
    for (const auto& p : out) validate(p);
    return out;
}

ModelParams base_params(const ModelFlags& f) {
    ModelParams p;
    p.S = f.S.front();
    p.D = f.D.front();
    p.L = f.L;
    p.G = f.G;
    p.mu = f.mu;
    p.t = f.t;
    p.max_steps = f.steps;
    p.seed = f.seed;
    p.normalize_mutation = f.normalize_mutation;
    p.epsilon = epsilon_policies(f).front();
    return p;
}

ModelParams single_params(const ModelFlags& f) {
    if (f.S.size() != 1 || f.D.size() != 1)
        throw std::invalid_argument("--S and --D take a single value here");
    if (epsilon_policies(f).size() != 1)
        throw std::invalid_argument("--epsilon takes a single value here");
    ModelParams p = base_params(f);
    validate(p);
    return p;
}

// Writes through `fn` to the file at `path`, or to `fallback` when empty.
void emit(const std::string& path, std::ostream& fallback,
          const std::function<void(std::ostream&)>& fn) {
    if (path.empty()) {
        fn(fallback);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
    fn(file);
    if (!file) throw std::runtime_error(fmt::format("failed writing '{}'", path));
}

// One integer profile per non-blank line; '#' starts a comment line.
std::vector<ScoreProfile> read_population(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(fmt::format("cannot open population file '{}'", path));
    std::vector<ScoreProfile> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        ScoreProfile p;
        try {
            for (long long v : parse_integer_list(line)) p.scores.push_back(v);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(fmt::format("{}:{}: {}", path, line_no, e.what()));
        }
        if (!rows.empty() && p.dimension() != rows.front().dimension())
            throw std::invalid_argument(
                fmt::format("{}:{}: ragged rows ({} values, expected {})", path, line_no,
                            p.dimension(), rows.front().dimension()));
        rows.push_back(std::move(p));
    }
    if (rows.empty()) throw std::invalid_argument(fmt::format("population file '{}' is empty", path));
    return rows;
}

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(field, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || field.find_first_not_of(" \t", used) != std::string::npos)
            throw std::invalid_argument(fmt::format("'{}' is not a number", field));
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty value list");
    return out;
}

std::string format_max_d(const std::optional<std::uint64_t>& d) {
    return d ? fmt::format("{}", *d) : std::string("unbounded");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lexicase selection on maximally contradictory objectives", "lexcontra"};
    app.set_config("--config", "",
                   "INI file with one [subcommand] section per command; flags take precedence");
    app.require_subcommand(1);

    // score
    std::size_t score_D = 3;
    int score_L = 10;
    std::string score_genotype;
    auto* score = app.add_subcommand("score", "Score profile of a genotype");
    score->add_option("--D", score_D, "Number of objectives");
    score->add_option("--L", score_L, "Upper bound of genotype values");
    score->add_option("--genotype", score_genotype, "Comma-separated values")->required();

    // mad
    std::string mad_values, mad_population;
    std::size_t mad_objective = 0;
    auto* mad_cmd = app.add_subcommand("mad", "Median absolute deviation epsilon");
    auto* mad_values_opt = mad_cmd->add_option("--values", mad_values, "Comma-separated values");
    auto* mad_pop_opt = mad_cmd->add_option("--population", mad_population, "Population CSV");
    mad_cmd->add_option("--objective", mad_objective, "Objective index for --population");
    mad_values_opt->excludes(mad_pop_opt);

    // select-trace
    std::string trace_population, trace_ordering;
    double trace_epsilon = 0.0;
    std::string trace_mode = "constant", trace_variant = "semi-dynamic";
    std::uint64_t trace_seed = 0;
    std::size_t trace_draws = 1;
    auto* trace_cmd = app.add_subcommand("select-trace", "Per-step survivors of selection events");
    trace_cmd->add_option("--population", trace_population, "Population CSV")->required();
    trace_cmd->add_option("--epsilon", trace_epsilon, "Constant epsilon");
    trace_cmd->add_option("--epsilon-mode", trace_mode, "constant or mad");
    trace_cmd->add_option("--variant", trace_variant, "static, semi-dynamic or dynamic");
    trace_cmd->add_option("--seed", trace_seed, "Seed");
    trace_cmd->add_option("--ordering", trace_ordering, "Fixed objective order, e.g. 1,0,2");
    trace_cmd->add_option("--draws", trace_draws, "Number of selection events");

    // plex
    std::string plex_population, plex_format = "csv", plex_out;
    double plex_epsilon = 0.0;
    std::string plex_mode = "constant";
    auto* plex_cmd = app.add_subcommand("plex", "Exact lexicase selection probabilities");
    plex_cmd->add_option("--population", plex_population, "Population CSV")->required();
    plex_cmd->add_option("--epsilon", plex_epsilon, "Constant epsilon");
    plex_cmd->add_option("--epsilon-mode", plex_mode, "constant or mad");
    plex_cmd->add_option("--format", plex_format, "csv or json");
    plex_cmd->add_option("--out", plex_out, "Output file");

    // survival
    double surv_p = 0.0;
    std::uint64_t surv_S = 512, surv_G = 50'000, surv_hernandez = 0;
    auto* surv_cmd = app.add_subcommand("survival", "Survival probability over G generations");
    auto* surv_p_opt = surv_cmd->add_option("--p", surv_p, "Per-event selection probability");
    surv_cmd->add_option("--S", surv_S, "Population size");
    surv_cmd->add_option("--G", surv_G, "Generations");
    auto* surv_h_opt = surv_cmd->add_option(
        "--hernandez", surv_hernandez, "Single and joint specialist survival at S=512, G=50000");
    surv_p_opt->excludes(surv_h_opt);

    // feasibility
    std::uint64_t feas_S = 512, feas_G = 50'000;
    double feas_t = 0.5;
    bool feas_grid = false;
    std::uint64_t grid_min = 10, grid_max = 100'000;
    std::size_t grid_points = 25;
    std::string feas_out;
    auto* feas_cmd = app.add_subcommand("feasibility", "Largest D satisfying the feasibility bound");
    feas_cmd->add_option("--S", feas_S, "Population size");
    feas_cmd->add_option("--G", feas_G, "Generations");
    feas_cmd->add_option("--t", feas_t, "Survival threshold");
    feas_cmd->add_flag("--grid", feas_grid, "Emit S,G,max_D over a log-spaced grid");
    feas_cmd->add_option("--grid-min", grid_min, "Smallest S and G on the grid");
    feas_cmd->add_option("--grid-max", grid_max, "Largest S and G on the grid");
    feas_cmd->add_option("--grid-points", grid_points, "Points per axis");
    feas_cmd->add_option("--out", feas_out, "Output file");

    // run
    ModelFlags run_flags;
    std::string run_trajectory, run_out;
    bool run_continue = false;
    auto* run_cmd = app.add_subcommand("run", "One stochastic model run");
    add_model_flags(run_cmd, run_flags);
    run_cmd->add_option("--trajectory", run_trajectory, "JSON lines, one per epoch");
    run_cmd->add_flag("--continue", run_continue, "Keep running after the first optimum");
    run_cmd->add_option("--out", run_out, "Output file");

    // sweep
    ModelFlags sweep_flags;
    std::size_t sweep_replicates = 30, sweep_threads = 0;
    std::string sweep_out, sweep_format = "csv";
    auto* sweep_cmd = app.add_subcommand("sweep", "Failure probability over an (S, D, epsilon) grid");
    add_model_flags(sweep_cmd, sweep_flags);
    sweep_cmd->add_option("--replicates", sweep_replicates, "Runs per cell");
    sweep_cmd->add_option("--threads", sweep_threads, "Worker threads (0 = all cores)");
    sweep_cmd->add_option("--out", sweep_out, "Output file");
    sweep_cmd->add_option("--format", sweep_format, "csv or json");

    // reach
    ModelFlags reach_flags;
    std::size_t reach_budget = kDefaultNodeBudget;
    std::string reach_out, reach_start;
    auto* reach_cmd = app.add_subcommand("reach", "Reachability of Pareto-optimal genotypes");
    add_model_flags(reach_cmd, reach_flags);
    reach_cmd->add_option("--budget", reach_budget, "Maximum number of expanded states");
    reach_cmd->add_option("--start", reach_start, "Start genotypes, e.g. 0,0,0;1,0,0");
    reach_cmd->add_option("--out", reach_out, "Graph JSON output file");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*score) {
            const Bounds bounds{score_D, score_L};
            out << to_string(evaluate_scores(parse_genotype(score_genotype, bounds))) << '\n';
        } else if (*mad_cmd) {
            std::vector<double> values;
            if (!mad_population.empty()) {
                const auto rows = read_population(mad_population);
                if (mad_objective >= rows.front().dimension())
                    throw std::invalid_argument("objective index out of range");
                for (const auto& r : rows)
                    values.push_back(static_cast<double>(r.scores[mad_objective]));
            } else if (!mad_values.empty()) {
                values = parse_real_list(mad_values);
            } else {
                throw std::invalid_argument("give --values or --population");
            }
            out << fmt::format("{}\n", mad(values));
        } else if (*trace_cmd) {
            const auto rows = read_population(trace_population);
            const auto pool = SelectionPool::from_profiles(rows);
            EpsilonPolicy policy{parse_epsilon_mode(trace_mode), trace_epsilon,
                                 parse_epsilon_variant(trace_variant)};
            validate(policy);
            std::vector<std::size_t> ordering;
            if (!trace_ordering.empty())
                for (long long v : parse_integer_list(trace_ordering)) {
                    if (v < 0) throw std::invalid_argument("ordering indices must be >= 0");
                    ordering.push_back(static_cast<std::size_t>(v));
                }
            Rng rng(trace_seed);
            for (std::size_t draw = 0; draw < trace_draws; ++draw) {
                SelectionTrace trace;
                if (ordering.empty())
                    select(pool, policy, rng, &trace);
                else
                    select_one(pool, ordering, policy, rng, &trace);
                for (std::size_t s = 0; s < trace.steps.size(); ++s) {
                    const auto& st = trace.steps[s];
                    out << json{{"draw", draw},
                                {"step", s},
                                {"objective", st.objective},
                                {"best", st.reference_best},
                                {"epsilon", st.epsilon},
                                {"survivors", st.survivors}}
                               .dump()
                        << '\n';
                }
                out << json{{"draw", draw},
                            {"final_candidates", trace.final_candidates},
                            {"selected", trace.selected}}
                           .dump()
                    << '\n';
            }
        } else if (*plex_cmd) {
            const auto rows = read_population(plex_population);
            const auto pop = DistinctPopulation::from_profiles(rows);
            const EpsilonPolicy policy{parse_epsilon_mode(plex_mode), plex_epsilon};
            validate(policy);
            const auto eps = generation_epsilons(rows, policy);
            const auto probs = p_lex_all(pop, eps);
            emit(plex_out, out, [&](std::ostream& os) {
                if (plex_format == "json") {
                    json doc = json::array();
                    for (const auto& r : rows)
                        doc.push_back({{"profile", r.scores}, {"p_lex", probs[*pop.index_of(r)]}});
                    os << doc.dump() << '\n';
                } else if (plex_format == "csv") {
                    std::vector<std::string> header;
                    for (std::size_t j = 0; j < pop.dimension(); ++j)
                        header.push_back(fmt::format("o{}", j));
                    header.emplace_back("p_lex");
                    os << fmt::format("{}\n", fmt::join(header, ","));
                    for (const auto& r : rows)
                        os << fmt::format("{},{}\n", to_string(r), probs[*pop.index_of(r)]);
                } else {
                    throw std::invalid_argument(fmt::format("unknown format '{}'", plex_format));
                }
            });
        } else if (*surv_cmd) {
            if (surv_h_opt->count() > 0) {
                out << "D,single,joint\n"
                    << fmt::format("{},{},{}\n", surv_hernandez, hernandez_single(surv_hernandez),
                                   hernandez_joint(surv_hernandez));
            } else if (surv_p_opt->count() > 0) {
                validate(SurvivalParams{surv_S, surv_G, 0.5});
                out << fmt::format("{}\n", p_survival(surv_p, surv_S, surv_G));
            } else {
                throw std::invalid_argument("give --p or --hernandez");
            }
        } else if (*feas_cmd) {
            if (!(feas_t > 0.0 && feas_t < 1.0))
                throw std::invalid_argument(fmt::format("t must lie in (0, 1), got {}", feas_t));
            if (feas_grid) {
                const auto axis = log_spaced(grid_min, grid_max, grid_points);
                const auto cells = feasibility_grid(axis, axis, feas_t);
                emit(feas_out, out, [&](std::ostream& os) {
                    os << "S,G,max_D\n";
                    for (const auto& c : cells)
                        os << fmt::format("{},{},{}\n", c.S, c.G, format_max_d(c.max_D));
                });
            } else {
                const auto d = max_feasible_dimension(SurvivalParams{feas_S, feas_G, feas_t});
                emit(feas_out, out, [&](std::ostream& os) { os << format_max_d(d) << '\n'; });
            }
        } else if (*run_cmd) {
            apply_preset(run_flags);
            ModelParams params = single_params(run_flags);
            params.stop_on_optimum = !run_continue;
            std::ofstream trajectory;
            StepObserver observer;
            if (!run_trajectory.empty()) {
                trajectory.open(run_trajectory, std::ios::binary);
                if (!trajectory)
                    throw std::runtime_error(fmt::format("cannot open '{}'", run_trajectory));
                observer = [&](std::uint64_t t, const FuzzyPopulation& fuzzy,
                               const CrispPopulation& crisp) {
                    json members = json::array();
                    for (const auto& [g, m] : fuzzy)
                        members.push_back({{"genotype", g.values}, {"membership", m}});
                    json kept = json::array();
                    for (const auto& g : crisp) kept.push_back(g.values);
                    trajectory << json{{"step", t}, {"fuzzy", members}, {"crisp", kept}}.dump()
                               << '\n';
                };
            }
            const auto outcome = lexcontra::run(params, observer);
            json final_pop = json::array();
            for (const auto& g : outcome.final_population) final_pop.push_back(g.values);
            json doc{{"found_optimum", outcome.found_optimum},
                     {"first_hit_step", outcome.first_hit_step
                                            ? json(*outcome.first_hit_step)
                                            : json(nullptr)},
                     {"steps_run", outcome.steps_run},
                     {"discovered_profiles", outcome.discovered_profiles.size()},
                     {"final_population", final_pop}};
            emit(run_out, out, [&](std::ostream& os) { os << doc.dump() << '\n'; });
        } else if (*sweep_cmd) {
            apply_preset(sweep_flags);
            const ModelParams base = base_params(sweep_flags);
            SweepGrid grid{sweep_flags.S, sweep_flags.D, epsilon_policies(sweep_flags)};
            if (sweep_format != "csv" && sweep_format != "json")
                throw std::invalid_argument(fmt::format("unknown format '{}'", sweep_format));
            const auto rows = sweep(grid, base, sweep_replicates, sweep_threads);
            emit(sweep_out, out, [&](std::ostream& os) {
                if (sweep_format == "csv") {
                    write_sweep_csv(os, rows);
                    return;
                }
                json doc = json::array();
                for (const auto& r : rows)
                    doc.push_back({{"S", r.params.S},
                                   {"D", r.params.D},
                                   {"epsilon_mode", to_string(r.params.epsilon.mode)},
                                   {"epsilon_value", r.params.epsilon.value},
                                   {"G", r.params.G},
                                   {"L", r.params.L},
                                   {"mu", r.params.mu},
                                   {"t", r.params.t},
                                   {"max_steps", r.params.max_steps},
                                   {"replicates", r.estimate.replicates},
                                   {"failures", r.estimate.failures},
                                   {"p_fail", r.estimate.p_fail},
                                   {"ci_low", r.estimate.ci.low},
                                   {"ci_high", r.estimate.ci.high}});
                os << doc.dump() << '\n';
            });
        } else if (*reach_cmd) {
            apply_preset(reach_flags);
            const ModelParams params = single_params(reach_flags);
            if (reach_budget < 1) throw std::invalid_argument("budget must be at least 1");
            std::vector<Genotype> start;
            if (reach_start.empty()) {
                start.push_back(zero_genotype(params.D));
            } else {
                std::stringstream ss(reach_start);
                std::string item;
                while (std::getline(ss, item, ';'))
                    if (!item.empty()) start.push_back(parse_genotype(item, params.bounds()));
            }
            const auto graph = explore(ReachState::make(std::move(start)), params, reach_budget);
            if (!reach_out.empty())
                emit(reach_out, out, [&](std::ostream& os) { os << export_graph(graph) << '\n'; });
            out << to_string(graph.classification) << '\n';
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace lexcontra::cli
