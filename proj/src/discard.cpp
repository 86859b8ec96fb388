#include "scenopt/discard.hpp"

#include "scenopt/errors.hpp"
#include "scenopt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scenopt::discard {

namespace {

constexpr double kViolationMargin = 1e-9;

bool strictly_better(double candidate, double incumbent) {
    if (!std::isfinite(incumbent)) return std::isfinite(candidate) || candidate < incumbent;
    return candidate < incumbent - 1e-12 * std::max(1.0, std::fabs(incumbent));
}

void check_counts(const ScenarioSystem& sys, std::span<const std::uint64_t> discard) {
    SCENOPT_REQUIRE(discard.size() == sys.stage_count(), PreconditionError, "one discard count per stage required");
    for (std::size_t i = 0; i < discard.size(); ++i) {
        SCENOPT_REQUIRE(discard[i] <= sys.sample_count(i), PreconditionError,
                        "stage " + std::to_string(i) + ": cannot discard more samples than drawn");
    }
}

RemovalResult finish(const ScenarioProgram& program, const MultiSample& samples, const ScenarioSystem& sys,
                     const ScenarioSystem::Mask& keep, Solution original, std::vector<double> trace) {
    RemovalResult out;
    out.removed.assign(sys.stage_count(), {});
    for (std::size_t i = 0; i < sys.stage_count(); ++i) {
        for (std::size_t s = 0; s < sys.sample_count(i); ++s) {
            if (!keep[sys.global_index(i, s)]) out.removed[i].push_back(s);
        }
    }
    out.reduced_solution = sys.solve(keep);
    out.original = std::move(original);
    out.objective_improvement = out.original.objective - out.reduced_solution.objective;
    out.objective_trace = std::move(trace);
    out.assumption_mode = check_discard_assumption(program, samples, out);
    return out;
}

// Lexicographic enumeration of all r-subsets of {0..n-1}.
std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t r) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> c(r);
    for (std::size_t i = 0; i < r; ++i) c[i] = i;
    while (true) {
        out.push_back(c);
        if (r == 0) break;
        std::size_t i = r;
        while (i > 0 && c[i - 1] == n - r + i - 1) --i;
        if (i == 0) break;
        ++c[i - 1];
        for (std::size_t j = i; j < r; ++j) c[j] = c[j - 1] + 1;
    }
    return out;
}

double log_choose(std::size_t n, std::size_t k) {
    return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1)
           - std::lgamma(static_cast<double>(n - k) + 1);
}

}  // namespace

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::optimal: return "optimal";
        case Algorithm::greedy: return "greedy";
        case Algorithm::marginal: return "marginal";
    }
    return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "optimal") return Algorithm::optimal;
    if (name == "greedy") return Algorithm::greedy;
    if (name == "marginal") return Algorithm::marginal;
    throw DomainError("unknown removal algorithm '" + name + "'");
}

std::string to_string(AssumptionMode m) {
    switch (m) {
        case AssumptionMode::not_applicable: return "not-applicable";
        case AssumptionMode::violated_by_reduced: return "violated-by-reduced";
        case AssumptionMode::monotone_declared: return "monotone-declared";
        case AssumptionMode::fail: return "FAIL";
    }
    return "unknown";
}

RemovalResult remove_optimal(const ScenarioProgram& program, const MultiSample& samples,
                             std::span<const std::uint64_t> discard, std::uint64_t guard, std::size_t threads) {
    const ScenarioSystem sys(program, samples);
    check_counts(sys, discard);
    Solution original = sys.solve();
    SCENOPT_REQUIRE(original.ok(), PreconditionError, "constraint removal requires a feasible program");

    double log_total = 0.0;
    for (std::size_t i = 0; i < discard.size(); ++i) log_total += log_choose(sys.sample_count(i), discard[i]);
    SCENOPT_REQUIRE(log_total <= std::log(static_cast<double>(guard)) + 1e-9, SizeError,
                    "optimal removal exceeds the combination guard");

    std::vector<std::vector<std::vector<std::size_t>>> per_stage;
    std::size_t total = 1;
    for (std::size_t i = 0; i < discard.size(); ++i) {
        per_stage.push_back(combinations(sys.sample_count(i), discard[i]));
        total *= per_stage.back().size();
    }

    auto mask_for = [&](std::size_t t) {
        ScenarioSystem::Mask keep = sys.full_mask();
        // Stage 0 is the most significant digit, so t orders tuples lexicographically.
        for (std::size_t i = per_stage.size(); i-- > 0;) {
            const std::size_t radix = per_stage[i].size();
            for (std::size_t s : per_stage[i][t % radix]) keep[sys.global_index(i, s)] = 0;
            t /= radix;
        }
        return keep;
    };

    struct Best {
        double objective = std::numeric_limits<double>::infinity();
        std::size_t index = 0;
        bool found = false;
    };
    const std::size_t n_threads = std::max<std::size_t>(1, std::min(threads, total));
    std::vector<Best> best(n_threads);
    parallel_chunks(total, n_threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Best b;
        for (std::size_t t = begin; t < end; ++t) {
            const Solution s = sys.solve(mask_for(t));
            if (!s.ok()) continue;
            if (!b.found || strictly_better(s.objective, b.objective)) {
                b = {s.objective, t, true};
            }
        }
        best[chunk] = b;
    });
    Best winner;
    for (const Best& b : best) {
        if (b.found && (!winner.found || strictly_better(b.objective, winner.objective))) winner = b;
    }
    SCENOPT_REQUIRE(winner.found, NumericalError, "optimal removal found no feasible reduced problem");
    return finish(program, samples, sys, mask_for(winner.index), std::move(original), {});
}

namespace {

// One greedy step over `candidates` (global indices in stage/sample order).
std::size_t greedy_pick(const ScenarioSystem& sys, const ScenarioSystem::Mask& keep, const Solution& current,
                        const std::vector<std::size_t>& candidates) {
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t best_g = candidates.front();
    bool found = false;
    for (std::size_t g : candidates) {
        double val = current.objective;
        // Removing a slack constraint cannot move the optimizer.
        if (sys.is_tight(g, current.x)) {
            ScenarioSystem::Mask reduced = keep;
            reduced[g] = 0;
            const Solution s = sys.solve(reduced);
            if (!s.ok()) continue;
            val = s.objective;
        }
        if (!found || strictly_better(val, best_val)) {
            best_val = val;
            best_g = g;
            found = true;
        }
    }
    return best_g;
}

std::vector<std::size_t> budget_candidates(const ScenarioSystem& sys, const ScenarioSystem::Mask& keep,
                                           const std::vector<std::uint64_t>& remaining, bool active_only,
                                           const Solution& current) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < sys.stage_count(); ++i) {
        if (remaining[i] == 0) continue;
        if (active_only) {
            for (std::size_t s : current.active[i]) out.push_back(sys.global_index(i, s));
        } else {
            for (std::size_t s = 0; s < sys.sample_count(i); ++s) {
                const std::size_t g = sys.global_index(i, s);
                if (keep[g]) out.push_back(g);
            }
        }
    }
    return out;
}

template <typename Picker>
RemovalResult sequential_removal(const ScenarioProgram& program, const MultiSample& samples,
                                 std::span<const std::uint64_t> discard, Picker pick) {
    const ScenarioSystem sys(program, samples);
    check_counts(sys, discard);
    Solution original = sys.solve();
    SCENOPT_REQUIRE(original.ok(), PreconditionError, "constraint removal requires a feasible program");

    ScenarioSystem::Mask keep = sys.full_mask();
    std::vector<std::uint64_t> remaining(discard.begin(), discard.end());
    std::uint64_t steps = 0;
    for (auto r : remaining) steps += r;

    Solution current = original;
    std::vector<double> trace{current.objective};
    for (std::uint64_t step = 0; step < steps; ++step) {
        const std::size_t g = pick(sys, keep, remaining, current);
        keep[g] = 0;
        --remaining[sys.stage_of(g)];
        current = sys.solve(keep);
        trace.push_back(current.objective);
    }
    return finish(program, samples, sys, keep, std::move(original), std::move(trace));
}

}  // namespace

RemovalResult remove_greedy(const ScenarioProgram& program, const MultiSample& samples,
                            std::span<const std::uint64_t> discard) {
    return sequential_removal(program, samples, discard,
                              [](const ScenarioSystem& sys, const ScenarioSystem::Mask& keep,
                                 const std::vector<std::uint64_t>& remaining, const Solution& current) {
                                  return greedy_pick(sys, keep, current,
                                                     budget_candidates(sys, keep, remaining, false, current));
                              });
}

RemovalResult remove_marginal(const ScenarioProgram& program, const MultiSample& samples,
                              std::span<const std::uint64_t> discard) {
    return sequential_removal(
        program, samples, discard,
        [](const ScenarioSystem& sys, const ScenarioSystem::Mask& keep, const std::vector<std::uint64_t>& remaining,
           const Solution& current) {
            const auto active = budget_candidates(sys, keep, remaining, true, current);
            if (active.empty()) return greedy_pick(sys, keep, current, budget_candidates(sys, keep, remaining, false, current));
            double best = 0.0;
            std::size_t best_g = active.front();
            for (std::size_t g : active) {
                const std::size_t i = sys.stage_of(g);
                const double dual = current.duals[i][g - sys.global_index(i, 0)];
                if (dual > best * (1.0 + 1e-12) + 1e-12) {
                    best = dual;
                    best_g = g;
                }
            }
            if (best <= 1e-12) return greedy_pick(sys, keep, current, active);
            return best_g;
        });
}

RemovalResult remove(Algorithm algorithm, const ScenarioProgram& program, const MultiSample& samples,
                     std::span<const std::uint64_t> discard, std::size_t threads) {
    switch (algorithm) {
        case Algorithm::optimal: return remove_optimal(program, samples, discard, 1'000'000, threads);
        case Algorithm::greedy: return remove_greedy(program, samples, discard);
        case Algorithm::marginal: return remove_marginal(program, samples, discard);
    }
    throw DomainError("unknown removal algorithm");
}

std::vector<AssumptionMode> check_discard_assumption(const ScenarioProgram& program, const MultiSample& samples,
                                                     const RemovalResult& result) {
    const ScenarioSystem sys(program, samples);
    std::vector<AssumptionMode> out(sys.stage_count(), AssumptionMode::not_applicable);
    if (!result.reduced_solution.ok()) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (!result.removed[i].empty()) out[i] = AssumptionMode::fail;
        }
        return out;
    }
    for (std::size_t i = 0; i < sys.stage_count(); ++i) {
        if (i >= result.removed.size() || result.removed[i].empty()) continue;
        bool all_violated = true;
        for (std::size_t s : result.removed[i]) {
            if (sys.sample_value(sys.global_index(i, s), result.reduced_solution.x) <= kViolationMargin) {
                all_violated = false;
                break;
            }
        }
        if (all_violated) {
            out[i] = AssumptionMode::violated_by_reduced;
        } else if (program.stages[i].monotone) {
            out[i] = AssumptionMode::monotone_declared;
        } else {
            out[i] = AssumptionMode::fail;
        }
    }
    return out;
}

MonotonicityReport monotonicity_empirical_check(const ScenarioProgram& program, std::size_t stage,
                                                std::size_t trials, std::uint64_t seed, std::size_t max_samples) {
    program.validate();
    SCENOPT_REQUIRE(stage < program.stages.size(), PreconditionError, "stage index out of range");
    const StageSpec& st = program.stages[stage];
    SCENOPT_REQUIRE(st.sampler.has_value(), ConfigError, "monotonicity check needs a sampler");
    SCENOPT_REQUIRE(max_samples >= 1, PreconditionError, "max_samples must be >= 1");

    const std::size_t d = program.dimension;
    double extent = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        extent = std::max({extent, std::fabs(program.box.lower[j]), std::fabs(program.box.upper[j])});
    }
    // Stage alone, with X and the other stages dropped; the guard box plays the
    // role of the extended reals. Cost coordinates get a wider guard so that an
    // unbounded minimizer stays on the sampled constraints (the limit along the
    // minimizing ray) instead of stopping at a guard corner.
    const double guard = 1e4 * (1.0 + extent);
    ScenarioProgram alone;
    alone.dimension = d;
    alone.cost = program.cost;
    alone.box = {Vector(d, -guard), Vector(d, guard)};
    for (std::size_t j = 0; j < d; ++j) {
        if (program.cost[j] != 0.0) {
            alone.box.lower[j] = -1e3 * guard;
            alone.box.upper[j] = 1e3 * guard;
        }
    }
    alone.stages = {st};
    alone.box_is_guard = true;

    const rng::CounterRng probe_rng({seed, 0, rng::Namespace::probe});
    const rng::CounterRng fresh_rng({seed, 0, rng::Namespace::auxiliary});

    MonotonicityReport report;
    for (std::size_t t = 0; t < trials; ++t) {
        ++report.trials;
        const std::uint64_t k = 1 + t % max_samples;
        const MultiSample ms = draw_multisample(alone, std::span<const std::uint64_t>(&k, 1), seed, t);
        const ScenarioSystem sys(alone, ms);
        const Solution hat = sys.solve();
        if (!hat.ok()) {
            ++report.skipped;
            continue;
        }

        std::vector<std::vector<Row>> sample_rows;
        for (const Vector& delta : ms.outcomes[0]) sample_rows.push_back(generate_rows(st.generator, delta, d));
        Vector probe(d);
        bool feasible = false;
        for (std::uint32_t attempt = 0; attempt < 1000 && !feasible; ++attempt) {
            for (std::size_t j = 0; j < d; ++j) {
                const double u = probe_rng.uniform(attempt, t, static_cast<std::uint32_t>(j));
                probe[j] = program.box.lower[j] + (program.box.upper[j] - program.box.lower[j]) * u;
            }
            feasible = std::all_of(sample_rows.begin(), sample_rows.end(),
                                   [&](const auto& rows) { return constraint_value(rows, probe) <= 0.0; });
        }
        if (!feasible) {
            ++report.skipped;
            continue;
        }

        const Vector fresh = st.sampler->draw(fresh_rng, 0, t);
        const auto fresh_rows = generate_rows(st.generator, fresh, d);
        const double fp = constraint_value(fresh_rows, probe);
        const double fx = constraint_value(fresh_rows, hat.x);
        if (fp > kViolationMargin && fx <= 0.0) {
            report.monotone = false;
            report.counterexample = MonotonicityCounterexample{t, ms.outcomes[0], probe, fresh, hat.x, fp, fx};
            return report;
        }
    }
    return report;
}

}  // namespace scenopt::discard
