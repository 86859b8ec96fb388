#pragma once

#include "scenopt/program.hpp"
#include "scenopt/scenario.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

// Ex-post constraint removal (sampling-and-discarding). Every algorithm is a
// deterministic function of (program, multisample, R): all searches break ties
// by lowest stage index, then lowest sample index.
namespace scenopt::discard {

enum class Algorithm { optimal, greedy, marginal };
std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

enum class AssumptionMode { not_applicable, violated_by_reduced, monotone_declared, fail };
std::string to_string(AssumptionMode m);

struct RemovalResult {
    StageSets removed;  // sorted sample indices, card = R_i
    Solution original;
    Solution reduced_solution;
    double objective_improvement = 0.0;  // original - reduced
    std::vector<AssumptionMode> assumption_mode;
    std::vector<double> objective_trace;  // objective after each removal step (sequential algorithms)
};

// Exhaustive search over all per-stage R_i-subsets. Throws SizeError when the
// number of combinations exceeds `guard`.
RemovalResult remove_optimal(const ScenarioProgram& program, const MultiSample& samples,
                             std::span<const std::uint64_t> discard, std::uint64_t guard = 1'000'000,
                             std::size_t threads = 1);

// sum(R_i) steps, each removing the sample whose removal gives the lowest objective.
RemovalResult remove_greedy(const ScenarioProgram& program, const MultiSample& samples,
                            std::span<const std::uint64_t> discard);

// sum(R_i) steps, each removing the active sample with the largest multiplier.
// When all candidate multipliers are zero the step falls back to greedy over
// the active samples.
RemovalResult remove_marginal(const ScenarioProgram& program, const MultiSample& samples,
                              std::span<const std::uint64_t> discard);

RemovalResult remove(Algorithm algorithm, const ScenarioProgram& program, const MultiSample& samples,
                     std::span<const std::uint64_t> discard, std::size_t threads = 1);

// Per stage with R_i > 0: violated-by-reduced if every removed sample is violated
// (margin > 1e-9) at the reduced solution, else monotone-declared if the stage
// carries the monotone flag, else fail. Stages with R_i = 0 are not_applicable.
std::vector<AssumptionMode> check_discard_assumption(const ScenarioProgram& program, const MultiSample& samples,
                                                     const RemovalResult& result);

struct MonotonicityCounterexample {
    std::size_t trial = 0;
    std::vector<Vector> samples;  // the stage's multisample
    Vector probe;                 // feasible point cut off by the fresh sample
    Vector fresh;                 // the fresh outcome
    Vector stage_minimizer;       // stage-only cost-minimal point (guard box stands in for infinity)
    double probe_value = 0.0;
    double minimizer_value = 0.0;
};

struct MonotonicityReport {
    bool monotone = true;
    std::size_t trials = 0;
    std::size_t skipped = 0;  // trials where no feasible probe was found
    std::optional<MonotonicityCounterexample> counterexample;
};

// Randomized test of: f(xi, delta) > 0  =>  f(x_hat, delta) > 0 for probes xi
// in the stage's sampled feasible set (drawn inside the program box) and the
// stage-only minimizer x_hat. Stops at the first counterexample.
MonotonicityReport monotonicity_empirical_check(const ScenarioProgram& program, std::size_t stage,
                                                std::size_t trials, std::uint64_t seed,
                                                std::size_t max_samples = 8);

}  // namespace scenopt::discard
