#include "scenopt/scenario.hpp"

#include "scenopt/bounds.hpp"
#include "scenopt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace scenopt {

namespace {

double inf_distance(const Vector& a, const Vector& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::fabs(a[j] - b[j]));
    return m;
}

bool row_tight(const Row& r, std::span<const double> x) {
    double v = -r.b;
    double scale = std::max(1.0, std::fabs(r.b));
    for (std::size_t j = 0; j < r.a.size(); ++j) {
        v += r.a[j] * x[j];
        scale = std::max(scale, std::fabs(r.a[j] * x[j]));
    }
    return std::fabs(v) <= kSolverTol * scale;
}

}  // namespace

ScenarioSystem::ScenarioSystem(const ScenarioProgram& program, const MultiSample& samples)
    : program_(&program), samples_(&samples) {
    program.validate();
    SCENOPT_REQUIRE(samples.outcomes.size() == program.stages.size(), PreconditionError,
                    "multisample stage count does not match the program");
    problem_.dimension = program.dimension;
    problem_.cost = program.cost;
    problem_.lower = program.box.lower;
    problem_.upper = program.box.upper;
    problem_.rows = program.deterministic_rows;
    det_rows_ = problem_.rows.size();

    stage_offset_.push_back(0);
    for (std::size_t i = 0; i < program.stages.size(); ++i) {
        for (const Vector& delta : samples.outcomes[i]) {
            row_begin_.push_back(problem_.rows.size());
            for (Row& r : generate_rows(program.stages[i].generator, delta, program.dimension)) {
                problem_.rows.push_back(std::move(r));
            }
        }
        stage_offset_.push_back(stage_offset_.back() + samples.outcomes[i].size());
    }
    row_begin_.push_back(problem_.rows.size());
}

std::size_t ScenarioSystem::stage_of(std::size_t global) const {
    const auto it = std::upper_bound(stage_offset_.begin(), stage_offset_.end(), global);
    return static_cast<std::size_t>(it - stage_offset_.begin()) - 1;
}

double ScenarioSystem::sample_value(std::size_t global, std::span<const double> x) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = row_begin_[global]; k < row_begin_[global + 1]; ++k) {
        const Row& r = problem_.rows[k];
        double v = -r.b;
        for (std::size_t j = 0; j < r.a.size(); ++j) v += r.a[j] * x[j];
        worst = std::max(worst, v);
    }
    return worst;
}

bool ScenarioSystem::is_tight(std::size_t global, std::span<const double> x) const {
    for (std::size_t k = row_begin_[global]; k < row_begin_[global + 1]; ++k) {
        if (row_tight(problem_.rows[k], x)) return true;
    }
    return false;
}

Solution ScenarioSystem::solve(const Mask& keep) const {
    SCENOPT_REQUIRE(keep.size() == total_samples(), PreconditionError, "sample mask length mismatch");
    std::vector<std::uint8_t> enabled(problem_.rows.size(), 1);
    for (std::size_t g = 0; g < keep.size(); ++g) {
        if (keep[g]) continue;
        for (std::size_t k = row_begin_[g]; k < row_begin_[g + 1]; ++k) enabled[k] = 0;
    }
    const lp::Result res = lp::solve(problem_, enabled);

    Solution sol;
    sol.iterations = res.iterations;
    const std::size_t n_stages = stage_count();
    sol.active.assign(n_stages, {});
    sol.duals.resize(n_stages);
    for (std::size_t i = 0; i < n_stages; ++i) sol.duals[i].assign(sample_count(i), 0.0);
    if (res.status != lp::Status::optimal) {
        sol.status = SolveStatus::infeasible;
        return sol;
    }
    sol.status = SolveStatus::optimal;
    sol.x = res.x;
    sol.objective = res.objective;
    sol.lower_duals = res.lower_duals;
    sol.upper_duals = res.upper_duals;
    sol.deterministic_duals.assign(res.row_duals.begin(), res.row_duals.begin() + static_cast<std::ptrdiff_t>(det_rows_));
    for (std::size_t i = 0; i < n_stages; ++i) {
        for (std::size_t s = 0; s < sample_count(i); ++s) {
            const std::size_t g = global_index(i, s);
            if (!keep[g]) continue;
            double dual = 0.0;
            for (std::size_t k = row_begin_[g]; k < row_begin_[g + 1]; ++k) dual += res.row_duals[k];
            sol.duals[i][s] = dual;
            if (is_tight(g, sol.x)) sol.active[i].push_back(s);
        }
    }
    if (program_->box_is_guard) {
        for (std::size_t j = 0; j < sol.x.size(); ++j) {
            const double lo = program_->box.lower[j];
            const double hi = program_->box.upper[j];
            if (std::fabs(sol.x[j] - lo) <= kSolverTol * std::max(1.0, std::fabs(lo))
                || std::fabs(sol.x[j] - hi) <= kSolverTol * std::max(1.0, std::fabs(hi))) {
                sol.status = SolveStatus::unbounded_guard;
                break;
            }
        }
    }
    return sol;
}

MultiSample draw_multisample(const ScenarioProgram& program, const bounds::SampleSizePlan& plan, std::uint64_t seed,
                             std::uint64_t replication) {
    SCENOPT_REQUIRE(plan.stages.size() == program.stages.size(), PreconditionError,
                    "plan stage count does not match the program");
    std::vector<std::uint64_t> sizes;
    for (const auto& s : plan.stages) sizes.push_back(s.sample_size);
    return draw_multisample(program, sizes, seed, replication);
}

MultiSample draw_multisample(const ScenarioProgram& program, std::span<const std::uint64_t> sample_sizes,
                             std::uint64_t seed, std::uint64_t replication) {
    SCENOPT_REQUIRE(sample_sizes.size() == program.stages.size(), PreconditionError,
                    "one sample size per stage required");
    const rng::CounterRng train({seed, replication, rng::Namespace::training});
    const rng::CounterRng ties({seed, replication, rng::Namespace::tie_break});

    MultiSample ms;
    ms.provenance = {seed, replication, "philox4x32-10"};
    ms.outcomes.resize(program.stages.size());
    ms.tie_breaks.resize(program.stages.size());
    std::set<double> used;
    auto draw_tie = [&](std::uint32_t stage, std::uint64_t sample) {
        for (std::uint32_t attempt = 0;; ++attempt) {
            const double u = ties.uniform(stage, sample, attempt);
            if (used.insert(u).second) return u;
        }
    };
    for (std::size_t i = 0; i < program.stages.size(); ++i) {
        const StageSpec& st = program.stages[i];
        SCENOPT_REQUIRE(st.sampler.has_value(), ConfigError, "stage " + std::to_string(i) + " has no sampler");
        const auto stage = static_cast<std::uint32_t>(i);
        ms.outcomes[i].reserve(sample_sizes[i]);
        ms.tie_breaks[i].reserve(sample_sizes[i]);
        for (std::uint64_t k = 0; k < sample_sizes[i]; ++k) {
            ms.outcomes[i].push_back(st.sampler->draw(train, stage, k));
            ms.tie_breaks[i].push_back(draw_tie(stage, k));
        }
    }
    ms.domain_tie_break = draw_tie(static_cast<std::uint32_t>(program.stages.size()), 0);
    return ms;
}

Solution solve(const ScenarioProgram& program, const MultiSample& samples) {
    return ScenarioSystem(program, samples).solve();
}

StageSets support_set(const ScenarioSystem& system, const ScenarioSystem::Mask& keep, const Solution& solution) {
    SCENOPT_REQUIRE(solution.ok(), PreconditionError, "support set requires an optimal solution");
    StageSets out(system.stage_count());
    for (std::size_t i = 0; i < system.stage_count(); ++i) {
        // Only constraints tight at x* can be support constraints.
        for (std::size_t s : solution.active[i]) {
            const std::size_t g = system.global_index(i, s);
            if (!keep[g]) continue;
            ScenarioSystem::Mask reduced = keep;
            reduced[g] = 0;
            const Solution r = system.solve(reduced);
            if (!r.ok() || inf_distance(r.x, solution.x) > kDisplacementTol) out[i].push_back(s);
        }
    }
    return out;
}

StageSets support_set(const ScenarioProgram& program, const MultiSample& samples, const Solution& solution) {
    const ScenarioSystem system(program, samples);
    return support_set(system, system.full_mask(), solution);
}

EssentialSetReport essential_sets_bruteforce(const ScenarioProgram& program, const MultiSample& samples,
                                             std::size_t max_total_constraints) {
    SCENOPT_REQUIRE(max_total_constraints <= 16, SizeError, "brute-force guard is limited to 16 constraints");
    const ScenarioSystem system(program, samples);
    const std::size_t total = system.total_samples();
    SCENOPT_REQUIRE(total <= max_total_constraints, SizeError,
                    "essential-set enumeration over " + std::to_string(total) + " constraints exceeds the guard of "
                        + std::to_string(max_total_constraints));
    const Solution full = system.solve();
    SCENOPT_REQUIRE(full.ok(), PreconditionError, "essential sets require a feasible program");

    EssentialSetReport report;
    const std::uint32_t n_masks = std::uint32_t{1} << total;
    for (std::uint32_t bits = 0; bits < n_masks; ++bits) {
        ScenarioSystem::Mask keep(total, 0);
        for (std::size_t g = 0; g < total; ++g) keep[g] = (bits >> g) & 1u;
        const Solution red = system.solve(keep);
        if (!red.ok() || inf_distance(red.x, full.x) > kDisplacementTol) continue;

        bool all_support = true;
        for (std::size_t g = 0; g < total && all_support; ++g) {
            if (!keep[g]) continue;
            if (!system.is_tight(g, red.x)) {
                all_support = false;
                break;
            }
            ScenarioSystem::Mask without = keep;
            without[g] = 0;
            const Solution r = system.solve(without);
            if (r.ok() && inf_distance(r.x, red.x) <= kDisplacementTol) all_support = false;
        }
        if (!all_support) continue;

        EssentialSet set;
        set.members.assign(system.stage_count(), {});
        set.tie_break_sum = samples.domain_tie_break;
        for (std::size_t g = 0; g < total; ++g) {
            if (!keep[g]) continue;
            const std::size_t i = system.stage_of(g);
            const std::size_t s = g - system.global_index(i, 0);
            set.members[i].push_back(s);
            set.tie_break_sum += samples.tie_breaks[i][s];
            ++set.cardinality;
        }
        report.sets.push_back(std::move(set));
    }
    SCENOPT_REQUIRE(!report.sets.empty(), NumericalError, "no essential set found");
    report.minimal = *std::min_element(report.sets.begin(), report.sets.end(), [](const auto& a, const auto& b) {
        if (a.cardinality != b.cardinality) return a.cardinality < b.cardinality;
        return a.tie_break_sum < b.tie_break_sum;
    });
    return report;
}

bool sampling_lemma_check(const ScenarioProgram& program, const MultiSample& samples, const Vector& extra_sample,
                          std::size_t stage) {
    SCENOPT_REQUIRE(stage < program.stages.size(), PreconditionError, "stage index out of range");
    const Solution base = solve(program, samples);
    SCENOPT_REQUIRE(base.ok(), PreconditionError, "sampling lemma check requires a feasible program");
    const auto rows = generate_rows(program.stages[stage].generator, extra_sample, program.dimension);
    if (constraint_value(rows, base.x) <= kSolverTol) return true;

    MultiSample augmented = samples;
    const std::size_t new_index = augmented.outcomes[stage].size();
    augmented.outcomes[stage].push_back(extra_sample);
    std::set<double> used(augmented.tie_breaks[stage].begin(), augmented.tie_breaks[stage].end());
    for (const auto& t : augmented.tie_breaks) used.insert(t.begin(), t.end());
    used.insert(augmented.domain_tie_break);
    const rng::CounterRng ties({samples.provenance.seed, samples.provenance.replication, rng::Namespace::tie_break});
    double tb = 0.0;
    for (std::uint32_t attempt = 0;; ++attempt) {
        tb = ties.uniform(static_cast<std::uint32_t>(stage), new_index, attempt);
        if (!used.count(tb)) break;
    }
    augmented.tie_breaks[stage].push_back(tb);

    const EssentialSetReport report = essential_sets_bruteforce(program, augmented);
    const auto& members = report.minimal.members[stage];
    return std::find(members.begin(), members.end(), new_index) != members.end();
}

}  // namespace scenopt
