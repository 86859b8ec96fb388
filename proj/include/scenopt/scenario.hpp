#pragma once

#include "scenopt/lp.hpp"
#include "scenopt/program.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace scenopt {

namespace bounds {
struct SampleSizePlan;
}

// Optimizer displacement that marks a constraint as support; 100x the solver tolerance.
inline constexpr double kDisplacementTol = 1e-7;
inline constexpr double kSolverTol = 1e-9;

// Per-stage sets of sample indices.
using StageSets = std::vector<std::vector<std::size_t>>;

// Program and multisample flattened into one LP. Samples are addressed by a
// global index (stage offset + sample index); the sample, with all rows its
// generator produces, is the unit of removal.
class ScenarioSystem {
public:
    using Mask = std::vector<std::uint8_t>;  // one entry per global sample, 1 = kept

    ScenarioSystem(const ScenarioProgram& program, const MultiSample& samples);

    std::size_t stage_count() const { return stage_offset_.size() - 1; }
    std::size_t sample_count(std::size_t stage) const { return stage_offset_[stage + 1] - stage_offset_[stage]; }
    std::size_t total_samples() const { return stage_offset_.back(); }
    std::size_t global_index(std::size_t stage, std::size_t sample) const { return stage_offset_[stage] + sample; }
    std::size_t stage_of(std::size_t global) const;

    Mask full_mask() const { return Mask(total_samples(), 1); }

    Solution solve(const Mask& keep) const;
    Solution solve() const { return solve(full_mask()); }

    // max over the sample's rows of a^T x - b.
    double sample_value(std::size_t global, std::span<const double> x) const;
    bool is_tight(std::size_t global, std::span<const double> x) const;

    const ScenarioProgram& program() const { return *program_; }
    const MultiSample& samples() const { return *samples_; }

private:
    const ScenarioProgram* program_;
    const MultiSample* samples_;
    lp::Problem problem_;
    std::size_t det_rows_ = 0;
    std::vector<std::size_t> stage_offset_;
    std::vector<std::size_t> row_begin_;  // per global sample, plus sentinel
};

// K_i i.i.d. outcomes per stage from the counter stream (seed, replication, stage, index).
MultiSample draw_multisample(const ScenarioProgram& program, const bounds::SampleSizePlan& plan, std::uint64_t seed,
                             std::uint64_t replication = 0);
MultiSample draw_multisample(const ScenarioProgram& program, std::span<const std::uint64_t> sample_sizes,
                             std::uint64_t seed, std::uint64_t replication = 0);

// Unique lexicographic optimizer of the sampled program.
Solution solve(const ScenarioProgram& program, const MultiSample& samples);

// Samples whose removal moves the optimizer by more than kDisplacementTol.
StageSets support_set(const ScenarioProgram& program, const MultiSample& samples, const Solution& solution);
StageSets support_set(const ScenarioSystem& system, const ScenarioSystem::Mask& keep, const Solution& solution);

struct EssentialSet {
    StageSets members;  // the set X is implicitly a member of every essential set
    std::size_t cardinality = 0;
    double tie_break_sum = 0.0;  // includes the tie-break value of X
};

struct EssentialSetReport {
    std::vector<EssentialSet> sets;
    EssentialSet minimal;  // minimal cardinality, then lowest tie-break sum
};

// Exhaustive enumeration over all sample subsets. Throws SizeError when the
// multisample has more than max_total_constraints samples (at most 16).
EssentialSetReport essential_sets_bruteforce(const ScenarioProgram& program, const MultiSample& samples,
                                             std::size_t max_total_constraints = 16);

// Checks on one instance: if x* violates the extra sample's constraint, that
// constraint belongs to the minimal essential set of the augmented problem.
bool sampling_lemma_check(const ScenarioProgram& program, const MultiSample& samples, const Vector& extra_sample,
                          std::size_t stage);

// Numerical rank (SVD, relative tolerance) of the stacked row vectors.
int support_rank_linear(const std::vector<Vector>& rows, double tol = 1e-10);

// Rank of a symmetric PSD matrix given as rows. Throws DomainError if Q is not symmetric PSD.
int support_rank_quadratic(const std::vector<Vector>& q, double tol = 1e-10);

}  // namespace scenopt
