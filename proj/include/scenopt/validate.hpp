#pragma once

#include "scenopt/bounds.hpp"
#include "scenopt/discard.hpp"
#include "scenopt/program.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace scenopt::validate {

struct Interval {
    double low = 0.0;
    double high = 1.0;
};

// Exact binomial interval at confidence 1 - alpha. Interior counts use the
// equal-tailed form; for k = 0 or k = n the open side gets the full alpha,
// e.g. [alpha^(1/n), 1] when every trial is a success.
Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double alpha);

struct ViolationEstimate {
    std::size_t stage = 0;
    std::uint64_t n_val = 0;
    std::uint64_t violations = 0;
    double point = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
};

// Counts strict violations f_i(x, delta) > 0 over n_val fresh outcomes drawn
// from the validation stream of (seed, replication).
ViolationEstimate estimate_violation(const ScenarioProgram& program, std::size_t stage, const Vector& x,
                                     std::uint64_t n_val, double alpha, std::uint64_t seed,
                                     std::uint64_t replication = 0, std::size_t threads = 1);

// Closed-form violation probability for two stage shapes with a uniform or
// normal component: one row with fixed left-hand side and a right-hand side
// driven by a single component, or a single cuboid axis. Returns nullopt for
// every other stage.
std::optional<double> exact_violation(const ScenarioProgram& program, std::size_t stage, const Vector& x);

struct SurveyOptions {
    std::uint64_t replications = 0;
    std::uint64_t seed = 0;
    std::uint64_t n_val = 10'000;
    double alpha = 0.05;
    discard::Algorithm algorithm = discard::Algorithm::greedy;
    bool prefer_exact = true;  // use exact_violation where the stage admits it
    std::size_t threads = 1;
};

struct SurveyRecord {
    std::uint64_t replication = 0;
    std::size_t stage = 0;
    double violation = 0.0;
    bool exceeds = false;  // violation > eps_i
};

struct SurveyResult {
    std::vector<SurveyRecord> records;  // replication-major, stage-minor; feasible replications only
    std::uint64_t replications = 0;
    std::uint64_t infeasible = 0;
    std::vector<std::uint64_t> exceedances;  // per stage
    std::vector<double> exceed_frequency;    // exceedances / feasible replications

    std::vector<double> violations(std::size_t stage) const;
};

// Repeats draw -> solve -> discard (stages with R_i > 0) -> estimate.
SurveyResult violation_survey(const ScenarioProgram& program, const bounds::SampleSizePlan& plan,
                              const SurveyOptions& options);

std::string survey_csv(const SurveyResult& result);

}  // namespace scenopt::validate
