#include "scenopt/bounds.hpp"
#include "scenopt/cuboid.hpp"
#include "scenopt/errors.hpp"
#include "scenopt/probkernel.hpp"
#include "scenopt/rng.hpp"
#include "scenopt/validate.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace scenopt;
using namespace scenopt::validate;

TEST_CASE("clopper-pearson intervals") {
    Interval ci = clopper_pearson(1, 1, 0.05);
    CHECK(ci.low == doctest::Approx(0.05));
    CHECK(ci.high == 1.0);
    ci = clopper_pearson(0, 20, 0.05);
    CHECK(ci.low == 0.0);
    CHECK(ci.high == doctest::Approx(1 - std::pow(0.05, 1.0 / 20)));
    ci = clopper_pearson(3, 10, 0.05);
    CHECK(ci.low == doctest::Approx(0.06673951117773447).epsilon(1e-9));
    CHECK(ci.high == doctest::Approx(0.6524528500599973).epsilon(1e-9));
    ci = clopper_pearson(17, 100, 0.01);
    CHECK(ci.low == doctest::Approx(0.08594725992390391).epsilon(1e-9));
    CHECK(ci.high == doctest::Approx(0.28675950576026876).epsilon(1e-9));
    CHECK_THROWS_AS(clopper_pearson(0, 0, 0.05), PreconditionError);
    CHECK_THROWS_AS(clopper_pearson(3, 2, 0.05), PreconditionError);
}

TEST_CASE("clopper-pearson coverage") {
    const rng::CounterRng r({3, 0, rng::Namespace::auxiliary});
    const double p = 0.13;
    const int trials = 10000, n = 60;
    int covered = 0;
    for (int t = 0; t < trials; ++t) {
        std::uint64_t k = 0;
        for (int j = 0; j < n; ++j) k += r.uniform(0, static_cast<std::uint64_t>(t), static_cast<std::uint32_t>(j)) < p;
        const Interval ci = clopper_pearson(k, n, 0.05);
        covered += ci.low <= p && p <= ci.high;
    }
    const double sigma = std::sqrt(0.95 * 0.05 / trials);
    CHECK(static_cast<double>(covered) / trials >= 0.95 - 3 * sigma);
}

TEST_CASE("violation estimates") {
    const ScenarioProgram p = testing::lower_bound_family();
    ViolationEstimate e = estimate_violation(p, 0, {0.9}, 1'000'000, 0.05, 1);
    CHECK(std::fabs(e.point - 0.1) < 0.001);
    CHECK(e.ci_low <= e.point);
    CHECK(e.point <= e.ci_high);
    CHECK(e.ci_low < 0.1);
    CHECK(e.ci_high > 0.1);

    e = estimate_violation(p, 0, {1.5}, 1000, 0.05, 1);
    CHECK(e.point == 0.0);
    CHECK(e.ci_low == 0.0);

    e = estimate_violation(p, 0, {-0.5}, 1, 0.05, 1);
    CHECK(e.point == 1.0);
    CHECK(e.ci_low == doctest::Approx(0.05));
    CHECK(e.ci_high == 1.0);

    const ViolationEstimate one = estimate_violation(p, 0, {0.7}, 20000, 0.05, 9, 0, 1);
    const ViolationEstimate four = estimate_violation(p, 0, {0.7}, 20000, 0.05, 9, 0, 4);
    CHECK(one.violations == four.violations);

    CHECK_THROWS_AS(estimate_violation(p, 0, {0.5}, 0, 0.05, 1), PreconditionError);
}

TEST_CASE("validation draws are disjoint from training draws") {
    const ScenarioProgram p = testing::lower_bound_family();
    const std::vector<std::uint64_t> sizes{1000};
    const MultiSample ms = draw_multisample(p, sizes, 4);
    const rng::CounterRng val({4, 0, rng::Namespace::validation});
    int equal = 0;
    for (std::uint64_t k = 0; k < 1000; ++k) {
        equal += p.stages[0].sampler->draw(val, 0, k)[0] == ms.outcomes[0][k][0];
    }
    CHECK(equal == 0);
}

TEST_CASE("closed-form violation") {
    const ScenarioProgram p = testing::lower_bound_family();
    CHECK(*exact_violation(p, 0, {0.9}) == doctest::Approx(0.1));
    CHECK(*exact_violation(p, 0, {1.5}) == 0.0);
    CHECK(*exact_violation(p, 0, {-0.5}) == 1.0);

    const cuboid::CuboidInstance inst{1, {0.1}, 1e-6, cuboid::Mode::multi_stage, {}};
    const ScenarioProgram c = inst.to_program();
    CHECK(*exact_violation(c, 0, {0.0, 2 * 1.959963984540054}) == doctest::Approx(0.05).epsilon(1e-9));
    const ViolationEstimate mc = estimate_violation(c, 0, {0.3, 2.0}, 400000, 0.05, 2);
    CHECK(std::fabs(mc.point - *exact_violation(c, 0, {0.3, 2.0})) < 0.003);
}

TEST_CASE("violation survey") {
    const ScenarioProgram p = testing::lower_bound_family(0.1);
    ScenarioProgram fixed = p;
    fixed.stages[0].sample_size = 10;
    const auto plan = bounds::plan_multistage(fixed, {0.5, bounds::Policy::implicit, {}, std::nullopt});

    SurveyOptions opt;
    opt.replications = 0;
    SurveyResult empty = violation_survey(fixed, plan, opt);
    CHECK(empty.records.empty());
    CHECK(empty.infeasible == 0);

    opt.replications = 20000;
    opt.seed = 12;
    const SurveyResult res = violation_survey(fixed, plan, opt);
    CHECK(res.records.size() == 20000);
    const double want = prob::binomial_cdf(0, 10, 0.1);
    const double sigma = std::sqrt(want * (1 - want) / 20000);
    CHECK(std::fabs(res.exceed_frequency[0] - want) <= 3 * sigma);

    const std::string csv = survey_csv(res);
    CHECK(csv.rfind("replication,stage,violation,exceeds\n", 0) == 0);

    opt.threads = 3;
    const SurveyResult again = violation_survey(fixed, plan, opt);
    CHECK(survey_csv(again) == csv);
}

TEST_CASE("cuboid survey at planned sizes never exceeds") {
    const cuboid::CuboidInstance inst{2, {0.25}, 1e-6, cuboid::Mode::multi_stage, {}};
    const ScenarioProgram p = inst.to_program();
    const auto plan = bounds::plan_multistage(p, {1e-6, bounds::Policy::implicit, {}, std::nullopt});
    CHECK(plan.stages[0].sample_size == 62);
    SurveyOptions opt;
    opt.replications = 10000;
    opt.seed = 3;
    const SurveyResult res = violation_survey(p, plan, opt);
    CHECK(res.infeasible == 0);
    CHECK(res.exceedances == std::vector<std::uint64_t>{0, 0});
}
