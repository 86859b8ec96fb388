#include "scenopt/bounds.hpp"
#include "scenopt/cuboid.hpp"
#include "scenopt/errors.hpp"
#include "scenopt/scenario.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace scenopt;
using testing::make_samples;
using testing::scalar_samples;

namespace {

// min x2 s.t. x2 >= s x1 for each sampled slope s, X = [-10, 10]^2.
ScenarioProgram slope_program() {
    ScenarioProgram p;
    p.dimension = 2;
    p.cost = {0.0, 1.0};
    p.box = {{-10.0, -10.0}, {10.0, 10.0}};
    p.stages.push_back(testing::full_row_stage(2));
    p.stages[0].zeta_bar = 2;
    return p;
}

MultiSample slopes(const std::vector<double>& s, const std::vector<double>& b = {}) {
    std::vector<Vector> out;
    for (std::size_t k = 0; k < s.size(); ++k) out.push_back({s[k], -1.0, b.empty() ? 0.0 : b[k]});
    return make_samples({out});
}

}  // namespace

TEST_CASE("solve without stages") {
    ScenarioProgram p;
    p.dimension = 2;
    p.cost = {1.0, 0.0};
    p.box = {{-1.0, -1.0}, {1.0, 1.0}};
    const MultiSample ms = make_samples({});
    const Solution s = solve(p, ms);
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(s.x == Vector{-1.0, -1.0});
    CHECK(support_set(p, ms, s).empty());
}

TEST_CASE("one-dimensional lower bounds") {
    const ScenarioProgram p = testing::lower_bound_family();
    const MultiSample ms = scalar_samples({0.3, 0.7, 0.5});
    const Solution s = solve(p, ms);
    REQUIRE(s.ok());
    CHECK(s.x[0] == doctest::Approx(0.7));
    CHECK(s.objective == doctest::Approx(0.7));
    CHECK(s.active == StageSets{{1}});
    CHECK(s.duals[0][1] == doctest::Approx(1.0));
    CHECK(support_set(p, ms, s) == StageSets{{1}});
}

TEST_CASE("cuboid stage gives the interval hull") {
    const cuboid::CuboidInstance inst{1, {0.1}, 1e-6, cuboid::Mode::multi_stage, {}};
    const ScenarioProgram p = inst.to_program();
    const MultiSample ms = scalar_samples({0.0, 1.0, 2.0});
    const Solution s = solve(p, ms);
    REQUIRE(s.ok());
    CHECK(s.x[0] == doctest::Approx(1.0));
    CHECK(s.x[1] == doctest::Approx(2.0));
    const StageSets sup = support_set(p, ms, s);
    CHECK(sup == StageSets{{0, 2}});
}

TEST_CASE("infeasible sampled program") {
    ScenarioProgram p = testing::lower_bound_family();
    p.deterministic_rows.push_back({{1.0}, 0.2});  // x <= 0.2
    const Solution s = solve(p, scalar_samples({0.5}));
    CHECK(s.status == SolveStatus::infeasible);
    CHECK_FALSE(s.ok());
}

TEST_CASE("essential sets on a non-degenerate instance") {
    const ScenarioProgram p = slope_program();
    const MultiSample ms = slopes({1.0, -1.0, 0.5}, {0.0, 0.0, -1.0});
    const Solution s = solve(p, ms);
    REQUIRE(s.ok());
    const auto report = essential_sets_bruteforce(p, ms);
    REQUIRE(report.sets.size() == 1);
    CHECK(report.minimal.members == support_set(p, ms, s));
    CHECK(report.minimal.cardinality == 2);
}

TEST_CASE("three lines through one vertex give two essential sets") {
    const ScenarioProgram p = slope_program();
    const MultiSample ms = slopes({1.0, -1.0, 3.0});
    const Solution s = solve(p, ms);
    REQUIRE(s.ok());
    CHECK(std::fabs(s.x[0]) < 1e-12);
    CHECK(std::fabs(s.x[1]) < 1e-12);
    const auto report = essential_sets_bruteforce(p, ms);
    REQUIRE(report.sets.size() == 2);
    CHECK(report.sets[0].cardinality == 2);
    CHECK(report.sets[1].cardinality == 2);
    // sets {0,1} and {1,2}; tie-breaks 0.01, 0.02, 0.03 pick the first
    CHECK(report.minimal.members == StageSets{{0, 1}});
    // only the line of negative slope is in both essential sets
    CHECK(support_set(p, ms, s) == StageSets{{1}});
}

TEST_CASE("essential set of an empty multisample is the domain alone") {
    const ScenarioProgram p = slope_program();
    const MultiSample ms = make_samples({{}});
    const auto report = essential_sets_bruteforce(p, ms);
    REQUIRE(report.sets.size() == 1);
    CHECK(report.minimal.cardinality == 0);
    CHECK(report.minimal.tie_break_sum == doctest::Approx(ms.domain_tie_break));
}

TEST_CASE("essential-set enumeration guard") {
    const ScenarioProgram p = testing::lower_bound_family();
    std::vector<double> v(17);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = 0.01 * static_cast<double>(k);
    CHECK_THROWS_AS(essential_sets_bruteforce(p, scalar_samples(v)), SizeError);
    CHECK_THROWS_AS(essential_sets_bruteforce(p, scalar_samples({0.1}), 17), SizeError);
}

TEST_CASE("sampling lemma") {
    const ScenarioProgram p = testing::lower_bound_family();
    const MultiSample ms = scalar_samples({0.3, 0.5});
    CHECK(sampling_lemma_check(p, ms, {0.9}, 0));
    CHECK(sampling_lemma_check(p, ms, {0.1}, 0));
}

TEST_CASE("support rank") {
    CHECK(support_rank_linear({{1.0, 2.0, 0.0}}) == 1);
    CHECK(support_rank_linear({{1.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 1.0, 0.0}, {2.0, 0.0, -3.0, 0.0}}) == 2);
    CHECK(support_rank_linear({{1.0, 0.0, 0.0}, {1.0, 1.0, 0.0}, {1.0, 1.0, 1.0}}) == 3);
    CHECK_THROWS(support_rank_linear({}));
    CHECK(support_rank_quadratic({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}) == 3);
    CHECK(support_rank_quadratic({{1, 0, 0}, {0, 1, 0}, {0, 0, 0}}) == 2);
    CHECK(support_rank_quadratic({{0, 0}, {0, 0}}) == 0);
    CHECK_THROWS_AS(support_rank_quadratic({{1, 2}, {0, 1}}), DomainError);
    CHECK_THROWS_AS(support_rank_quadratic({{-1, 0}, {0, 1}}), DomainError);

    const cuboid::CuboidInstance inst{3, {0.1}, 1e-6, cuboid::Mode::multi_stage, {}};
    const ScenarioProgram p = inst.to_program();
    StageSpec undeclared = p.stages[1];
    undeclared.zeta_bar.reset();
    CHECK(resolved_zeta_bar(undeclared, p.dimension) == 2);
    StageSpec one = testing::lower_bound_family().stages[0];
    one.zeta_bar.reset();
    CHECK(resolved_zeta_bar(one, 1) == 1);
}

TEST_CASE("multisample draws") {
    ScenarioProgram p = testing::lower_bound_family();
    p.stages.push_back(p.stages[0]);
    const std::vector<std::uint64_t> sizes{100000, 100000};
    const MultiSample a = draw_multisample(p, sizes, 17);
    const MultiSample b = draw_multisample(p, sizes, 17);
    CHECK(a.outcomes == b.outcomes);
    CHECK(a.tie_breaks == b.tie_breaks);
    CHECK(a.provenance.seed == 17);

    double m0 = 0, m1 = 0, c = 0, v0 = 0, v1 = 0;
    const double n = 100000.0;
    for (std::size_t k = 0; k < 100000; ++k) {
        m0 += a.outcomes[0][k][0];
        m1 += a.outcomes[1][k][0];
    }
    m0 /= n;
    m1 /= n;
    for (std::size_t k = 0; k < 100000; ++k) {
        const double x = a.outcomes[0][k][0] - m0, y = a.outcomes[1][k][0] - m1;
        c += x * y;
        v0 += x * x;
        v1 += y * y;
    }
    CHECK(std::fabs(m0 - 0.5) < 0.005);
    CHECK(std::fabs(c / std::sqrt(v0 * v1)) < 0.01);

    const MultiSample other = draw_multisample(p, sizes, 17, 1);
    CHECK(other.outcomes[0][0] != a.outcomes[0][0]);
}

TEST_CASE("support cardinality bounded by support rank on random cuboids") {
    const cuboid::CuboidInstance inst{3, {0.1}, 1e-6, cuboid::Mode::multi_stage, {}};
    const ScenarioProgram p = inst.to_program();
    for (std::uint64_t r = 0; r < 50; ++r) {
        const std::vector<std::uint64_t> sizes{5, 9, 3};
        const MultiSample ms = draw_multisample(p, sizes, 5, r);
        const Solution s = solve(p, ms);
        REQUIRE(s.ok());
        std::size_t total = 0;
        for (const auto& st : support_set(p, ms, s)) {
            CHECK(st.size() <= 2);
            total += st.size();
        }
        CHECK(total <= p.dimension);
    }
}
