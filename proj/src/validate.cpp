#include "scenopt/validate.hpp"

#include "scenopt/errors.hpp"
#include "scenopt/parallel.hpp"
#include "scenopt/probkernel.hpp"
#include "scenopt/rng.hpp"
#include "scenopt/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace scenopt::validate {

Interval clopper_pearson(std::uint64_t k, std::uint64_t n, double alpha) {
    SCENOPT_REQUIRE(n >= 1, PreconditionError, "clopper_pearson needs at least one trial");
    SCENOPT_REQUIRE(k <= n, PreconditionError, "successes exceed trials");
    SCENOPT_REQUIRE(alpha > 0.0 && alpha < 1.0, DomainError, "alpha must lie in (0, 1)");
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    if (k == 0) return {0.0, 1.0 - std::pow(alpha, 1.0 / nd)};
    if (k == n) return {std::pow(alpha, 1.0 / nd), 1.0};
    return {prob::inverse_regularized_incomplete_beta(alpha / 2.0, kd, nd - kd + 1.0),
            prob::inverse_regularized_incomplete_beta(1.0 - alpha / 2.0, kd + 1.0, nd - kd)};
}

ViolationEstimate estimate_violation(const ScenarioProgram& program, std::size_t stage, const Vector& x,
                                     std::uint64_t n_val, double alpha, std::uint64_t seed,
                                     std::uint64_t replication, std::size_t threads) {
    SCENOPT_REQUIRE(stage < program.stages.size(), PreconditionError, "stage index out of range");
    SCENOPT_REQUIRE(n_val >= 1, PreconditionError, "n_val must be >= 1");
    const StageSpec& st = program.stages[stage];
    SCENOPT_REQUIRE(st.sampler.has_value(), ConfigError, "stage has no sampler");

    const rng::CounterRng stream({seed, replication, rng::Namespace::validation});
    const auto stage_id = static_cast<std::uint32_t>(stage);
    const std::size_t n_threads = std::max<std::size_t>(1, std::min<std::uint64_t>(threads, n_val));
    std::vector<std::uint64_t> counts(n_threads, 0);
    parallel_chunks(n_val, n_threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        std::uint64_t c = 0;
        for (std::size_t j = begin; j < end; ++j) {
            const Vector delta = st.sampler->draw(stream, stage_id, j);
            if (constraint_value(generate_rows(st.generator, delta, program.dimension), x) > 0.0) ++c;
        }
        counts[chunk] = c;
    });

    ViolationEstimate est;
    est.stage = stage;
    est.n_val = n_val;
    for (auto c : counts) est.violations += c;
    est.point = static_cast<double>(est.violations) / static_cast<double>(n_val);
    const Interval ci = clopper_pearson(est.violations, n_val, alpha);
    est.ci_low = std::min(ci.low, est.point);
    est.ci_high = std::max(ci.high, est.point);
    return est;
}

namespace {

// P[delta < t] for uniform and normal components.
std::optional<double> cdf(const ComponentDist& dist, double t) {
    switch (dist.kind) {
        case DistKind::uniform: return std::clamp((t - dist.p1) / (dist.p2 - dist.p1), 0.0, 1.0);
        case DistKind::normal: return 0.5 * std::erfc(-(t - dist.p1) / (dist.p2 * std::sqrt(2.0)));
        case DistKind::discrete: return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace

std::optional<double> exact_violation(const ScenarioProgram& program, std::size_t stage, const Vector& x) {
    SCENOPT_REQUIRE(stage < program.stages.size(), PreconditionError, "stage index out of range");
    const StageSpec& st = program.stages[stage];
    if (!st.sampler) return std::nullopt;
    if (const auto* cub = std::get_if<CuboidGenerator>(&st.generator)) {
        if (cub->axes.size() != 1) return std::nullopt;
        const CuboidAxis& ax = cub->axes.front();
        if (ax.component >= st.sampler->components.size()) return std::nullopt;
        const ComponentDist& dist = st.sampler->components[ax.component];
        const double half = 0.5 * x[ax.w_index];
        const auto lo = cdf(dist, x[ax.z_index] - half);
        const auto hi = cdf(dist, x[ax.z_index] + half);
        if (!lo || !hi) return std::nullopt;
        return std::clamp(*lo + (1.0 - *hi), 0.0, 1.0);
    }
    const auto& lin = std::get<LinearGenerator>(st.generator);
    if (lin.rows.size() != 1) return std::nullopt;
    const AffineRow& row = lin.rows.front();
    for (const Vector& a : row.a_delta) {
        for (double v : a) {
            if (v != 0.0) return std::nullopt;
        }
    }
    std::optional<std::size_t> comp;
    for (std::size_t j = 0; j < row.b_delta.size(); ++j) {
        if (row.b_delta[j] == 0.0) continue;
        if (comp) return std::nullopt;
        comp = j;
    }
    // Violation: a0^T x - b0 > c * delta_j.
    double lhs = -row.b0;
    for (std::size_t j = 0; j < row.a0.size() && j < x.size(); ++j) lhs += row.a0[j] * x[j];
    if (!comp) return lhs > 0.0 ? 1.0 : 0.0;
    if (*comp >= st.sampler->components.size()) return std::nullopt;
    const double c = row.b_delta[*comp];
    const ComponentDist& dist = st.sampler->components[*comp];
    const double t = lhs / c;
    // P[delta < t] when c > 0, P[delta > t] when c < 0.
    const auto below = cdf(dist, t);
    if (!below) return std::nullopt;
    return c > 0.0 ? *below : 1.0 - *below;
}

std::vector<double> SurveyResult::violations(std::size_t stage) const {
    std::vector<double> out;
    for (const auto& r : records) {
        if (r.stage == stage) out.push_back(r.violation);
    }
    return out;
}

SurveyResult violation_survey(const ScenarioProgram& program, const bounds::SampleSizePlan& plan,
                              const SurveyOptions& options) {
    program.validate();
    SCENOPT_REQUIRE(plan.stages.size() == program.stages.size(), PreconditionError,
                    "plan and program disagree on the number of stages");
    for (const auto& st : program.stages) {
        SCENOPT_REQUIRE(st.sampler.has_value(), ConfigError, "every stage needs a sampler for a survey");
    }
    const std::size_t n_stages = program.stages.size();
    std::vector<std::uint64_t> discard(n_stages, 0);
    bool any_discard = false;
    for (std::size_t i = 0; i < n_stages; ++i) {
        discard[i] = plan.stages[i].discard;
        any_discard = any_discard || discard[i] > 0;
    }

    struct Rep {
        bool feasible = false;
        std::vector<double> v;
    };
    std::vector<Rep> reps(options.replications);
    parallel_for(options.replications, options.threads, [&](std::size_t r) {
        const MultiSample ms = draw_multisample(program, plan, options.seed, r);
        Solution sol;
        if (any_discard) {
            const ScenarioSystem sys(program, ms);
            if (!sys.solve().ok()) return;
            sol = discard::remove(options.algorithm, program, ms, discard).reduced_solution;
        } else {
            sol = solve(program, ms);
        }
        if (!sol.ok()) return;
        Rep rep{true, std::vector<double>(n_stages)};
        for (std::size_t i = 0; i < n_stages; ++i) {
            std::optional<double> exact;
            if (options.prefer_exact) exact = exact_violation(program, i, sol.x);
            rep.v[i] = exact ? *exact
                             : estimate_violation(program, i, sol.x, options.n_val, options.alpha, options.seed, r)
                                   .point;
        }
        reps[r] = std::move(rep);
    });

    SurveyResult out;
    out.replications = options.replications;
    out.exceedances.assign(n_stages, 0);
    for (std::uint64_t r = 0; r < options.replications; ++r) {
        if (!reps[r].feasible) {
            ++out.infeasible;
            continue;
        }
        for (std::size_t i = 0; i < n_stages; ++i) {
            const bool exceeds = reps[r].v[i] > program.stages[i].eps;
            out.records.push_back({r, i, reps[r].v[i], exceeds});
            if (exceeds) ++out.exceedances[i];
        }
    }
    const double feasible = static_cast<double>(out.replications - out.infeasible);
    for (std::size_t i = 0; i < n_stages; ++i) {
        out.exceed_frequency.push_back(feasible > 0 ? static_cast<double>(out.exceedances[i]) / feasible : 0.0);
    }
    return out;
}

std::string survey_csv(const SurveyResult& result) {
    std::ostringstream os;
    os << "replication,stage,violation,exceeds\n";
    char buf[64];
    for (const auto& r : result.records) {
        std::snprintf(buf, sizeof buf, "%.17g", r.violation);
        os << r.replication << ',' << r.stage << ',' << buf << ',' << (r.exceeds ? 1 : 0) << '\n';
    }
    return os.str();
}

}  // namespace scenopt::validate
