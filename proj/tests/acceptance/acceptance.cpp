// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "scenopt/bounds.hpp"
#include "scenopt/cli.hpp"
#include "scenopt/cuboid.hpp"
#include "scenopt/discard.hpp"
#include "scenopt/probkernel.hpp"
#include "scenopt/scenario.hpp"
#include "scenopt/spec_io.hpp"
#include "scenopt/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace scenopt;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const std::vector<std::vector<std::uint64_t>> kPaperMulti{
    {1734, 1777, 1831, 1903, 2072, 2144, 2311},
    {341, 349, 360, 374, 407, 421, 454},
    {166, 170, 176, 182, 199, 205, 221},
    {62, 63, 65, 67, 73, 76, 82},
};
const std::vector<std::vector<std::uint64_t>> kPaperSingle{
    {2334, 2722, 3431, 5020, 15588, 27535, 115786},
    {459, 536, 677, 992, 3095, 5477, 23093},
    {225, 263, 332, 488, 1533, 2719, 11506},
    {84, 99, 125, 186, 595, 1063, 4550},
};

Outcome table1_check(bool multi) {
    const auto t0 = std::chrono::steady_clock::now();
    int mismatches = 0;
    std::string first;
    for (std::size_t e = 0; e < cuboid::kTableEps.size(); ++e) {
        for (std::size_t j = 0; j < cuboid::kTableN.size(); ++j) {
            const double eps = cuboid::kTableEps[e];
            const std::size_t n = cuboid::kTableN[j];
            const std::uint64_t got = multi ? bounds::implicit_sample_size(2, eps, 1e-6 / static_cast<double>(n))
                                            : bounds::implicit_sample_size(static_cast<int>(2 * n + 1), eps, 1e-6);
            const std::uint64_t want = multi ? kPaperMulti[e][j] : kPaperSingle[e][j];
            if (got != want) {
                if (mismatches++ == 0) first = fmt(" first mismatch eps=%g n=%zu got=%llu want=%llu", eps, n,
                                                   static_cast<unsigned long long>(got),
                                                   static_cast<unsigned long long>(want));
            }
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {mismatches == 0 && secs < 5.0, fmt("28 entries, %d mismatches, %.2f s", mismatches, secs) + first};
}

Outcome a3() {
    struct Target {
        double eps;
        std::size_t n;
        double paper;
    };
    const std::vector<Target> targets{{0.01, 2, 2.4}, {0.10, 10, 11.5}, {0.25, 50, 28.5}};
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (const auto& t : targets) {
        cuboid::Table2Options opt;
        opt.eps_list = {t.eps};
        opt.n_list = {t.n};
        opt.replications = 10'000;
        opt.seed = 2024;
        const cuboid::Table2 table = cuboid::run_table2(opt);
        const auto& cell = table.cells[0][0];
        const double mean = 100.0 * cell.mean;
        const double se = 100.0 * cell.se;
        const double tol = std::max(0.5, 4.0 * se);
        const bool hit = std::fabs(mean - t.paper) <= tol;
        ok = ok && hit;
        detail += fmt("(%g%%,n=%zu) %.3f%% vs %.1f%% tol %.3f; ", 100 * t.eps, t.n, mean, t.paper, tol);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {ok && secs < 600.0, detail + fmt("%.1f s", secs)};
}

ScenarioProgram lower_bound_family(double eps, std::uint64_t K) {
    ScenarioProgram p;
    p.dimension = 1;
    p.cost = {1.0};
    p.box = {{-1.0}, {2.0}};
    StageSpec st;
    st.generator = LinearGenerator{{AffineRow{{-1.0}, {}, 0.0, {-1.0}}}};
    st.eps = eps;
    st.zeta_bar = 1;
    st.sampler = Sampler{{ComponentDist{DistKind::uniform, 0.0, 1.0, {}}}};
    st.sample_size = K;
    p.stages.push_back(std::move(st));
    return p;
}

// Asymptotic Kolmogorov survival function with the Stephens small-sample correction.
double ks_pvalue(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

Outcome a4() {
    const std::vector<std::pair<std::uint64_t, double>> cases{{10, 0.1}, {50, 0.05}, {100, 0.02}};
    const std::uint64_t reps = 100'000;
    bool ok = true;
    std::string detail;
    for (const auto& [K, eps] : cases) {
        const ScenarioProgram p = lower_bound_family(eps, K);
        const auto plan = bounds::plan_multistage(p, {});
        validate::SurveyOptions opt;
        opt.replications = reps;
        opt.seed = 77 + K;
        const auto res = validate::violation_survey(p, plan, opt);
        const double expect = std::pow(1.0 - eps, static_cast<double>(K));
        const double sigma = std::sqrt(expect * (1.0 - expect) / static_cast<double>(reps));
        const double freq = res.exceed_frequency[0];
        const bool within = res.infeasible == 0 && std::fabs(freq - expect) <= 3.0 * sigma;

        std::vector<double> v = res.violations(0);
        std::sort(v.begin(), v.end());
        const double n = static_cast<double>(v.size());
        double d = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double f = 1.0 - std::pow(1.0 - v[i], static_cast<double>(K));
            d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
        }
        const double pv = ks_pvalue(d, v.size());
        ok = ok && within && pv >= 0.01;
        detail += fmt("K=%llu eps=%g freq=%.5f expect=%.5f 3sd=%.5f KS p=%.3f; ", static_cast<unsigned long long>(K),
                      eps, freq, expect, 3 * sigma, pv);
    }
    return {ok, detail};
}

Outcome a5() {
    const std::vector<std::pair<std::uint64_t, std::uint64_t>> cases{{50, 2}, {100, 5}};
    const double eps = 0.1;
    const std::uint64_t reps = 100'000;
    bool ok = true;
    std::string detail;
    for (const auto& [K, R] : cases) {
        const ScenarioProgram p = lower_bound_family(eps, K);
        const std::vector<std::uint64_t> sizes{K};
        const std::vector<std::uint64_t> discard{R};
        std::uint64_t order_hits = 0;
        std::uint64_t exceed = 0;
        for (std::uint64_t r = 0; r < reps; ++r) {
            const MultiSample ms = draw_multisample(p, sizes, 5150 + K, r);
            const auto res = discard::remove_greedy(p, ms, discard);
            std::vector<double> d;
            for (const auto& o : ms.outcomes[0]) d.push_back(o[0]);
            std::sort(d.begin(), d.end(), std::greater<>());
            const double x = res.reduced_solution.x[0];
            if (std::fabs(x - d[R]) <= 1e-12) ++order_hits;
            if (1.0 - x > eps) ++exceed;
        }
        const double bound = bounds::discard_posterior_confidence(1, K, R, eps);
        const double sigma = std::sqrt(bound * (1.0 - bound) / static_cast<double>(reps));
        const double freq = static_cast<double>(exceed) / static_cast<double>(reps);
        ok = ok && order_hits == reps && freq <= bound + 3.0 * sigma;
        detail += fmt("K=%llu R=%llu order %llu/%llu freq=%.5f bound=%.5f 3sd=%.5f; ",
                      static_cast<unsigned long long>(K), static_cast<unsigned long long>(R),
                      static_cast<unsigned long long>(order_hits), static_cast<unsigned long long>(reps), freq, bound,
                      3 * sigma);
    }
    return {ok, detail};
}

StageSpec random_row_stage(std::size_t d, bool gaussian) {
    AffineRow row;
    row.a0.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        Vector e(d, 0.0);
        e[j] = 1.0;
        row.a_delta.push_back(e);
    }
    row.b_delta.assign(d + 1, 0.0);
    row.b_delta[d] = 1.0;
    StageSpec st;
    st.generator = LinearGenerator{{row}};
    Sampler s;
    for (std::size_t j = 0; j < d; ++j) {
        s.components.push_back(gaussian ? ComponentDist{DistKind::normal, 0.0, 1.0, {}}
                                        : ComponentDist{DistKind::uniform, -1.0, 1.0, {}});
    }
    s.components.push_back(ComponentDist{DistKind::uniform, 0.5, 1.5, {}});
    st.sampler = s;
    return st;
}

// Two-stage random LP: a^T x <= b with b > 0, so the origin is always feasible.
ScenarioProgram random_lp(std::mt19937_64& gen) {
    const std::size_t d = 2 + gen() % 2;
    ScenarioProgram p;
    p.dimension = d;
    std::normal_distribution<double> nd;
    for (std::size_t j = 0; j < d; ++j) p.cost.push_back(nd(gen));
    p.box = {Vector(d, -10.0), Vector(d, 10.0)};
    p.stages.push_back(random_row_stage(d, true));
    p.stages.push_back(random_row_stage(d, false));
    return p;
}

struct Instance {
    ScenarioProgram program;
    MultiSample samples;
};

Instance random_instance(std::mt19937_64& gen, std::uint64_t index, std::size_t max_per_stage) {
    if (index % 2 == 0) {
        ScenarioProgram p = random_lp(gen);
        std::vector<std::uint64_t> sizes;
        for (std::size_t i = 0; i < p.stages.size(); ++i) sizes.push_back(1 + gen() % max_per_stage);
        MultiSample ms = draw_multisample(p, sizes, 31337, index);
        return {std::move(p), std::move(ms)};
    }
    cuboid::CuboidInstance c;
    c.n = 2 + gen() % 2;
    c.eps.assign(c.n, 0.1);
    std::vector<std::uint64_t> sizes;
    for (std::size_t i = 0; i < c.n; ++i) sizes.push_back(1 + gen() % max_per_stage);
    MultiSample ms = cuboid::draw(c, sizes, 31337, index);
    return {c.to_program(), std::move(ms)};
}

std::size_t total(const StageSets& s) {
    std::size_t t = 0;
    for (const auto& v : s) t += v.size();
    return t;
}

Outcome a6() {
    const std::uint64_t instances = 10'000;
    std::mt19937_64 gen(6);
    std::uint64_t stage_violations = 0, total_violations = 0, infeasible = 0;
    std::uint64_t brute = 0, nondegenerate = 0, mismatch = 0;
    for (std::uint64_t t = 0; t < instances; ++t) {
        const Instance inst = random_instance(gen, t, 5);
        const Solution s = solve(inst.program, inst.samples);
        if (!s.ok()) {
            ++infeasible;
            continue;
        }
        const StageSets sup = support_set(inst.program, inst.samples, s);
        for (std::size_t i = 0; i < sup.size(); ++i) {
            if (static_cast<int>(sup[i].size()) > resolved_zeta_bar(inst.program.stages[i], inst.program.dimension))
                ++stage_violations;
        }
        if (total(sup) > inst.program.dimension) ++total_violations;

        if (inst.samples.total_samples() > 10) continue;
        ++brute;
        // keep only the support samples; non-degenerate when the optimizer is unchanged
        MultiSample reduced = inst.samples;
        for (std::size_t i = 0; i < sup.size(); ++i) {
            reduced.outcomes[i].clear();
            reduced.tie_breaks[i].clear();
            for (std::size_t k : sup[i]) {
                reduced.outcomes[i].push_back(inst.samples.outcomes[i][k]);
                reduced.tie_breaks[i].push_back(inst.samples.tie_breaks[i][k]);
            }
        }
        const Solution rs = solve(inst.program, reduced);
        double dist = 0.0;
        for (std::size_t j = 0; j < s.x.size(); ++j) dist = std::max(dist, std::fabs(rs.x[j] - s.x[j]));
        if (!rs.ok() || dist > 1e-7) continue;
        ++nondegenerate;
        const auto report = essential_sets_bruteforce(inst.program, inst.samples);
        bool same = !report.sets.empty();
        for (const auto& e : report.sets) same = same && e.members == sup;
        if (!same) ++mismatch;
    }

    std::uint64_t lemma_cases = 0, lemma_fail = 0;
    std::mt19937_64 gen2(66);
    for (std::uint64_t t = 0; t < instances; ++t) {
        const Instance inst = random_instance(gen2, t, 3);
        if (!solve(inst.program, inst.samples).ok()) continue;
        const std::size_t stage = gen2() % inst.program.stages.size();
        const rng::CounterRng aux({31337, t, rng::Namespace::auxiliary});
        const Vector extra = inst.program.stages[stage].sampler->draw(aux, static_cast<std::uint32_t>(stage), 0);
        ++lemma_cases;
        if (!sampling_lemma_check(inst.program, inst.samples, extra, stage)) ++lemma_fail;
    }

    const bool ok = stage_violations == 0 && total_violations == 0 && mismatch == 0 && lemma_fail == 0;
    return {ok, fmt("%llu instances (%llu infeasible): stage-card violations %llu, total-card violations %llu; "
                    "brute-forced %llu, non-degenerate %llu, essential != support %llu; sampling lemma %llu/%llu",
                    static_cast<unsigned long long>(instances), static_cast<unsigned long long>(infeasible),
                    static_cast<unsigned long long>(stage_violations),
                    static_cast<unsigned long long>(total_violations), static_cast<unsigned long long>(brute),
                    static_cast<unsigned long long>(nondegenerate), static_cast<unsigned long long>(mismatch),
                    static_cast<unsigned long long>(lemma_cases - lemma_fail),
                    static_cast<unsigned long long>(lemma_cases))};
}

Outcome a7() {
    std::uint64_t grid = 0, disorder = 0;
    for (int z = 1; z <= 50; ++z) {
        for (double eps : {0.01, 0.05, 0.1, 0.25}) {
            for (double theta : {1e-3, 1e-6, 1e-9}) {
                ++grid;
                const auto i = bounds::implicit_sample_size(z, eps, theta);
                const auto r = bounds::refined_sample_size(z, eps, theta);
                const auto c = bounds::chernoff_sample_size(z, eps, theta);
                if (!(i <= r && r <= c)) ++disorder;
            }
        }
    }
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> ud(0.001, 0.999);
    std::uniform_int_distribution<int> id(1, 60);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const double eps = ud(gen);
        const int a = id(gen), b = id(gen);
        const double lhs = prob::incomplete_beta(eps, a, b);
        const double log_rhs = -std::log(static_cast<double>(b))
                               - prob::log_binomial_coefficient(static_cast<std::uint64_t>(a + b - 1),
                                                                static_cast<std::uint64_t>(b))
                               + prob::log_binomial_cdf(b - 1, static_cast<std::uint64_t>(a + b - 1), 1.0 - eps).value;
        const double rhs = std::exp(log_rhs);
        const double rel = std::fabs(lhs - rhs) / std::max(std::fabs(rhs), 1e-300);
        worst = std::max(worst, rel);
    }
    return {disorder == 0 && worst <= 1e-10,
            fmt("%llu grid points, %llu out of order; identity worst relative error %.2e",
                static_cast<unsigned long long>(grid), static_cast<unsigned long long>(disorder), worst)};
}

Outcome a8() {
    const auto spec = io::load_spec(std::string(SCENOPT_SPEC_DIR) + "/monotonicity.json");
    const auto a = discard::monotonicity_empirical_check(spec.program, 0, 100'000, 8);
    const auto b = discard::monotonicity_empirical_check(spec.program, 1, 100'000, 8);
    const bool ok = a.monotone && !b.monotone && b.counterexample.has_value();
    return {ok, fmt("(a) monotone=%d over %zu trials (%zu skipped); (b) counterexample %s", a.monotone ? 1 : 0,
                    a.trials, a.skipped,
                    b.counterexample ? fmt("at trial %zu", b.counterexample->trial).c_str() : "not found")};
}

std::string run_solve(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return std::to_string(code) + "\n" + out.str();
}

Outcome a9() {
    const std::vector<std::string> base{"solve", "--spec", std::string(SCENOPT_SPEC_DIR) + "/cuboid_n2.json",
                                        "--seed", "42", "--discard", "greedy", "--R", "3", "3",
                                        "--validate", "20000"};
    auto with_threads = [&](const std::string& n) {
        std::vector<std::string> a{"--threads", n};
        a.insert(a.end(), base.begin(), base.end());
        return a;
    };
    const std::string ref = run_solve(with_threads("1"));
    int identical = 0, runs = 0;
    for (const char* n : {"1", "1", "1", "4", "4", "4"}) {
        ++runs;
        if (run_solve(with_threads(n)) == ref) ++identical;
    }
    const bool ok = ref.rfind("0\n", 0) == 0 && identical == runs;
    return {ok, fmt("%d/%d runs byte-identical to the reference (%zu bytes)", identical, runs, ref.size())};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"A1 Table 1(a) multi-stage sample sizes", [] { return table1_check(true); }},
        {"A2 Table 1(b) single-stage sample sizes", [] { return table1_check(false); }},
        {"A3 Table 2 relative surplus cells", a3},
        {"A4 sampling theorem tightness, 1-D family", a4},
        {"A5 discarding theorem, greedy removal", a5},
        {"A6 support and essential set structure", a6},
        {"A7 bound ordering and beta identity", a7},
        {"A8 monotonicity oracle", a8},
        {"A9 deterministic solve output", a9},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failures;
        std::printf("%s %s [%.1f s] %s\n", o.pass ? "PASS" : "FAIL", name, secs, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
