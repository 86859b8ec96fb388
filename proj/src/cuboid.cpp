#include "scenopt/cuboid.hpp"

#include "scenopt/bounds.hpp"
#include "scenopt/errors.hpp"
#include "scenopt/parallel.hpp"
#include "scenopt/rng.hpp"
#include "scenopt/scenario.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace scenopt::cuboid {

namespace {

void check_instance(const CuboidInstance& inst) {
    SCENOPT_REQUIRE(inst.n >= 1, PreconditionError, "cuboid dimension must be >= 1");
    const std::size_t want = inst.mode == Mode::multi_stage ? inst.n : 1;
    SCENOPT_REQUIRE(inst.eps.size() == want || inst.eps.size() == 1, PreconditionError,
                    "cuboid eps list must have one entry per stage");
    SCENOPT_REQUIRE(inst.coordinates.empty() || inst.coordinates.size() == inst.n, PreconditionError,
                    "cuboid coordinate distributions must have length n");
}

double stage_eps(const CuboidInstance& inst, std::size_t i) {
    return inst.eps.size() == 1 ? inst.eps.front() : inst.eps[i];
}

struct Extent {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::size_t arg_lo = 0;
    std::size_t arg_hi = 0;

    void add(double v, std::size_t k) {
        if (v < lo) {
            lo = v;
            arg_lo = k;
        }
        if (v > hi) {
            hi = v;
            arg_hi = k;
        }
    }
};

std::string fmt(double v, const char* spec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace

ComponentDist CuboidInstance::coordinate(std::size_t i) const {
    if (coordinates.empty()) return ComponentDist{DistKind::normal, 0.0, 1.0, {}};
    return coordinates.at(i);
}

std::vector<std::uint64_t> CuboidInstance::sample_sizes() const {
    check_instance(*this);
    if (mode == Mode::single_stage) {
        return {bounds::implicit_sample_size(static_cast<int>(2 * n + 1), stage_eps(*this, 0), theta_total)};
    }
    std::vector<std::uint64_t> out;
    const double theta = theta_total / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(bounds::implicit_sample_size(2, stage_eps(*this, i), theta));
    return out;
}

ScenarioProgram CuboidInstance::to_program(double box_extent) const {
    check_instance(*this);
    ScenarioProgram p;
    p.dimension = 2 * n;
    p.cost.assign(2 * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) p.cost[n + i] = 1.0;
    p.box = {Vector(2 * n, -box_extent), Vector(2 * n, box_extent)};
    if (mode == Mode::multi_stage) {
        for (std::size_t i = 0; i < n; ++i) {
            StageSpec st;
            st.generator = CuboidGenerator{{CuboidAxis{0, i, n + i}}};
            st.eps = stage_eps(*this, i);
            st.zeta_bar = 2;
            st.sampler = Sampler{{coordinate(i)}};
            p.stages.push_back(std::move(st));
        }
    } else {
        StageSpec st;
        CuboidGenerator gen;
        Sampler sampler;
        for (std::size_t i = 0; i < n; ++i) {
            gen.axes.push_back({i, i, n + i});
            sampler.components.push_back(coordinate(i));
        }
        st.generator = std::move(gen);
        st.eps = stage_eps(*this, 0);
        st.sampler = std::move(sampler);
        p.stages.push_back(std::move(st));
    }
    return p;
}

Solution cuboid_solve_analytic(const CuboidInstance& inst, const MultiSample& samples) {
    check_instance(inst);
    const std::size_t n = inst.n;
    std::vector<Extent> ext(n);
    Solution sol;
    if (inst.mode == Mode::multi_stage) {
        SCENOPT_REQUIRE(samples.outcomes.size() == n, PreconditionError, "multi-stage cuboid needs n stages");
        sol.active.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            SCENOPT_REQUIRE(!samples.outcomes[i].empty(), PreconditionError, "empty sample set");
            for (std::size_t k = 0; k < samples.outcomes[i].size(); ++k) ext[i].add(samples.outcomes[i][k].at(0), k);
            sol.active[i] = {std::min(ext[i].arg_lo, ext[i].arg_hi), std::max(ext[i].arg_lo, ext[i].arg_hi)};
            if (ext[i].arg_lo == ext[i].arg_hi) sol.active[i].pop_back();
        }
    } else {
        SCENOPT_REQUIRE(samples.outcomes.size() == 1, PreconditionError, "single-stage cuboid needs one stage");
        SCENOPT_REQUIRE(!samples.outcomes[0].empty(), PreconditionError, "empty sample set");
        for (std::size_t k = 0; k < samples.outcomes[0].size(); ++k) {
            const Vector& v = samples.outcomes[0][k];
            SCENOPT_REQUIRE(v.size() >= n, PreconditionError, "sample shorter than cuboid dimension");
            for (std::size_t i = 0; i < n; ++i) ext[i].add(v[i], k);
        }
        std::vector<std::size_t> act;
        for (const Extent& e : ext) {
            act.push_back(e.arg_lo);
            act.push_back(e.arg_hi);
        }
        std::sort(act.begin(), act.end());
        act.erase(std::unique(act.begin(), act.end()), act.end());
        sol.active = {act};
    }
    sol.x.assign(2 * n + 1, 0.0);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sol.x[i] = 0.5 * (ext[i].lo + ext[i].hi);
        sol.x[n + i] = ext[i].hi - ext[i].lo;
        sq += sol.x[n + i] * sol.x[n + i];
    }
    sol.x[2 * n] = std::sqrt(sq);
    sol.objective = sol.x[2 * n];
    sol.status = SolveStatus::optimal;
    return sol;
}

MultiSample draw(const CuboidInstance& inst, std::span<const std::uint64_t> sample_sizes, std::uint64_t seed,
                 std::uint64_t replication) {
    return draw_multisample(inst.to_program(), sample_sizes, seed, replication);
}

Table1 run_table1(double theta_total, const std::vector<double>& eps_list, const std::vector<std::size_t>& n_list) {
    Table1 t{eps_list, n_list, {}, {}};
    for (double eps : eps_list) {
        std::vector<std::uint64_t> m, s;
        for (std::size_t n : n_list) {
            m.push_back(bounds::implicit_sample_size(2, eps, theta_total / static_cast<double>(n)));
            s.push_back(bounds::implicit_sample_size(static_cast<int>(2 * n + 1), eps, theta_total));
        }
        t.multi.push_back(std::move(m));
        t.single.push_back(std::move(s));
    }
    return t;
}

std::string table1_csv(const Table1& table, Mode mode) {
    std::ostringstream os;
    os << "eps";
    for (std::size_t n : table.n_list) os << ",n=" << n;
    os << '\n';
    const auto& body = mode == Mode::multi_stage ? table.multi : table.single;
    for (std::size_t e = 0; e < table.eps_list.size(); ++e) {
        os << fmt(table.eps_list[e], "%g");
        for (std::uint64_t k : body[e]) os << ',' << k;
        os << '\n';
    }
    return os.str();
}

std::uint64_t cell_seed(std::uint64_t seed, std::size_t n, double eps) {
    std::uint64_t h = rng::splitmix64(seed);
    h = rng::splitmix64(h ^ static_cast<std::uint64_t>(n));
    return rng::splitmix64(h ^ std::bit_cast<std::uint64_t>(eps));
}

DiameterPair table2_replication(std::size_t n, std::uint64_t k_multi, std::uint64_t k_single, std::uint64_t seed,
                                std::uint64_t replication) {
    const rng::CounterRng multi({seed, replication, rng::Namespace::cuboid_multi});
    const rng::CounterRng single({seed, replication, rng::Namespace::cuboid_single});
    DiameterPair out;
    double sq_multi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Extent e;
        for (std::uint64_t k = 0; k < k_multi; ++k) e.add(multi.normal(static_cast<std::uint32_t>(i), k, 0), k);
        sq_multi += (e.hi - e.lo) * (e.hi - e.lo);
    }
    std::vector<Extent> ext(n);
    for (std::uint64_t k = 0; k < k_single; ++k) {
        for (std::size_t i = 0; i < n; ++i) ext[i].add(single.normal(0, k, static_cast<std::uint32_t>(i)), k);
    }
    double sq_single = 0.0;
    for (const Extent& e : ext) sq_single += (e.hi - e.lo) * (e.hi - e.lo);
    out.multi = std::sqrt(sq_multi);
    out.single = std::sqrt(sq_single);
    return out;
}

Table2 run_table2(const Table2Options& opt) {
    SCENOPT_REQUIRE(opt.replications >= 1, PreconditionError, "table2 needs at least one replication");
    const Table1 sizes = run_table1(opt.theta_total, opt.eps_list, opt.n_list);
    Table2 t{opt.eps_list, opt.n_list, opt.replications, {}};
    std::vector<double> surplus(opt.replications);
    for (std::size_t e = 0; e < opt.eps_list.size(); ++e) {
        std::vector<Table2Cell> row;
        for (std::size_t c = 0; c < opt.n_list.size(); ++c) {
            Table2Cell cell{opt.eps_list[e], opt.n_list[c], sizes.multi[e][c], sizes.single[e][c], 0.0, 0.0};
            const std::uint64_t s = cell_seed(opt.seed, cell.n, cell.eps);
            parallel_for(opt.replications, opt.threads, [&](std::size_t r) {
                const DiameterPair d = table2_replication(cell.n, cell.k_multi, cell.k_single, s, r);
                surplus[r] = (d.single - d.multi) / d.multi;
            });
            double sum = 0.0;
            for (double v : surplus) sum += v;
            cell.mean = sum / static_cast<double>(opt.replications);
            if (opt.replications > 1) {
                double ss = 0.0;
                for (double v : surplus) ss += (v - cell.mean) * (v - cell.mean);
                cell.se = std::sqrt(ss / static_cast<double>(opt.replications - 1) /
                                    static_cast<double>(opt.replications));
            }
            row.push_back(cell);
        }
        t.cells.push_back(std::move(row));
    }
    return t;
}

std::string table2_csv(const Table2& table) {
    std::ostringstream os;
    os << "eps";
    for (std::size_t n : table.n_list) os << ",n=" << n;
    for (std::size_t n : table.n_list) os << ",se_n=" << n;
    os << '\n';
    for (std::size_t e = 0; e < table.eps_list.size(); ++e) {
        os << fmt(table.eps_list[e], "%g");
        for (const auto& cell : table.cells[e]) os << ',' << fmt(100.0 * cell.mean, "%.3f");
        for (const auto& cell : table.cells[e]) os << ',' << fmt(100.0 * cell.se, "%.3f");
        os << '\n';
    }
    return os.str();
}

}  // namespace scenopt::cuboid
