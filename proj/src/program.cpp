#include "scenopt/program.hpp"

#include "scenopt/errors.hpp"
#include "scenopt/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scenopt {

double ComponentDist::draw(const rng::CounterRng& rng, std::uint32_t stage, std::uint64_t sample,
                           std::uint32_t component) const {
    switch (kind) {
        case DistKind::uniform:
            return p1 + (p2 - p1) * rng.uniform(stage, sample, component);
        case DistKind::normal:
            return p1 + p2 * rng.normal(stage, sample, component);
        case DistKind::discrete: {
            SCENOPT_REQUIRE(!values.empty(), ConfigError, "discrete distribution without values");
            const double u = rng.uniform(stage, sample, component);
            auto idx = static_cast<std::size_t>(u * static_cast<double>(values.size()));
            return values[std::min(idx, values.size() - 1)];
        }
    }
    return 0.0;
}

Vector Sampler::draw(const rng::CounterRng& rng, std::uint32_t stage, std::uint64_t sample) const {
    Vector out(components.size());
    for (std::size_t j = 0; j < components.size(); ++j) {
        out[j] = components[j].draw(rng, stage, sample, static_cast<std::uint32_t>(j));
    }
    return out;
}

std::vector<Row> generate_rows(const Generator& gen, std::span<const double> delta, std::size_t dimension) {
    std::vector<Row> out;
    if (const auto* lin = std::get_if<LinearGenerator>(&gen)) {
        out.reserve(lin->rows.size());
        for (const AffineRow& ar : lin->rows) {
            Row r{ar.a0, ar.b0};
            r.a.resize(dimension, 0.0);
            for (std::size_t j = 0; j < ar.a_delta.size() && j < delta.size(); ++j) {
                for (std::size_t c = 0; c < dimension && c < ar.a_delta[j].size(); ++c) {
                    r.a[c] += delta[j] * ar.a_delta[j][c];
                }
            }
            for (std::size_t j = 0; j < ar.b_delta.size() && j < delta.size(); ++j) {
                r.b += delta[j] * ar.b_delta[j];
            }
            out.push_back(std::move(r));
        }
        return out;
    }
    const auto& cub = std::get<CuboidGenerator>(gen);
    out.reserve(2 * cub.axes.size());
    for (const CuboidAxis& ax : cub.axes) {
        SCENOPT_REQUIRE(ax.component < delta.size(), ConfigError, "cuboid axis reads a missing outcome component");
        const double v = delta[ax.component];
        Row up{Vector(dimension, 0.0), v};
        up.a[ax.z_index] = 1.0;
        up.a[ax.w_index] = -0.5;
        Row lo{Vector(dimension, 0.0), -v};
        lo.a[ax.z_index] = -1.0;
        lo.a[ax.w_index] = -0.5;
        out.push_back(std::move(up));
        out.push_back(std::move(lo));
    }
    return out;
}

double constraint_value(const std::vector<Row>& rows, std::span<const double> x) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const Row& r : rows) {
        double v = -r.b;
        for (std::size_t j = 0; j < r.a.size() && j < x.size(); ++j) v += r.a[j] * x[j];
        worst = std::max(worst, v);
    }
    return worst;
}

namespace {

void validate_generator(const Generator& gen, std::size_t d, std::size_t stage) {
    const std::string where = "stage " + std::to_string(stage) + ": ";
    if (const auto* lin = std::get_if<LinearGenerator>(&gen)) {
        SCENOPT_REQUIRE(!lin->rows.empty(), ConfigError, where + "linear generator without rows");
        for (const AffineRow& r : lin->rows) {
            SCENOPT_REQUIRE(r.a0.size() == d, ConfigError, where + "row a0 length must equal dimension");
            for (const Vector& v : r.a_delta) {
                SCENOPT_REQUIRE(v.size() == d, ConfigError, where + "row a_delta entries must have length dimension");
            }
        }
        return;
    }
    const auto& cub = std::get<CuboidGenerator>(gen);
    SCENOPT_REQUIRE(!cub.axes.empty(), ConfigError, where + "cuboid generator without axes");
    for (const CuboidAxis& ax : cub.axes) {
        SCENOPT_REQUIRE(ax.z_index < d && ax.w_index < d && ax.z_index != ax.w_index, ConfigError,
                        where + "cuboid axis variable index out of range");
    }
}

}  // namespace

void ScenarioProgram::validate() const {
    SCENOPT_REQUIRE(dimension >= 1, ConfigError, "dimension must be >= 1");
    SCENOPT_REQUIRE(cost.size() == dimension, ConfigError, "cost vector length must equal dimension");
    SCENOPT_REQUIRE(box.lower.size() == dimension && box.upper.size() == dimension, ConfigError,
                    "box bounds must have length dimension");
    for (std::size_t j = 0; j < dimension; ++j) {
        SCENOPT_REQUIRE(std::isfinite(box.lower[j]) && std::isfinite(box.upper[j]), ConfigError,
                        "box bounds must be finite");
        SCENOPT_REQUIRE(box.lower[j] <= box.upper[j], ConfigError, "box lower bound exceeds upper bound");
    }
    for (const Row& r : deterministic_rows) {
        SCENOPT_REQUIRE(r.a.size() == dimension, ConfigError, "deterministic row length must equal dimension");
    }
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const StageSpec& s = stages[i];
        SCENOPT_REQUIRE(s.eps > 0.0 && s.eps < 1.0, ConfigError, "stage " + std::to_string(i) + ": eps must lie in (0,1)");
        validate_generator(s.generator, dimension, i);
        if (s.zeta_bar) {
            SCENOPT_REQUIRE(*s.zeta_bar >= 1 && static_cast<std::size_t>(*s.zeta_bar) <= dimension, ConfigError,
                            "stage " + std::to_string(i) + ": zeta_bar must lie in [1, dimension]");
        }
    }
}

int resolved_zeta_bar(const StageSpec& stage, std::size_t dimension) {
    if (stage.zeta_bar) return *stage.zeta_bar;
    std::vector<Vector> directions;
    if (const auto* lin = std::get_if<LinearGenerator>(&stage.generator)) {
        for (const AffineRow& r : lin->rows) {
            directions.push_back(r.a0);
            for (const Vector& v : r.a_delta) directions.push_back(v);
        }
    } else {
        for (const CuboidAxis& ax : std::get<CuboidGenerator>(stage.generator).axes) {
            Vector z(dimension, 0.0), w(dimension, 0.0);
            z[ax.z_index] = 1.0;
            w[ax.w_index] = 1.0;
            directions.push_back(std::move(z));
            directions.push_back(std::move(w));
        }
    }
    return std::max(1, support_rank_linear(directions));
}

std::size_t MultiSample::total_samples() const {
    std::size_t n = 0;
    for (const auto& s : outcomes) n += s.size();
    return n;
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded_guard: return "unbounded-guard";
    }
    return "unknown";
}

}  // namespace scenopt
