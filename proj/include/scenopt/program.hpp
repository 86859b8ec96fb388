#pragma once

#include "scenopt/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace scenopt {

using Vector = std::vector<double>;

// One linear inequality a^T x <= b.
struct Row {
    Vector a;
    double b = 0.0;
};

// ---------------------------------------------------------------------------
// Uncertainty samplers (used only for simulation).

enum class DistKind { uniform, normal, discrete };

// Scalar distribution of one uncertainty component. For uniform, [p1, p2) is
// the support; for normal, p1 is the mean and p2 the standard deviation.
struct ComponentDist {
    DistKind kind = DistKind::uniform;
    double p1 = 0.0;
    double p2 = 1.0;
    std::vector<double> values;  // discrete support, equally likely

    double draw(const rng::CounterRng& rng, std::uint32_t stage, std::uint64_t sample,
                std::uint32_t component) const;
};

// Independent product of scalar component distributions.
struct Sampler {
    std::vector<ComponentDist> components;

    std::size_t dimension() const { return components.size(); }
    Vector draw(const rng::CounterRng& rng, std::uint32_t stage, std::uint64_t sample) const;
};

// ---------------------------------------------------------------------------
// Constraint generators: uncertainty outcome -> list of rows (joint constraint).

// a(delta) = a0 + sum_j delta_j a_delta[j],  b(delta) = b0 + sum_j delta_j b_delta[j].
struct AffineRow {
    Vector a0;
    std::vector<Vector> a_delta;
    double b0 = 0.0;
    Vector b_delta;
};

struct LinearGenerator {
    std::vector<AffineRow> rows;
};

// Interval-containment rows of the minimal-diameter cuboid:
//   z - w/2 <= delta_c  and  -z - w/2 <= -delta_c   for every axis.
struct CuboidAxis {
    std::size_t component = 0;  // which outcome component is read
    std::size_t z_index = 0;
    std::size_t w_index = 0;
};

struct CuboidGenerator {
    std::vector<CuboidAxis> axes;
};

using Generator = std::variant<LinearGenerator, CuboidGenerator>;

std::vector<Row> generate_rows(const Generator& gen, std::span<const double> delta, std::size_t dimension);

// Joint constraint value max_r (a_r^T x - b_r); > 0 means violated.
double constraint_value(const std::vector<Row>& rows, std::span<const double> x);

// ---------------------------------------------------------------------------

struct StageSpec {
    Generator generator;
    double eps = 0.1;
    std::optional<int> zeta_bar;       // declared support-rank bound
    bool monotone = false;
    std::optional<Sampler> sampler;
    std::optional<std::uint64_t> sample_size;  // overrides the planned K_i when set
};

struct Box {
    Vector lower;
    Vector upper;
};

struct ScenarioProgram {
    std::size_t dimension = 0;
    Vector cost;
    Box box;
    std::vector<Row> deterministic_rows;
    std::vector<StageSpec> stages;
    // When set, the box is an artificial stand-in for +-infinity and an optimum
    // touching it is reported with status unbounded_guard.
    bool box_is_guard = false;

    // Throws ConfigError on structural problems (sizes, unbounded box, eps range).
    void validate() const;
};

// Declared zeta_bar if present, otherwise the structural rank of the generator.
int resolved_zeta_bar(const StageSpec& stage, std::size_t dimension);

// ---------------------------------------------------------------------------

struct SeedProvenance {
    std::uint64_t seed = 0;
    std::uint64_t replication = 0;
    std::string generator = "philox4x32-10";
};

struct MultiSample {
    std::vector<std::vector<Vector>> outcomes;    // [stage][sample] -> delta
    std::vector<std::vector<double>> tie_breaks;  // [stage][sample]
    double domain_tie_break = 0.0;                // tie-break value of the set X
    SeedProvenance provenance;

    std::size_t total_samples() const;
};

enum class SolveStatus { optimal, infeasible, unbounded_guard };
std::string to_string(SolveStatus s);

struct Solution {
    SolveStatus status = SolveStatus::infeasible;
    Vector x;
    double objective = 0.0;
    std::vector<std::vector<std::size_t>> active;  // [stage] -> tight sample indices
    std::vector<std::vector<double>> duals;        // [stage][sample], summed over the sample's rows
    Vector deterministic_duals;
    Vector lower_duals;
    Vector upper_duals;
    std::size_t iterations = 0;

    bool ok() const { return status != SolveStatus::infeasible; }
};

}  // namespace scenopt
