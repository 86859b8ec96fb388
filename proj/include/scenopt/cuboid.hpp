#pragma once

#include "scenopt/program.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

// Smallest axis-aligned n-cuboid containing sampled points, in multi-stage
// form (one stage per coordinate) and single-stage form (all coordinates in
// one stage). Decision vector: centers z (n), widths w (n), diameter W = |w|_2.
namespace scenopt::cuboid {

enum class Mode { multi_stage, single_stage };

struct CuboidInstance {
    std::size_t n = 2;
    std::vector<double> eps;  // per coordinate; single-stage mode uses eps.front()
    double theta_total = 1e-6;
    Mode mode = Mode::multi_stage;
    std::vector<ComponentDist> coordinates;  // empty means standard normal for every coordinate

    std::size_t decision_dimension() const { return 2 * n + 1; }
    ComponentDist coordinate(std::size_t i) const;
    // Planned sample sizes: implicit(2, eps_i, theta/n) per stage, or implicit(2n+1, eps, theta).
    std::vector<std::uint64_t> sample_sizes() const;
    // LP form over (z, w) minimizing sum(w); it has the same minimizer as the
    // diameter objective because the coordinates decouple.
    ScenarioProgram to_program(double box_extent = 1e6) const;
};

// Per coordinate z = (min+max)/2, w = max-min. In multi-stage mode stage i
// holds scalar samples of coordinate i; in single-stage mode stage 0 holds
// full vectors. x has length 2n+1 with W last; objective is W. active[i]
// lists the lowest-index argmin and argmax of each coordinate.
Solution cuboid_solve_analytic(const CuboidInstance& instance, const MultiSample& samples);

// Draws the multisample the instance's program would use.
MultiSample draw(const CuboidInstance& instance, std::span<const std::uint64_t> sample_sizes, std::uint64_t seed,
                 std::uint64_t replication = 0);

inline const std::vector<double> kTableEps{0.01, 0.05, 0.10, 0.25};
inline const std::vector<std::size_t> kTableN{2, 3, 5, 10, 50, 100, 500};

struct Table1 {
    std::vector<double> eps_list;
    std::vector<std::size_t> n_list;
    std::vector<std::vector<std::uint64_t>> multi;   // [eps][n]
    std::vector<std::vector<std::uint64_t>> single;  // [eps][n]
};

Table1 run_table1(double theta_total = 1e-6, const std::vector<double>& eps_list = kTableEps,
                  const std::vector<std::size_t>& n_list = kTableN);
std::string table1_csv(const Table1& table, Mode mode);

struct Table2Options {
    std::vector<std::size_t> n_list = kTableN;
    std::vector<double> eps_list = kTableEps;
    std::uint64_t replications = 10'000;
    std::uint64_t seed = 0;
    double theta_total = 1e-6;
    std::size_t threads = 1;
};

struct Table2Cell {
    double eps = 0.0;
    std::size_t n = 0;
    std::uint64_t k_multi = 0;
    std::uint64_t k_single = 0;
    double mean = 0.0;  // mean of (W_single - W_multi) / W_multi
    double se = 0.0;
};

struct Table2 {
    std::vector<double> eps_list;
    std::vector<std::size_t> n_list;
    std::uint64_t replications = 0;
    std::vector<std::vector<Table2Cell>> cells;  // [eps][n]
};

std::uint64_t cell_seed(std::uint64_t seed, std::size_t n, double eps);

// Diameters for one replication of a cell, each mode from its own stream.
struct DiameterPair {
    double multi = 0.0;
    double single = 0.0;
};
DiameterPair table2_replication(std::size_t n, std::uint64_t k_multi, std::uint64_t k_single, std::uint64_t seed,
                                std::uint64_t replication);

Table2 run_table2(const Table2Options& options);
// Cells in percent; one column per n followed by one standard-error column per n.
std::string table2_csv(const Table2& table);

}  // namespace scenopt::cuboid
