#pragma once

#include "scenopt/program.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace scenopt::lp {

// min c^T x  s.t.  rows[k]: a_k^T x <= b_k,  lower <= x <= upper  (finite bounds).
struct Problem {
    std::size_t dimension = 0;
    Vector cost;
    Vector lower;
    Vector upper;
    std::vector<Row> rows;
};

enum class Status { optimal, infeasible };

struct ConstraintRef {
    enum class Kind : std::uint8_t { row, lower, upper };
    Kind kind = Kind::row;
    std::size_t index = 0;

    friend bool operator==(const ConstraintRef&, const ConstraintRef&) = default;
};

struct Result {
    Status status = Status::infeasible;
    Vector x;
    double objective = 0.0;
    Vector row_duals;    // >= 0, zero for rows outside the final basis
    Vector lower_duals;  // multipliers of -x_j <= -lower_j
    Vector upper_duals;  // multipliers of  x_j <=  upper_j
    std::vector<ConstraintRef> basis;
    std::size_t iterations = 0;
};

struct Options {
    double feasibility_tol = 1e-9;  // on rows scaled to unit infinity norm
    double pivot_tol = 1e-11;
    std::size_t max_iterations = 0;  // 0 = automatic
};

// Dense dual simplex over a working set of `dimension` active constraints.
//
// The optimum is the lexicographic minimum of (c^T x, x_1, ..., x_d): the
// right-hand side of the dual carries the perturbation c + e_1 s + e_2 s^2 + ...,
// handled symbolically by the lexicographic ratio test, which also rules out
// cycling. The initial working set is the box vertex selected by sign(c), which
// is dual feasible, so no phase one is needed; primal infeasibility shows up
// as an unbounded dual ray.
//
// `enabled` (optional, one entry per row) masks rows out of the problem.
Result solve(const Problem& problem, std::span<const std::uint8_t> enabled = {}, const Options& options = {});

}  // namespace scenopt::lp
