#include "scenopt/lp.hpp"

#include "scenopt/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace scenopt::lp {

namespace {

using Ref = ConstraintRef;
using Kind = ConstraintRef::Kind;

struct ScaledRows {
    std::size_t d = 0;
    std::vector<double> a;  // row-major, unit infinity norm
    std::vector<double> b;
    std::vector<double> scale;
    std::vector<std::uint8_t> usable;

    const double* row(std::size_t k) const { return a.data() + k * d; }
};

class Working {
public:
    Working(const Problem& p, const ScaledRows& rows) : p_(p), rows_(rows) {}

    void normal(const Ref& r, Eigen::Ref<Eigen::VectorXd> g, double& h) const {
        g.setZero();
        switch (r.kind) {
            case Kind::row: {
                const double* a = rows_.row(r.index);
                for (std::size_t j = 0; j < rows_.d; ++j) g[static_cast<Eigen::Index>(j)] = a[j];
                h = rows_.b[r.index];
                break;
            }
            case Kind::lower:
                g[static_cast<Eigen::Index>(r.index)] = -1.0;
                h = -p_.lower[r.index];
                break;
            case Kind::upper:
                g[static_cast<Eigen::Index>(r.index)] = 1.0;
                h = p_.upper[r.index];
                break;
        }
    }

    void assemble(const std::vector<Ref>& basis, Eigen::MatrixXd& G, Eigen::VectorXd& h) const {
        const auto d = static_cast<Eigen::Index>(basis.size());
        G.resize(d, d);
        h.resize(d);
        Eigen::VectorXd g(d);
        for (Eigen::Index k = 0; k < d; ++k) {
            double hk = 0.0;
            normal(basis[static_cast<std::size_t>(k)], g, hk);
            G.row(k) = g.transpose();
            h[k] = hk;
        }
    }

private:
    const Problem& p_;
    const ScaledRows& rows_;
};

bool lex_less(const Eigen::RowVectorXd& u, const Eigen::RowVectorXd& v) {
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double a = u[i];
        const double b = v[i];
        const double tol = 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
        if (a < b - tol) return true;
        if (a > b + tol) return false;
    }
    return false;
}

// Canonical ordering of the final working set so that the reported x does not
// depend on the pivoting path or on the order rows were supplied in.
bool canonical_less(const Ref& l, const Ref& r, const ScaledRows& rows) {
    if (l.kind != r.kind) return static_cast<int>(l.kind) < static_cast<int>(r.kind);
    if (l.kind != Kind::row) return l.index < r.index;
    const double* a = rows.row(l.index);
    const double* b = rows.row(r.index);
    for (std::size_t j = 0; j < rows.d; ++j) {
        if (a[j] != b[j]) return a[j] < b[j];
    }
    if (rows.b[l.index] != rows.b[r.index]) return rows.b[l.index] < rows.b[r.index];
    return l.index < r.index;
}

void check_problem(const Problem& p, std::span<const std::uint8_t> enabled) {
    SCENOPT_REQUIRE(p.dimension >= 1, PreconditionError, "LP dimension must be >= 1");
    SCENOPT_REQUIRE(p.cost.size() == p.dimension && p.lower.size() == p.dimension && p.upper.size() == p.dimension,
                    PreconditionError, "LP cost/bounds size mismatch");
    for (std::size_t j = 0; j < p.dimension; ++j) {
        SCENOPT_REQUIRE(std::isfinite(p.lower[j]) && std::isfinite(p.upper[j]) && p.lower[j] <= p.upper[j],
                        PreconditionError, "LP bounds must be finite with lower <= upper");
    }
    for (const auto& r : p.rows) {
        SCENOPT_REQUIRE(r.a.size() == p.dimension, PreconditionError, "LP row length mismatch");
    }
    SCENOPT_REQUIRE(enabled.empty() || enabled.size() == p.rows.size(), PreconditionError,
                    "LP row mask length mismatch");
}

}  // namespace

Result solve(const Problem& problem, std::span<const std::uint8_t> enabled, const Options& options) {
    check_problem(problem, enabled);
    const std::size_t d = problem.dimension;
    const std::size_t m = problem.rows.size();
    const double tol = options.feasibility_tol;

    Result result;
    result.row_duals.assign(m, 0.0);
    result.lower_duals.assign(d, 0.0);
    result.upper_duals.assign(d, 0.0);

    ScaledRows rows;
    rows.d = d;
    rows.a.resize(m * d);
    rows.b.resize(m);
    rows.scale.assign(m, 0.0);
    rows.usable.assign(m, 0);
    for (std::size_t k = 0; k < m; ++k) {
        if (!enabled.empty() && !enabled[k]) continue;
        const Row& r = problem.rows[k];
        double s = 0.0;
        for (double v : r.a) s = std::max(s, std::fabs(v));
        if (s == 0.0) {
            if (r.b < -tol) return result;  // 0 <= b fails
            continue;
        }
        rows.scale[k] = 1.0 / s;
        for (std::size_t j = 0; j < d; ++j) rows.a[k * d + j] = r.a[j] / s;
        rows.b[k] = r.b / s;
        rows.usable[k] = 1;
    }

    std::vector<Ref> basis(d);
    std::vector<std::uint8_t> row_in(m, 0), lower_in(d, 0), upper_in(d, 0);
    for (std::size_t j = 0; j < d; ++j) {
        if (problem.cost[j] >= 0.0) {
            basis[j] = {Kind::lower, j};
            lower_in[j] = 1;
        } else {
            basis[j] = {Kind::upper, j};
            upper_in[j] = 1;
        }
    }

    const auto de = static_cast<Eigen::Index>(d);
    Eigen::MatrixXd rhs(de, de + 1);  // -[c | I]
    rhs.setZero();
    for (std::size_t j = 0; j < d; ++j) {
        rhs(static_cast<Eigen::Index>(j), 0) = -problem.cost[j];
        rhs(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j) + 1) = -1.0;
    }

    const Working work(problem, rows);
    const std::size_t max_iter = options.max_iterations ? options.max_iterations : 50 * (m + 2 * d) + 1000;
    Eigen::MatrixXd G;
    Eigen::VectorXd h, x, g(de), w;
    bool optimal = false;
    std::size_t iter = 0;
    for (; iter < max_iter; ++iter) {
        work.assemble(basis, G, h);
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
        if (!lu.isInvertible()) throw NumericalError("LP working set became singular");
        x = lu.solve(h);

        // Pricing: most violated constraint; ties go to the first one scanned.
        double best = tol;
        Ref enter{};
        bool found = false;
        for (std::size_t k = 0; k < m; ++k) {
            if (!rows.usable[k] || row_in[k]) continue;
            const double* a = rows.row(k);
            double v = -rows.b[k];
            for (std::size_t j = 0; j < d; ++j) v += a[j] * x[static_cast<Eigen::Index>(j)];
            if (v > best) {
                best = v;
                enter = {Kind::row, k};
                found = true;
            }
        }
        for (std::size_t j = 0; j < d; ++j) {
            const double xj = x[static_cast<Eigen::Index>(j)];
            if (!upper_in[j] && xj - problem.upper[j] > best) {
                best = xj - problem.upper[j];
                enter = {Kind::upper, j};
                found = true;
            }
            if (!lower_in[j] && problem.lower[j] - xj > best) {
                best = problem.lower[j] - xj;
                enter = {Kind::lower, j};
                found = true;
            }
        }
        if (!found) {
            optimal = true;
            break;
        }

        double hq = 0.0;
        work.normal(enter, g, hq);
        const Eigen::FullPivLU<Eigen::MatrixXd> lut(G.transpose());
        w = lut.solve(g);
        const Eigen::MatrixXd lambda = lut.solve(rhs);

        // Lexicographic ratio test.
        Eigen::Index leave = -1;
        Eigen::RowVectorXd best_ratio;
        for (Eigen::Index k = 0; k < de; ++k) {
            if (w[k] <= options.pivot_tol) continue;
            Eigen::RowVectorXd ratio = lambda.row(k) / w[k];
            if (leave < 0 || lex_less(ratio, best_ratio)) {
                leave = k;
                best_ratio = std::move(ratio);
            }
        }
        if (leave < 0) {
            result.iterations = iter + 1;
            return result;  // dual unbounded: primal infeasible
        }

        const Ref out = basis[static_cast<std::size_t>(leave)];
        switch (out.kind) {
            case Kind::row: row_in[out.index] = 0; break;
            case Kind::lower: lower_in[out.index] = 0; break;
            case Kind::upper: upper_in[out.index] = 0; break;
        }
        switch (enter.kind) {
            case Kind::row: row_in[enter.index] = 1; break;
            case Kind::lower: lower_in[enter.index] = 1; break;
            case Kind::upper: upper_in[enter.index] = 1; break;
        }
        basis[static_cast<std::size_t>(leave)] = enter;
    }
    if (!optimal) throw NumericalError("LP iteration limit reached");

    std::sort(basis.begin(), basis.end(),
              [&](const Ref& l, const Ref& r) { return canonical_less(l, r, rows); });
    work.assemble(basis, G, h);
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    x = lu.solve(h);
    const Eigen::VectorXd lam = Eigen::FullPivLU<Eigen::MatrixXd>(G.transpose()).solve(rhs.col(0));

    result.status = Status::optimal;
    result.iterations = iter;
    result.x.assign(x.data(), x.data() + de);
    result.objective = 0.0;
    for (std::size_t j = 0; j < d; ++j) result.objective += problem.cost[j] * result.x[j];
    for (std::size_t k = 0; k < d; ++k) {
        double v = lam[static_cast<Eigen::Index>(k)];
        if (v < 0.0 && v > -1e-9) v = 0.0;
        const Ref& r = basis[k];
        switch (r.kind) {
            case Kind::row: result.row_duals[r.index] = v * rows.scale[r.index]; break;
            case Kind::lower: result.lower_duals[r.index] = v; break;
            case Kind::upper: result.upper_duals[r.index] = v; break;
        }
    }
    result.basis = std::move(basis);
    return result;
}

}  // namespace scenopt::lp
