#include "scenopt/errors.hpp"
#include "scenopt/scenario.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace scenopt {

int support_rank_linear(const std::vector<Vector>& rows, double tol) {
    SCENOPT_REQUIRE(!rows.empty(), PreconditionError, "support_rank_linear needs at least one row");
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto d = static_cast<Eigen::Index>(rows.front().size());
    Eigen::MatrixXd m(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        SCENOPT_REQUIRE(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) == d, PreconditionError,
                        "rows must have equal length");
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] == 0.0) return 0;
    const double cutoff = tol * std::max(1.0, sv[0]);
    return static_cast<int>((sv.array() > cutoff).count());
}

int support_rank_quadratic(const std::vector<Vector>& q, double tol) {
    const auto d = static_cast<Eigen::Index>(q.size());
    SCENOPT_REQUIRE(d >= 1, DomainError, "Q must be a nonempty square matrix");
    Eigen::MatrixXd m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        SCENOPT_REQUIRE(static_cast<Eigen::Index>(q[static_cast<std::size_t>(i)].size()) == d, DomainError,
                        "Q must be square");
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = q[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    SCENOPT_REQUIRE((m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale, DomainError, "Q must be symmetric");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    const double cutoff = tol * std::max(1.0, ev.cwiseAbs().maxCoeff());
    SCENOPT_REQUIRE(ev.minCoeff() >= -cutoff, DomainError, "Q must be positive semidefinite");
    return static_cast<int>((ev.array() > cutoff).count());
}

}  // namespace scenopt
