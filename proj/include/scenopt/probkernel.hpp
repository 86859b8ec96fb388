#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

// Binomial and beta primitives used by the sample-size bounds and the
// Clopper-Pearson intervals. Tails are accumulated in log space so that
// probabilities far below DBL_MIN and sample sizes around 1e6 stay exact
// to a few ulps.
namespace scenopt::prob {

// Natural log of a probability. -inf encodes probability zero.
struct LogProb {
    double value = -std::numeric_limits<double>::infinity();

    static constexpr LogProb zero() { return {}; }
    static constexpr LogProb one() { return {0.0}; }

    double prob() const { return std::exp(value); }
    bool is_zero() const { return value == -std::numeric_limits<double>::infinity(); }
};

// log(exp(a) + exp(b)) without overflow; either argument may be -inf.
double log_sum_exp(double a, double b);

// ln C(n, k). Throws DomainError when k > n.
double log_binomial_coefficient(std::uint64_t n, std::uint64_t k);

// ln of C(K,j) eps^j (1-eps)^(K-j); -inf outside 0..K.
double log_binomial_pmf(std::int64_t j, std::uint64_t K, double eps);

// Binomial distribution function Phi(x; K, eps) = P[Bin(K, eps) <= x].
// Phi(x < 0) = 0 and Phi(x >= K) = 1. Throws DomainError unless eps is in (0,1).
LogProb log_binomial_cdf(std::int64_t x, std::uint64_t K, double eps);
double binomial_cdf(std::int64_t x, std::uint64_t K, double eps);

double log_beta(double a, double b);

// I_x(a, b) = B(x; a, b) / B(a, b), via Lentz's continued fraction.
double regularized_incomplete_beta(double x, double a, double b);

// Unregularized B(x; a, b).
double incomplete_beta(double x, double a, double b);

// Smallest x in [0,1] with I_x(a, b) >= p (bisection; I is continuous and increasing).
double inverse_regularized_incomplete_beta(double p, double a, double b);

}  // namespace scenopt::prob
