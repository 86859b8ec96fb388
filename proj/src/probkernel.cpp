#include "scenopt/probkernel.hpp"

#include "scenopt/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace scenopt::prob {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLn2Pi = 1.8378770664093454836;

// Stirling error ln(n!) - (n + 1/2) ln n + n - ln sqrt(2 pi) for integer n.
constexpr std::array<double, 16> kStirlingErrorTable = {
    0.0,
    0.08106146679532725822,
    0.041340695955409294094,
    0.027677925684998339149,
    0.020790672103765093112,
    0.016644691189821192163,
    0.013876128823070747999,
    0.011896709945891770095,
    0.010411265261972096497,
    0.0092554621827127329177,
    0.0083305634333628712565,
    0.007573675487951840795,
    0.0069428401072095298657,
    0.0064089941880042070684,
    0.0059513701127588477356,
    0.005554733551962801371,
};

double stirling_error(double n) {
    if (n <= 15.0) {
        if (n == std::floor(n)) {
            return kStirlingErrorTable[static_cast<std::size_t>(n)];
        }
        return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - 0.5 * kLn2Pi;
    }
    const double nsq = n * n;
    constexpr double s0 = 1.0 / 12.0;
    constexpr double s1 = 1.0 / 360.0;
    constexpr double s2 = 1.0 / 1260.0;
    constexpr double s3 = 1.0 / 1680.0;
    constexpr double s4 = 1.0 / 1188.0;
    if (n > 500) return (s0 - s1 / nsq) / n;
    if (n > 80) return (s0 - (s1 - s2 / nsq) / nsq) / n;
    if (n > 35) return (s0 - (s1 - (s2 - s3 / nsq) / nsq) / nsq) / n;
    return (s0 - (s1 - (s2 - (s3 - s4 / nsq) / nsq) / nsq) / nsq) / n;
}

// Deviance term x ln(x / np) + np - x, accurate when x is close to np.
double deviance(double x, double np) {
    if (std::fabs(x - np) < 0.1 * (x + np)) {
        double v = (x - np) / (x + np);
        double s = (x - np) * v;
        double ej = 2.0 * x * v;
        v *= v;
        for (int j = 1; j < 1000; ++j) {
            ej *= v;
            const double s1 = s + ej / (2 * j + 1);
            if (s1 == s) return s1;
            s = s1;
        }
        return s;
    }
    return x * std::log(x / np) + np - x;
}

void check_eps(double eps) {
    SCENOPT_REQUIRE(eps > 0.0 && eps < 1.0, DomainError, "binomial success probability must lie in (0,1)");
}

// Beta continued fraction (modified Lentz).
double beta_continued_fraction(double x, double a, double b) {
    constexpr double tiny = 1e-300;
    constexpr double tol = 1e-16;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < tol) return h;
    }
    throw NumericalError("incomplete beta continued fraction did not converge");
}

}  // namespace

double log_sum_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

double log_binomial_coefficient(std::uint64_t n, std::uint64_t k) {
    SCENOPT_REQUIRE(k <= n, DomainError, "log_binomial_coefficient requires k <= n");
    const std::uint64_t kk = std::min(k, n - k);
    if (kk == 0) return 0.0;
    if (kk <= 30) {
        double acc = 0.0;
        for (std::uint64_t i = 1; i <= kk; ++i) {
            acc += std::log(static_cast<double>(n - kk + i) / static_cast<double>(i));
        }
        return acc;
    }
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(kk);
    const double rd = nd - kd;
    return stirling_error(nd) - stirling_error(kd) - stirling_error(rd)
           + 0.5 * (std::log(nd) - kLn2Pi - std::log(kd) - std::log(rd))
           + kd * std::log(nd / kd) + rd * std::log1p(kd / rd);
}

double log_binomial_pmf(std::int64_t j, std::uint64_t K, double eps) {
    check_eps(eps);
    if (j < 0 || static_cast<std::uint64_t>(j) > K) return kNegInf;
    const double n = static_cast<double>(K);
    if (j == 0) return n * std::log1p(-eps);
    if (static_cast<std::uint64_t>(j) == K) return n * std::log(eps);
    const double x = static_cast<double>(j);
    const double q = 1.0 - eps;
    const double lc = stirling_error(n) - stirling_error(x) - stirling_error(n - x)
                      - deviance(x, n * eps) - deviance(n - x, n * q);
    const double lf = kLn2Pi + std::log(x) + std::log1p(-x / n);
    return lc - 0.5 * lf;
}

LogProb log_binomial_cdf(std::int64_t x, std::uint64_t K, double eps) {
    check_eps(eps);
    if (x < 0) return LogProb::zero();
    if (static_cast<std::uint64_t>(x) >= K) return LogProb::one();

    // Terms decrease monotonically away from the mode; stop once the
    // remaining mass is below e^-40 of the accumulated sum.
    constexpr double kCutoff = 40.0;
    const auto mode = static_cast<std::int64_t>(std::floor((static_cast<double>(K) + 1.0) * eps));
    double acc = kNegInf;
    if (x < mode) {
        for (std::int64_t j = x; j >= 0; --j) {
            const double lt = log_binomial_pmf(j, K, eps);
            acc = log_sum_exp(acc, lt);
            if (lt < acc - kCutoff) break;
        }
        return {acc};
    }
    const auto n = static_cast<std::int64_t>(K);
    for (std::int64_t j = x + 1; j <= n; ++j) {
        const double lt = log_binomial_pmf(j, K, eps);
        acc = log_sum_exp(acc, lt);
        if (lt < acc - kCutoff) break;
    }
    return {std::log1p(-std::exp(acc))};
}

double binomial_cdf(std::int64_t x, std::uint64_t K, double eps) {
    return log_binomial_cdf(x, K, eps).prob();
}

double log_beta(double a, double b) {
    SCENOPT_REQUIRE(a > 0.0 && b > 0.0, DomainError, "beta parameters must be positive");
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double regularized_incomplete_beta(double x, double a, double b) {
    SCENOPT_REQUIRE(a > 0.0 && b > 0.0, DomainError, "beta parameters must be positive");
    SCENOPT_REQUIRE(x >= 0.0 && x <= 1.0, DomainError, "incomplete beta argument must lie in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::exp(log_front) * beta_continued_fraction(x, a, b) / a;
    }
    return 1.0 - std::exp(log_front) * beta_continued_fraction(1.0 - x, b, a) / b;
}

double incomplete_beta(double x, double a, double b) {
    return regularized_incomplete_beta(x, a, b) * std::exp(log_beta(a, b));
}

double inverse_regularized_incomplete_beta(double p, double a, double b) {
    SCENOPT_REQUIRE(p >= 0.0 && p <= 1.0, DomainError, "quantile level must lie in [0,1]");
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (regularized_incomplete_beta(mid, a, b) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

}  // namespace scenopt::prob
