#include "scenopt/bounds.hpp"

#include "scenopt/errors.hpp"
#include "scenopt/probkernel.hpp"
#include "scenopt/program.hpp"

#include <cmath>
#include <numeric>

namespace scenopt::bounds {

namespace {

// Relative guard applied before rounding explicit formulas so that values
// that are integers in exact arithmetic do not round up by one.
constexpr double kRoundingGuard = 1e-9;

std::uint64_t guarded_ceil(double v) {
    const double r = std::ceil(v - kRoundingGuard * std::fabs(v));
    return r <= 0.0 ? 0 : static_cast<std::uint64_t>(r);
}

double guarded_floor(double v) {
    return std::floor(v + kRoundingGuard * std::fabs(v));
}

void check_domains(int zeta_bar, double eps, double theta) {
    SCENOPT_REQUIRE(zeta_bar >= 1, DomainError, "support rank bound must be >= 1");
    SCENOPT_REQUIRE(eps > 0.0 && eps < 1.0, DomainError, "eps must lie in (0,1)");
    SCENOPT_REQUIRE(theta > 0.0 && theta < 1.0, DomainError, "theta must lie in (0,1)");
}

// Smallest K >= lo with pred(K); pred must be monotone (false...false true...true).
template <typename Pred>
std::uint64_t smallest_satisfying(std::uint64_t lo, Pred pred) {
    if (pred(lo)) return lo;
    std::uint64_t bad = lo;
    std::uint64_t good = lo < 1 ? 1 : 2 * lo;
    while (!pred(good)) {
        bad = good;
        SCENOPT_REQUIRE(good < (std::uint64_t{1} << 52), NumericalError, "sample size bracket overflow");
        good *= 2;
    }
    while (good - bad > 1) {
        const std::uint64_t mid = bad + (good - bad) / 2;
        if (pred(mid)) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    return good;
}

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::implicit: return "implicit";
        case Method::chernoff: return "chernoff";
        case Method::refined: return "refined";
        case Method::implicit_discard: return "implicit-discard";
        case Method::explicit_discard: return "explicit-discard";
        case Method::fixed: return "fixed";
    }
    return "unknown";
}

std::string to_string(Policy p) {
    switch (p) {
        case Policy::implicit: return "implicit";
        case Policy::chernoff: return "chernoff";
        case Policy::refined: return "refined";
    }
    return "unknown";
}

Policy parse_policy(const std::string& name) {
    if (name == "implicit") return Policy::implicit;
    if (name == "chernoff") return Policy::chernoff;
    if (name == "refined") return Policy::refined;
    throw DomainError("unknown sample-size policy '" + name + "'");
}

void SampleSizePlan::check_invariants() const {
    double sum = 0.0;
    for (const auto& s : stages) {
        SCENOPT_REQUIRE(s.sample_size >= static_cast<std::uint64_t>(s.zeta_bar) + 1, PreconditionError,
                        "plan stage " + std::to_string(s.stage) + ": K < zeta_bar + 1");
        SCENOPT_REQUIRE(s.discard + s.zeta_bar < s.sample_size, PreconditionError,
                        "plan stage " + std::to_string(s.stage) + ": R >= K - zeta_bar");
        sum += s.theta;
    }
    SCENOPT_REQUIRE(sum <= theta_total * (1.0 + 1e-12), PreconditionError, "stage confidences exceed theta_total");
}

std::vector<double> split_confidence(double theta_total, std::size_t stages,
                                     const std::optional<std::vector<double>>& weights) {
    SCENOPT_REQUIRE(theta_total > 0.0 && theta_total < 1.0, DomainError, "theta_total must lie in (0,1)");
    SCENOPT_REQUIRE(stages >= 1, DomainError, "at least one stage required");
    std::vector<double> out(stages);
    if (!weights) {
        for (auto& t : out) t = theta_total / static_cast<double>(stages);
        return out;
    }
    SCENOPT_REQUIRE(weights->size() == stages, DomainError, "one weight per stage required");
    double sum = 0.0;
    for (double w : *weights) {
        SCENOPT_REQUIRE(w > 0.0, DomainError, "confidence weights must be positive");
        sum += w;
    }
    SCENOPT_REQUIRE(std::fabs(sum - 1.0) <= 1e-12, DomainError, "confidence weights must sum to 1");
    for (std::size_t i = 0; i < stages; ++i) out[i] = theta_total * (*weights)[i];
    return out;
}

std::uint64_t implicit_sample_size(int zeta_bar, double eps, double theta) {
    check_domains(zeta_bar, eps, theta);
    const double log_theta = std::log(theta);
    // Phi(zeta_bar - 1; K, eps) = 1 for K < zeta_bar, so the search starts there.
    return smallest_satisfying(static_cast<std::uint64_t>(zeta_bar), [&](std::uint64_t K) {
        return prob::log_binomial_cdf(zeta_bar - 1, K, eps).value <= log_theta;
    });
}

std::uint64_t chernoff_sample_size(int zeta_bar, double eps, double theta) {
    check_domains(zeta_bar, eps, theta);
    return guarded_ceil((2.0 / eps) * (std::log(1.0 / theta) + zeta_bar - 1));
}

std::uint64_t refined_sample_size(int zeta_bar, double eps, double theta) {
    check_domains(zeta_bar, eps, theta);
    const double l = std::log(1.0 / theta);
    return guarded_ceil((1.0 / eps) * (l + std::sqrt(2.0 * (zeta_bar - 1) * l) + zeta_bar - 1));
}

double log_discard_posterior_confidence(int zeta_bar, std::uint64_t K, std::uint64_t R, double eps) {
    SCENOPT_REQUIRE(zeta_bar >= 1, DomainError, "support rank bound must be >= 1");
    SCENOPT_REQUIRE(K >= R + static_cast<std::uint64_t>(zeta_bar), PreconditionError,
                    "discard bound requires K >= R + zeta_bar");
    const std::uint64_t top = R + static_cast<std::uint64_t>(zeta_bar) - 1;
    const double v = prob::log_binomial_coefficient(top, R)
                     + prob::log_binomial_cdf(static_cast<std::int64_t>(top), K, eps).value;
    return std::min(v, 0.0);
}

double discard_posterior_confidence(int zeta_bar, std::uint64_t K, std::uint64_t R, double eps) {
    return std::exp(log_discard_posterior_confidence(zeta_bar, K, R, eps));
}

std::uint64_t implicit_sample_size_with_discarding(int zeta_bar, double eps, double theta, std::uint64_t R) {
    check_domains(zeta_bar, eps, theta);
    const double log_theta = std::log(theta);
    return smallest_satisfying(R + static_cast<std::uint64_t>(zeta_bar), [&](std::uint64_t K) {
        return log_discard_posterior_confidence(zeta_bar, K, R, eps) <= log_theta;
    });
}

std::uint64_t explicit_sample_size_with_discarding(int zeta_bar, double eps, double theta, std::uint64_t R) {
    check_domains(zeta_bar, eps, theta);
    return guarded_ceil((2.0 / eps) * std::log(1.0 / theta)
                        + (4.0 / eps) * (static_cast<double>(R) + zeta_bar - 1));
}

std::uint64_t max_discardable(int zeta_bar, std::uint64_t K, double eps, double theta) {
    check_domains(zeta_bar, eps, theta);
    if (K <= static_cast<std::uint64_t>(zeta_bar)) return 0;
    const double ek = eps * static_cast<double>(K);
    const double log_arg = (zeta_bar - 1) * std::log(ek) - std::log(theta);
    const double v = ek - zeta_bar + 1 - std::sqrt(2.0 * ek * std::max(log_arg, 0.0));
    const double r = guarded_floor(v);
    if (r <= 0.0) return 0;
    return std::min(static_cast<std::uint64_t>(r), K - static_cast<std::uint64_t>(zeta_bar));
}

SampleSizePlan plan_multistage(const ScenarioProgram& program, const PlanRequest& request) {
    const std::size_t n = program.stages.size();
    SCENOPT_REQUIRE(n >= 1, PreconditionError, "program has no stages to plan");
    SCENOPT_REQUIRE(request.discard.empty() || request.discard.size() == n, DomainError,
                    "one discard count per stage required");
    const auto thetas = split_confidence(request.theta_total, n, request.weights);

    SampleSizePlan plan;
    plan.theta_total = request.theta_total;
    for (std::size_t i = 0; i < n; ++i) {
        const StageSpec& st = program.stages[i];
        StagePlan sp;
        sp.stage = i;
        sp.eps = st.eps;
        sp.theta = thetas[i];
        sp.zeta_bar = resolved_zeta_bar(st, program.dimension);
        sp.discard = request.discard.empty() ? 0 : request.discard[i];
        if (st.sample_size) {
            sp.sample_size = *st.sample_size;
            sp.method = Method::fixed;
        } else if (sp.discard == 0) {
            switch (request.policy) {
                case Policy::implicit:
                    sp.sample_size = implicit_sample_size(sp.zeta_bar, sp.eps, sp.theta);
                    sp.method = Method::implicit;
                    break;
                case Policy::chernoff:
                    sp.sample_size = chernoff_sample_size(sp.zeta_bar, sp.eps, sp.theta);
                    sp.method = Method::chernoff;
                    break;
                case Policy::refined:
                    sp.sample_size = refined_sample_size(sp.zeta_bar, sp.eps, sp.theta);
                    sp.method = Method::refined;
                    break;
            }
        } else if (request.policy == Policy::implicit) {
            sp.sample_size = implicit_sample_size_with_discarding(sp.zeta_bar, sp.eps, sp.theta, sp.discard);
            sp.method = Method::implicit_discard;
        } else {
            sp.sample_size = explicit_sample_size_with_discarding(sp.zeta_bar, sp.eps, sp.theta, sp.discard);
            sp.method = Method::explicit_discard;
        }
        // The bound is non-increasing in K, so raising K to the structural
        // minimum keeps the confidence guarantee.
        if (sp.method != Method::fixed) {
            const std::uint64_t floor_k = sp.discard + static_cast<std::uint64_t>(sp.zeta_bar) + 1;
            sp.sample_size = std::max(sp.sample_size, floor_k);
        }
        sp.achieved_bound = discard_posterior_confidence(sp.zeta_bar, sp.sample_size, sp.discard, sp.eps);
        plan.stages.push_back(sp);
    }
    plan.check_invariants();
    return plan;
}

}  // namespace scenopt::bounds
