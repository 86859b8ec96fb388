#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace scenopt {

struct ScenarioProgram;

// Sample-size and discard-count planning from support-rank bounds.
namespace bounds {

// fixed: the stage declares its own K; the achieved bound is reported, not enforced.
enum class Method { implicit, chernoff, refined, implicit_discard, explicit_discard, fixed };

// Policy for stages without discarding; stages with R > 0 switch to the
// matching *_discard method.
enum class Policy { implicit, chernoff, refined };

std::string to_string(Method m);
std::string to_string(Policy p);
Policy parse_policy(const std::string& name);

struct StagePlan {
    std::size_t stage = 0;
    std::uint64_t sample_size = 0;  // K_i
    std::uint64_t discard = 0;      // R_i
    double eps = 0.0;
    double theta = 0.0;
    int zeta_bar = 1;
    Method method = Method::implicit;
    double achieved_bound = 0.0;  // confidence bound evaluated at (K_i, R_i)
};

struct SampleSizePlan {
    double theta_total = 0.0;
    std::vector<StagePlan> stages;

    // Throws PreconditionError naming the first violated invariant.
    void check_invariants() const;
};

// theta_i = theta_total * w_i; default weights are uniform.
std::vector<double> split_confidence(double theta_total, std::size_t stages,
                                     const std::optional<std::vector<double>>& weights = std::nullopt);

// Smallest K with Phi(zeta_bar - 1; K, eps) <= theta.
std::uint64_t implicit_sample_size(int zeta_bar, double eps, double theta);

// ceil((2/eps)(ln(1/theta) + zeta_bar - 1))
std::uint64_t chernoff_sample_size(int zeta_bar, double eps, double theta);

// ceil((1/eps)(ln(1/theta) + sqrt(2(zeta_bar-1) ln(1/theta)) + zeta_bar - 1))
std::uint64_t refined_sample_size(int zeta_bar, double eps, double theta);

// C(R + zeta_bar - 1, R) * Phi(R + zeta_bar - 1; K, eps), clamped to 1.
double discard_posterior_confidence(int zeta_bar, std::uint64_t K, std::uint64_t R, double eps);
double log_discard_posterior_confidence(int zeta_bar, std::uint64_t K, std::uint64_t R, double eps);

// Smallest K >= R + zeta_bar with discard_posterior_confidence <= theta.
std::uint64_t implicit_sample_size_with_discarding(int zeta_bar, double eps, double theta, std::uint64_t R);

// ceil((2/eps) ln(1/theta) + (4/eps)(R + zeta_bar - 1))
std::uint64_t explicit_sample_size_with_discarding(int zeta_bar, double eps, double theta, std::uint64_t R);

// floor(eps K - zeta_bar + 1 - sqrt(2 eps K ln((eps K)^(zeta_bar-1) / theta))), clamped to [0, K - zeta_bar].
std::uint64_t max_discardable(int zeta_bar, std::uint64_t K, double eps, double theta);

struct PlanRequest {
    double theta_total = 1e-6;
    Policy policy = Policy::implicit;
    std::vector<std::uint64_t> discard;            // per stage; empty means all zero
    std::optional<std::vector<double>> weights;    // confidence split
};

// Composes split_confidence with the per-stage bounds. Enforces K_i >= zeta_bar_i + 1
// and R_i < K_i - zeta_bar_i.
SampleSizePlan plan_multistage(const ScenarioProgram& program, const PlanRequest& request);

}  // namespace bounds
}  // namespace scenopt
