#pragma once

#include "scenopt/program.hpp"

#include <vector>

namespace testing {

using scenopt::Vector;

// min x s.t. x >= delta, delta ~ U[0,1], x in [lo, hi].
inline scenopt::ScenarioProgram lower_bound_family(double eps = 0.1, double lo = -1.0, double hi = 2.0) {
    scenopt::ScenarioProgram p;
    p.dimension = 1;
    p.cost = {1.0};
    p.box = {{lo}, {hi}};
    scenopt::StageSpec st;
    st.generator = scenopt::LinearGenerator{{scenopt::AffineRow{{-1.0}, {}, 0.0, {-1.0}}}};
    st.eps = eps;
    st.zeta_bar = 1;
    st.sampler = scenopt::Sampler{{scenopt::ComponentDist{scenopt::DistKind::uniform, 0.0, 1.0, {}}}};
    p.stages.push_back(std::move(st));
    return p;
}

// Stage rows a(delta)^T x <= b(delta) with a = delta[0..d-1], b = delta[d].
inline scenopt::StageSpec full_row_stage(std::size_t d, double eps = 0.1) {
    scenopt::AffineRow row;
    row.a0.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        Vector e(d, 0.0);
        e[j] = 1.0;
        row.a_delta.push_back(e);
    }
    row.b_delta.assign(d + 1, 0.0);
    row.b_delta[d] = 1.0;
    scenopt::StageSpec st;
    st.generator = scenopt::LinearGenerator{{row}};
    st.eps = eps;
    return st;
}

// Multisample with the given outcomes and distinct, increasing tie-breaks.
inline scenopt::MultiSample make_samples(std::vector<std::vector<Vector>> outcomes) {
    scenopt::MultiSample ms;
    ms.outcomes = std::move(outcomes);
    double t = 0.01;
    for (const auto& stage : ms.outcomes) {
        std::vector<double> ties;
        for (std::size_t k = 0; k < stage.size(); ++k) {
            ties.push_back(t);
            t += 0.01;
        }
        ms.tie_breaks.push_back(std::move(ties));
    }
    ms.domain_tie_break = 0.999;
    return ms;
}

inline scenopt::MultiSample scalar_samples(const std::vector<double>& values) {
    std::vector<Vector> stage;
    for (double v : values) stage.push_back({v});
    return make_samples({stage});
}

}  // namespace testing
