#pragma once

// Shared fixtures for the test suite.  The "ci" grid is a coarsened version
// of the production grid: same structure, ~4x fewer nodes per axis, so a
// full backward solve stays well under a second.

#include <bandit/grid.hpp>
#include <bandit/model.hpp>
#include <bandit/pde.hpp>

#include <random>

namespace testsupport {

inline bandit::PriorSpec canonical_prior() {
    return bandit::PriorSpec{{{1.65, 0.38}, {-2.52, 0.62}}};
}

inline bandit::GridSpec ci_grid() {
    return bandit::make_symmetric_grid(1.0 / 2000.0, 0.025, 6.0);
}

inline bandit::GridSpec fine_grid() {
    return bandit::make_symmetric_grid(1.0 / 5000.0, 0.0143, 6.0);
}

// One backward solve on the ci grid, cached: several test cases reuse the
// same field and thresholds.
inline const bandit::RiskField& ci_field() {
    static const bandit::RiskField field = [] {
        bandit::ModelParams params;
        params.D = 1.0;
        auto prior = canonical_prior();
        params.c = params.bound_c(prior);
        return bandit::solve_limit_risk(prior, params, ci_grid());
    }();
    return field;
}

inline bandit::ThresholdStrategy ci_strategy() {
    auto s = bandit::extract_thresholds(ci_field());
    s.validate();
    return s;
}

inline std::mt19937& test_rng() {
    static std::mt19937 rng(20240613u);
    return rng;
}

} // namespace testsupport
