#pragma once

#include "plmm/modes.hpp"

#include <cstdint>

namespace plmm {

struct SolveParams {
    int candidates_per_iter = 16;
    double initial_radius = 0.0; ///< 0 means 0.25 * smallest domain extent
    double shrink = 0.92;        ///< radius factor per iteration
    int patience = 20;           ///< consecutive non-improving iterations before stopping
    int max_iters = 500;
    double min_radius = 1e-7;
    std::uint64_t seed = 0;
};

struct TrajectoryStep {
    Vec3 position{};
    std::array<double, 2> objectives{};
};

struct Trajectory {
    std::vector<TrajectoryStep> steps; ///< accepted points, starting point first
    ModeSet terminal_modes;
    int iterations = 0;
};

/// Stochastic multi-start-friendly local descent: per iteration, sample
/// candidates uniformly from a ball around the current point (radius shrinks
/// every iteration), keep those that weakly dominate the current objectives,
/// and move to one of them uniformly at random. Deterministic for a fixed
/// seed on any platform: mt19937_64 with an explicit 53-bit double mapping,
/// never the standard library distributions.
Trajectory descent_solver(const Problem& prob, const Vec3& start, const SolveParams& params = {});

} // namespace plmm
