#include "plmm/solver.hpp"
#include "plmm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace plmm {

namespace {

double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53; // [0, 1)
}

Vec3 ball_sample(std::mt19937_64& rng) {
    for (;;) {
        const double x = 2.0 * unit_double(rng) - 1.0;
        const double y = 2.0 * unit_double(rng) - 1.0;
        const double z = 2.0 * unit_double(rng) - 1.0;
        if (x * x + y * y + z * z <= 1.0) return {x, y, z};
    }
}

bool weakly_dominates(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    return a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1]);
}

} // namespace

Trajectory descent_solver(const Problem& prob, const Vec3& start, const SolveParams& params) {
    const Box3& box = prob.mesh->box();
    if (!box.contains(start, 1e-9))
        raise(ErrorCode::OutOfDomain, "solver start point lies outside the domain");

    double radius = params.initial_radius;
    if (radius <= 0.0) {
        const Vec3 e = box.extent();
        radius = 0.25 * std::min({e.x, e.y, e.z});
    }

    std::mt19937_64 rng(params.seed);

    Trajectory traj;
    Vec3 x = start;
    std::array<double, 2> fx = prob.evaluate(x);
    traj.steps.push_back({x, fx});

    int streak = 0;
    for (int iter = 0; iter < params.max_iters; ++iter) {
        if (radius < params.min_radius || streak >= params.patience) break;
        ++traj.iterations;

        std::vector<Vec3> accepted;
        std::vector<std::array<double, 2>> accepted_f;
        for (int c = 0; c < params.candidates_per_iter; ++c) {
            const Vec3 u = ball_sample(rng);
            const Vec3 cand{x.x + radius * u.x, x.y + radius * u.y, x.z + radius * u.z};
            if (!box.contains(cand, 0.0)) continue;
            const auto fc = prob.evaluate(cand);
            if (weakly_dominates(fc, fx)) {
                accepted.push_back(cand);
                accepted_f.push_back(fc);
            }
        }

        if (accepted.empty()) {
            ++streak;
        } else {
            streak = 0;
            const std::size_t pick = std::min(
                accepted.size() - 1,
                static_cast<std::size_t>(unit_double(rng) * static_cast<double>(accepted.size())));
            x = accepted[pick];
            fx = accepted_f[pick];
            traj.steps.push_back({x, fx});
        }
        radius *= params.shrink;
    }

    traj.terminal_modes = mode_set(prob, x);
    return traj;
}

} // namespace plmm
