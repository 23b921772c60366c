#pragma once

#include <stdexcept>
#include <vector>

namespace apprentice {

struct MinNormResult {
    std::vector<double> point;    // x = sum_j weights[j] * points[j]
    std::vector<double> weights;  // convex coefficients over the input points
    double gap = 0.0;             // ||x||^2 - min_j x.p_j at exit
    int iterations = 0;
};

/// Thrown when the iteration cap expires; carries the best iterate found.
struct MinNormError : std::runtime_error {
    MinNormError(std::vector<double> best_point, double best_gap)
        : std::runtime_error("min_norm_point: iteration cap reached (gap " +
                             std::to_string(best_gap) + ")"),
          point(std::move(best_point)),
          gap(best_gap) {}
    std::vector<double> point;
    double gap;
};

/**
 * Minimum-norm point of conv{points} by Frank-Wolfe with away steps and exact
 * line search, stopping at duality gap ||x||^2 - min_j x.p_j <= tol^2.  When
 * the active set is small, the iterate is periodically snapped to the exact
 * affine minimizer over the active points (kept only if its coefficients stay
 * convex), which finishes polytope faces in one step.  Ties in vertex
 * selection break to the lowest index, so results are deterministic.
 */
MinNormResult min_norm_point(const std::vector<std::vector<double>>& points, double tol,
                             int max_iterations = 200000);

struct MarginSolution {
    std::vector<double> w;        // maximizing direction, ||w||_2 = 1 (or all zero)
    double t = 0.0;               // achieved margin min_j w.d_j
    std::vector<double> weights;  // convex coefficients of the min-norm point
};

/**
 * Approximate max-margin direction over difference vectors: runs
 * min_norm_point(deltas, tol = epsilon/2); if the resulting norm exceeds tol,
 * returns w = x/||x|| with margin t = min_j w.d_j (within epsilon/2 of the
 * optimum); otherwise the hull is within tol of the origin and the solution
 * degenerates to w = 0, t = 0, the termination signal.
 */
MarginSolution solve_max_margin(const std::vector<std::vector<double>>& deltas, double epsilon);

}  // namespace apprentice
