#pragma once

#include "apwl1/types.hpp"

namespace apwl1 {

// Exact metric projections onto the two convex-set families used by the
// filter. All operations are pure functions of their inputs; they may be
// called concurrently from any number of threads.

/// Metric projection of h onto a hyperslab. Throws std::invalid_argument on a
/// dimension mismatch or a zero measurement vector (degenerate measurement).
Vector project_hyperslab(const Vector& h, const Hyperslab& slab);

/// Euclidean distance from h to the slab: max{0, |h.x - y| - eps} / ||x||.
double distance_to_hyperslab(const Vector& h, const Hyperslab& slab);

/// Projection of a nonnegative vector onto the halfspace {u : w.u <= delta}:
/// x - (max{0, x.w - delta} / ||w||^2) w. The result may contain negative
/// components; callers drop those dimensions and re-project.
Vector project_halfspace_nonneg(const Vector& x, const WeightedL1Ball& ball);

/// Exact metric projection of h onto the weighted l1 ball. Sorts the
/// magnitude/weight ratios once and shrinks the active set over prefix sums,
/// so the total cost is O(L log L). Points already in the ball (boundary
/// included) are returned unchanged.
Vector project_weighted_l1_ball(const Vector& h, const WeightedL1Ball& ball);

/// true iff sum_i w_i |h_i| <= delta + tol.
bool ball_contains(const Vector& h, const WeightedL1Ball& ball, double tol = 0.0);

}  // namespace apwl1
