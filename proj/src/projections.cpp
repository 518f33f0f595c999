#include "apwl1/projections.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace apwl1 {

namespace {

// Relative slack of the membership test: points within delta * (1 + tol) are
// treated as inside, so boundary points and rounding survivors stay fixed.
constexpr double kMembershipTol = 1e-12;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

Vector project_hyperslab(const Vector& h, const Hyperslab& slab) {
  require(h.size() == slab.x.size(), "project_hyperslab: dimension mismatch");
  require(slab.eps >= 0.0, "project_hyperslab: negative slab width");
  const double xx = slab.x.squaredNorm();
  require(xx > 0.0, "project_hyperslab: zero measurement vector");
  const double r = h.dot(slab.x);
  if (slab.y - slab.eps > r) return h + ((slab.y - slab.eps - r) / xx) * slab.x;
  if (slab.y + slab.eps < r) return h + ((slab.y + slab.eps - r) / xx) * slab.x;
  return h;
}

double distance_to_hyperslab(const Vector& h, const Hyperslab& slab) {
  require(h.size() == slab.x.size(), "distance_to_hyperslab: dimension mismatch");
  require(slab.eps >= 0.0, "distance_to_hyperslab: negative slab width");
  const double nx = slab.x.norm();
  require(nx > 0.0, "distance_to_hyperslab: zero measurement vector");
  return std::max(0.0, std::abs(h.dot(slab.x) - slab.y) - slab.eps) / nx;
}

Vector project_halfspace_nonneg(const Vector& x, const WeightedL1Ball& ball) {
  require(x.size() == ball.w.size(), "project_halfspace_nonneg: dimension mismatch");
  const double excess = std::max(0.0, x.dot(ball.w) - ball.delta);
  if (excess == 0.0) return x;
  return x - (excess / ball.w.squaredNorm()) * ball.w;
}

bool ball_contains(const Vector& h, const WeightedL1Ball& ball, double tol) {
  require(h.size() == ball.w.size(), "ball_contains: dimension mismatch");
  return h.cwiseAbs().dot(ball.w) <= ball.delta + tol;
}

Vector project_weighted_l1_ball(const Vector& h, const WeightedL1Ball& ball) {
  const Eigen::Index dim = h.size();
  require(dim == ball.w.size(), "project_weighted_l1_ball: dimension mismatch");
  require(ball.delta > 0.0, "project_weighted_l1_ball: radius must be positive");

  double weighted_abs = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    require(ball.w[i] > 0.0, "project_weighted_l1_ball: weights must be positive");
    weighted_abs += ball.w[i] * std::abs(h[i]);
  }
  if (weighted_abs <= ball.delta * (1.0 + kMembershipTol)) return h;

  // Work on |h| in the nonnegative hyperoctant; signs are restored at the end.
  std::vector<double> ratio(static_cast<size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) ratio[i] = std::abs(h[i]) / ball.w[i];

  std::vector<Eigen::Index> order(static_cast<size_t>(dim));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&ratio](Eigen::Index a, Eigen::Index b) { return ratio[a] > ratio[b]; });

  // Prefix sums over the sorted domain make every active-set pass O(log L).
  std::vector<double> pre_wa(static_cast<size_t>(dim) + 1, 0.0);
  std::vector<double> pre_w2(static_cast<size_t>(dim) + 1, 0.0);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Eigen::Index i = order[static_cast<size_t>(k)];
    pre_wa[k + 1] = pre_wa[k] + ball.w[i] * std::abs(h[i]);
    pre_w2[k + 1] = pre_w2[k] + ball.w[i] * ball.w[i];
  }

  Eigen::Index active = dim;
  double shift = 0.0;
  while (true) {
    shift = (pre_wa[active] - ball.delta) / pre_w2[active];
    // Ratios are non-ascending, so the indices beating the threshold form a
    // prefix; its length is the sought maximal index.
    const auto begin = order.begin();
    const auto split = std::partition_point(
        begin, begin + active,
        [&ratio, shift](Eigen::Index i) { return ratio[i] > shift; });
    const Eigen::Index keep = split - begin;
    if (keep == 0)
      throw std::logic_error(
          "project_weighted_l1_ball: no qualifying index; ball invariants violated");
    if (keep == active) break;
    active = keep;
  }

  Vector p = Vector::Zero(dim);
  for (Eigen::Index k = 0; k < active; ++k) {
    const Eigen::Index i = order[static_cast<size_t>(k)];
    p[i] = std::copysign(std::abs(h[i]) - shift * ball.w[i], h[i]);
  }
  return p;
}

}  // namespace apwl1
