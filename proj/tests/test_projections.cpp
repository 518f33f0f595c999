#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "apwl1/projections.hpp"
#include "apwl1/rng.hpp"
#include "apwl1/verify.hpp"

using namespace apwl1;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector random_vector(Rng& rng, int dim, double scale = 1.0) {
  return Vector::NullaryExpr(dim, [&](Eigen::Index) { return scale * rng.normal(); });
}

WeightedL1Ball random_ball(Rng& rng, int dim) {
  auto log_uniform = [&rng](double lo, double hi) {
    return lo * std::exp(rng.uniform() * std::log(hi / lo));
  };
  WeightedL1Ball ball;
  ball.w = Vector::NullaryExpr(dim, [&](Eigen::Index) { return log_uniform(0.1, 10.0); });
  ball.delta = log_uniform(0.1, 10.0);
  return ball;
}

Hyperslab random_slab(Rng& rng, int dim) {
  Hyperslab slab;
  slab.x = random_vector(rng, dim);
  while (slab.x.squaredNorm() == 0.0) slab.x = random_vector(rng, dim);
  slab.y = rng.normal();
  slab.eps = std::abs(rng.normal()) * 0.3;
  return slab;
}

// Penalty-based minimizer of ||u - h|| over the slab, used as the
// independent route for the projection formula: minimize along the only
// direction that matters (x) since the projection moves parallel to x.
Vector slab_projection_by_minimization(const Vector& h, const Hyperslab& slab) {
  // One-dimensional golden-section search over t where u = h + t x.
  auto violation = [&](double t) {
    const Vector u = h + t * slab.x;
    const double r = std::abs(u.dot(slab.x) - slab.y) - slab.eps;
    return std::max(r, 0.0);
  };
  auto objective = [&](double t) {
    const Vector u = h + t * slab.x;
    return (u - h).squaredNorm() + 1e8 * violation(t) * violation(t);
  };
  double lo = -10.0, hi = 10.0;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
  for (int it = 0; it < 200; ++it) {
    if (objective(a) < objective(b)) {
      hi = b;
      b = a;
      a = hi - phi * (hi - lo);
    } else {
      lo = a;
      a = b;
      b = lo + phi * (hi - lo);
    }
  }
  return h + 0.5 * (lo + hi) * slab.x;
}

}  // namespace

TEST_CASE("hyperslab projection: worked cases") {
  // Inside the slab: identity (middle branch).
  Hyperslab inside{vec2(1, 0), 0.5, 0.1};
  CHECK((project_hyperslab(vec2(0.5, 0.5), inside) - vec2(0.5, 0.5)).norm() == 0.0);

  // Above the slab (third branch), checked against a constrained minimizer.
  Hyperslab above{vec2(1, 0), 1.0, 0.1};
  const Vector p = project_hyperslab(vec2(2, 0), above);
  CHECK(p.isApprox(vec2(1.1, 0.0), 1e-12));
  CHECK((p - slab_projection_by_minimization(vec2(2, 0), above)).norm() < 1e-6);

  // Below the slab (first branch).
  Hyperslab below{vec2(0, 1), 2.0, 0.5};
  const Vector q = project_hyperslab(vec2(0, 0), below);
  CHECK(q.isApprox(vec2(0.0, 1.5), 1e-12));
  CHECK((q - slab_projection_by_minimization(vec2(0, 0), below)).norm() < 1e-6);
}

TEST_CASE("hyperslab projection: errors") {
  Hyperslab slab{vec2(1, 0), 1.0, 0.1};
  Vector h3(3);
  h3 << 1, 2, 3;
  CHECK_THROWS_AS(project_hyperslab(h3, slab), std::invalid_argument);
  Hyperslab degenerate{vec2(0, 0), 1.0, 0.1};
  CHECK_THROWS_AS(project_hyperslab(vec2(1, 1), degenerate), std::invalid_argument);
  CHECK_THROWS_AS(distance_to_hyperslab(vec2(1, 1), degenerate), std::invalid_argument);
}

TEST_CASE("hyperslab distance") {
  Hyperslab slab{vec2(1, 0), 1.0, 0.1};
  CHECK(distance_to_hyperslab(vec2(1.05, 3.0), slab) == 0.0);
  CHECK(distance_to_hyperslab(vec2(2, 0), slab) == doctest::Approx(0.9).epsilon(1e-12));

  // Scaling x and y together changes the residual but not the geometry.
  Rng rng(11);
  for (int c = 0; c < 50; ++c) {
    Hyperslab s = random_slab(rng, 4);
    const Vector h = random_vector(rng, 4);
    Hyperslab scaled{2.0 * s.x, 2.0 * s.y, 2.0 * s.eps};
    CHECK(distance_to_hyperslab(h, s) ==
          doctest::Approx(distance_to_hyperslab(h, scaled)).epsilon(1e-10));
    const double by_projection = (h - project_hyperslab(h, s)).norm();
    CHECK(distance_to_hyperslab(h, s) == doctest::Approx(by_projection).epsilon(1e-12));
  }
}

TEST_CASE("halfspace projection on the nonnegative hyperoctant") {
  WeightedL1Ball ball{vec2(1, 1), 1.0};
  CHECK((project_halfspace_nonneg(vec2(0.2, 0.2), ball) - vec2(0.2, 0.2)).norm() == 0.0);
  CHECK(project_halfspace_nonneg(vec2(1, 1), ball).isApprox(vec2(0.5, 0.5), 1e-14));
  // A negative component signals the dimension-dropping path downstream.
  CHECK(project_halfspace_nonneg(vec2(2, 0.5), ball).isApprox(vec2(1.25, -0.25), 1e-14));
}

TEST_CASE("weighted l1 ball projection: worked cases against the oracle") {
  WeightedL1Ball unit{vec2(1, 1), 1.0};
  CHECK((project_weighted_l1_ball(vec2(0.3, -0.2), unit) - vec2(0.3, -0.2)).norm() == 0.0);

  // Two-pass case: the first halfspace step goes negative in one coordinate.
  const Vector p1 = project_weighted_l1_ball(vec2(2, 0.5), unit);
  CHECK(p1.isApprox(vec2(1.0, 0.0), 1e-12));
  CHECK((p1 - verify::oracle_project_weighted_l1(vec2(2, 0.5), unit)).norm() < 1e-12);

  // Single pass with distinct weights: t = (9-2)/5 = 1.4.
  WeightedL1Ball ball{vec2(1, 2), 2.0};
  const Vector p2 = project_weighted_l1_ball(vec2(3, 3), ball);
  CHECK(p2.isApprox(vec2(1.6, 0.2), 1e-12));
  CHECK((p2 - verify::oracle_project_weighted_l1(vec2(3, 3), ball)).norm() < 1e-12);

  // Sign symmetry.
  const Vector p3 = project_weighted_l1_ball(vec2(-3, 3), ball);
  CHECK(p3.isApprox(vec2(-1.6, 0.2), 1e-12));
}

TEST_CASE("weighted l1 ball projection: edge cases and errors") {
  WeightedL1Ball ball{vec2(1, 2), 2.0};

  // Exactly on the boundary: treated as inside, returned unchanged.
  const Vector boundary = vec2(2, 0);
  CHECK((project_weighted_l1_ball(boundary, ball) - boundary).norm() == 0.0);

  // All-zero input short-circuits (origin is interior).
  CHECK(project_weighted_l1_ball(Vector::Zero(2), ball).norm() == 0.0);

  WeightedL1Ball bad_delta{vec2(1, 1), 0.0};
  CHECK_THROWS_AS(project_weighted_l1_ball(vec2(1, 1), bad_delta), std::invalid_argument);
  WeightedL1Ball bad_w{vec2(1, -1), 1.0};
  CHECK_THROWS_AS(project_weighted_l1_ball(vec2(1, 1), bad_w), std::invalid_argument);
  CHECK_THROWS_AS(project_weighted_l1_ball(Vector::Ones(3), ball), std::invalid_argument);
}

TEST_CASE("ball_contains") {
  WeightedL1Ball ball{vec2(1, 1), 1.0};
  CHECK(ball_contains(Vector::Zero(2), ball));
  CHECK_FALSE(ball_contains(vec2(2, 0.5), ball));

  Rng rng(7);
  for (int c = 0; c < 200; ++c) {
    const int dim = static_cast<int>(rng.uniform_int(1, 8));
    const WeightedL1Ball b = random_ball(rng, dim);
    const Vector p = project_weighted_l1_ball(random_vector(rng, dim, 2.0), b);
    CHECK(ball_contains(p, b, 1e-9));
  }
}

TEST_CASE("projection properties: feasibility, idempotency, hyperoctant") {
  Rng rng(2024);
  for (int c = 0; c < 1000; ++c) {
    const int dim = static_cast<int>(rng.uniform_int(1, 10));
    const WeightedL1Ball ball = random_ball(rng, dim);
    const Vector h = random_vector(rng, dim, 2.0);
    const Vector p = project_weighted_l1_ball(h, ball);

    CHECK(p.cwiseAbs().dot(ball.w) <= ball.delta * (1.0 + 1e-12));
    CHECK((project_weighted_l1_ball(p, ball) - p).norm() <= 1e-12);
    for (int i = 0; i < dim; ++i) {
      if (p[i] > 0.0) CHECK(h[i] > 0.0);
      if (p[i] < 0.0) CHECK(h[i] < 0.0);
    }

    const Hyperslab slab = random_slab(rng, dim);
    const Vector s = project_hyperslab(h, slab);
    CHECK(std::abs(s.dot(slab.x) - slab.y) <= slab.eps + 1e-9);
    CHECK((project_hyperslab(s, slab) - s).norm() <= 1e-12);
  }
}

TEST_CASE("projection properties: firm nonexpansivity and nonexpansivity") {
  Rng rng(515);
  for (int c = 0; c < 1000; ++c) {
    const int dim = static_cast<int>(rng.uniform_int(1, 10));
    const WeightedL1Ball ball = random_ball(rng, dim);
    const Hyperslab slab = random_slab(rng, dim);
    const Vector h = random_vector(rng, dim, 2.0);
    const Vector g = random_vector(rng, dim, 2.0);

    // f inside the set: projections land in the set by feasibility.
    const Vector f_ball = project_weighted_l1_ball(random_vector(rng, dim, 2.0), ball);
    const Vector f_slab = project_hyperslab(random_vector(rng, dim, 2.0), slab);

    const Vector pb = project_weighted_l1_ball(h, ball);
    CHECK((h - pb).squaredNorm() <=
          (h - f_ball).squaredNorm() - (pb - f_ball).squaredNorm() + 1e-9);
    const Vector ps = project_hyperslab(h, slab);
    CHECK((h - ps).squaredNorm() <=
          (h - f_slab).squaredNorm() - (ps - f_slab).squaredNorm() + 1e-9);

    CHECK((pb - project_weighted_l1_ball(g, ball)).norm() <= (h - g).norm() + 1e-12);
    CHECK((ps - project_hyperslab(g, slab)).norm() <= (h - g).norm() + 1e-12);
  }
}

TEST_CASE("tie invariance: permuting equal-ratio coordinates") {
  Rng rng(99);
  for (int c = 0; c < 200; ++c) {
    // Build an instance where several coordinates share the same |h|/w ratio.
    const int dim = 6;
    WeightedL1Ball ball = random_ball(rng, dim);
    Vector h(dim);
    const double ratio = 1.0 + rng.uniform();
    for (int i = 0; i < dim; ++i)
      h[i] = (i % 2 == 0 ? ratio * ball.w[i] : rng.normal());

    const Vector p = project_weighted_l1_ball(h, ball);

    // Swap two tied coordinates (0 and 2), project, swap back.
    Vector h_swapped = h;
    WeightedL1Ball ball_swapped = ball;
    std::swap(h_swapped[0], h_swapped[2]);
    std::swap(ball_swapped.w[0], ball_swapped.w[2]);
    Vector q = project_weighted_l1_ball(h_swapped, ball_swapped);
    std::swap(q[0], q[2]);
    CHECK((p - q).norm() <= 1e-9);
  }
}

TEST_CASE("sorted-prefix structure: zeroed coordinates form a ratio suffix") {
  Rng rng(321);
  for (int c = 0; c < 500; ++c) {
    const int dim = static_cast<int>(rng.uniform_int(2, 10));
    const WeightedL1Ball ball = random_ball(rng, dim);
    const Vector h = random_vector(rng, dim, 2.0);
    const Vector p = project_weighted_l1_ball(h, ball);

    double min_kept = std::numeric_limits<double>::infinity();
    double max_dropped = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim; ++i) {
      const double ratio = std::abs(h[i]) / ball.w[i];
      if (p[i] != 0.0)
        min_kept = std::min(min_kept, ratio);
      else
        max_dropped = std::max(max_dropped, ratio);
    }
    if (std::isfinite(min_kept) && std::isfinite(max_dropped))
      CHECK(min_kept >= max_dropped);
  }
}
