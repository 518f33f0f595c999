#include <doctest.h>

#include <cmath>
#include <vector>

#include "apwl1/datagen.hpp"
#include "apwl1/filter.hpp"
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

FilterConfig small_config() {
  FilterConfig cfg;
  cfg.dim = 2;
  cfg.window = 1;
  cfg.slab_eps = 0.1;
  cfg.radius = 10.0;
  cfg.weighting = BallWeighting::unweighted;
  return cfg;
}

}  // namespace

TEST_CASE("init: weights and state layout") {
  FilterConfig cfg;
  cfg.dim = 3;
  cfg.radius = 1.0;
  cfg.eps_prime_base = 0.1;  // eps'_0 = 0.1 + 1/1 = 1.1
  cfg.weighting = BallWeighting::weighted;
  const FilterState st = init(cfg, Vector::Zero(3));
  CHECK(st.n == 0);
  CHECK(st.window.empty());
  CHECK(st.eps_prime == doctest::Approx(1.1).epsilon(1e-15));
  for (int i = 0; i < 3; ++i)
    CHECK(st.ball_weights[i] == doctest::Approx(1.0 / 1.1).epsilon(1e-15));

  cfg.weighting = BallWeighting::unweighted;
  const FilterState st2 = init(cfg, Vector::Zero(3));
  CHECK((st2.ball_weights - Vector::Ones(3)).norm() == 0.0);

  FilterConfig bad = cfg;
  bad.step_fraction = 2.0;
  CHECK_THROWS_AS(init(bad, Vector::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(init(cfg, Vector::Zero(2)), std::invalid_argument);
}

TEST_CASE("init then step reproduces the single-slab recursion") {
  FilterConfig cfg = small_config();
  cfg.radius = 0.8;
  cfg.step_fraction = 0.5;
  Filter filter(cfg);

  Rng rng(5);
  Vector manual = Vector::Zero(2);
  const WeightedL1Ball ball{Vector::Ones(2), cfg.radius};
  for (int k = 0; k < 30; ++k) {
    Vector x = vec2(rng.normal(), rng.normal());
    if (x.squaredNorm() == 0.0) continue;
    const double y = rng.normal();
    filter.step(x, y);
    // q = 1: M_n = 1, so the update is a relaxed slab projection + ball.
    const Vector proj = project_hyperslab(manual, Hyperslab{x, y, cfg.slab_eps});
    manual = project_weighted_l1_ball(manual + 0.5 * (proj - manual), ball);
    CHECK((filter.estimate() - manual).norm() <= 1e-14);
  }
}

TEST_CASE("extrapolation bound") {
  const Vector h = Vector::Zero(2);
  // Single projection: numerator equals denominator.
  CHECK(compute_extrapolation_bound(vec2(1, 1), {vec2(3, 1)}, {1.0}) ==
        doctest::Approx(1.0).epsilon(1e-15));
  // All projections equal h: the "otherwise" branch.
  CHECK(compute_extrapolation_bound(h, {h, h}, {0.5, 0.5}) == 1.0);
  // Orthogonal pulls double the bound.
  CHECK(compute_extrapolation_bound(h, {vec2(1, 0), vec2(0, 1)}, {0.5, 0.5}) ==
        doctest::Approx(2.0).epsilon(1e-14));

  CHECK_THROWS_AS(compute_extrapolation_bound(h, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(compute_extrapolation_bound(h, {vec2(1, 0)}, {0.9}),
                  std::invalid_argument);

  // Convexity keeps the bound at or above 1 on random instances.
  Rng rng(77);
  for (int c = 0; c < 500; ++c) {
    const int m = static_cast<int>(rng.uniform_int(1, 6));
    std::vector<Vector> projections;
    std::vector<double> omegas(m, 1.0 / m);
    for (int j = 0; j < m; ++j)
      projections.push_back(vec2(rng.normal(), rng.normal()));
    const double bound = compute_extrapolation_bound(vec2(rng.normal(), rng.normal()),
                                                     projections, omegas);
    CHECK(bound >= 1.0 - 1e-9);
  }
}

TEST_CASE("ball weight update") {
  CHECK((update_ball_weights(Vector::Zero(4), 0.1) - Vector::Constant(4, 10.0)).norm() ==
        0.0);
  Vector h(1);
  h << 1.0;
  CHECK(update_ball_weights(h, 0.1)[0] == doctest::Approx(1.0 / 1.1).epsilon(1e-15));
  CHECK_THROWS_AS(update_ball_weights(h, 0.0), std::invalid_argument);

  // Monotone: larger |h_i| never gets a larger weight.
  Rng rng(3);
  Vector g = Vector::NullaryExpr(16, [&](Eigen::Index) { return rng.normal(); });
  const Vector w = update_ball_weights(g, 0.05);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      if (std::abs(g[i]) >= std::abs(g[j])) CHECK(w[i] <= w[j]);
}

TEST_CASE("eps' schedule") {
  CHECK(eps_prime_schedule(0, 0.01, EpsPrimeMode::decaying) ==
        doctest::Approx(1.01).epsilon(1e-15));
  CHECK(eps_prime_schedule(1000000, 0.01, EpsPrimeMode::decaying) ==
        doctest::Approx(0.01).epsilon(1e-4));
  CHECK(eps_prime_schedule(500, 0.01, EpsPrimeMode::decaying_with_reset, 500) ==
        doctest::Approx(1.01).epsilon(1e-15));
  CHECK(eps_prime_schedule(510, 0.01, EpsPrimeMode::decaying_with_reset, 500) ==
        doctest::Approx(0.01 + 1.0 / 11.0).epsilon(1e-15));
}

TEST_CASE("change detector") {
  ChangeDetectorParams params;  // ratio 5, window 50
  std::vector<double> constant(60, 0.2);
  CHECK_FALSE(detect_change(constant, params));

  std::vector<double> spike = constant;
  spike.push_back(2.0);  // 10x the median
  CHECK(detect_change(spike, params));
  CHECK_FALSE(detect_change(spike, params, 10));   // cooldown
  CHECK_FALSE(detect_change(spike, params, 50));   // still cooling down
  CHECK(detect_change(spike, params, 51));

  std::vector<double> short_history(20, 0.2);
  short_history.push_back(5.0);
  CHECK_FALSE(detect_change(short_history, params));  // warmup
}

TEST_CASE("step: identity on consistent feasible data") {
  FilterConfig cfg = small_config();
  cfg.window = 3;
  cfg.radius = 2.0;
  Vector h = vec2(0.5, -0.25);
  FilterState st = init(cfg, h);
  Rng rng(31);
  for (int k = 0; k < 10; ++k) {
    Vector x = vec2(rng.normal(), rng.normal());
    const double y = x.dot(h);  // h sits mid-slab and inside the ball
    st = step(cfg, st, x, y);
    CHECK((st.h - h).norm() == 0.0);
  }
  CHECK(st.min_extrapolation == 1.0);
}

TEST_CASE("step: rejected slabs leave the state unchanged") {
  FilterConfig cfg = small_config();
  FilterState st = init(cfg, vec2(0.1, 0.2));
  st = step(cfg, st, vec2(1, 0), 1.0);
  const FilterState before = st;

  CHECK_THROWS_AS(step(cfg, st, vec2(0, 0), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(step(cfg, st, Vector::Ones(3), 1.0), std::invalid_argument);
  Vector bad = vec2(1, std::nan(""));
  CHECK_THROWS_AS(step(cfg, st, bad, 1.0), std::invalid_argument);

  CHECK(st.n == before.n);
  CHECK((st.h - before.h).norm() == 0.0);
  CHECK(st.window.size() == before.window.size());

  Filter filter(cfg);
  filter.step(vec2(1, 0), 1.0);
  CHECK_THROWS_AS(filter.step(vec2(0, 0), 1.0), std::invalid_argument);
  CHECK(filter.state().n == 1);
  CHECK(filter.state().window.size() == 1);
}

TEST_CASE("step: window holds exactly the last min(n, q) slabs") {
  FilterConfig cfg = small_config();
  cfg.window = 3;
  FilterState st = init(cfg, Vector::Zero(2));
  for (int k = 1; k <= 6; ++k) {
    st = step(cfg, st, vec2(1.0, static_cast<double>(k)), static_cast<double>(k));
    CHECK(static_cast<int>(st.window.size()) == std::min(k, 3));
    CHECK(st.window.back().y == static_cast<double>(k));
    CHECK(st.window.front().y == static_cast<double>(std::max(1, k - 2)));
  }
}

TEST_CASE("step: output is always ball-feasible") {
  FilterConfig cfg;
  cfg.dim = 8;
  cfg.window = 4;
  cfg.slab_eps = 0.05;
  cfg.radius = 1.5;
  cfg.weighting = BallWeighting::weighted;
  Filter filter(cfg);
  Rng rng(404);
  for (int k = 0; k < 300; ++k) {
    Vector x = Vector::NullaryExpr(8, [&](Eigen::Index) { return rng.normal(); });
    filter.step(x, rng.normal());
    const auto& st = filter.state();
    CHECK(st.h.cwiseAbs().dot(st.ball_weights) <= cfg.radius * (1.0 + 1e-12));
    CHECK(st.min_extrapolation >= 1.0 - 1e-9);
  }
}

TEST_CASE("unweighted path equals the generic machinery with unit weights") {
  FilterConfig cfg;
  cfg.dim = 6;
  cfg.window = 3;
  cfg.slab_eps = 0.1;
  cfg.radius = 2.0;
  cfg.step_fraction = 0.5;
  cfg.weighting = BallWeighting::unweighted;
  Filter filter(cfg);

  Vector manual = Vector::Zero(6);
  std::vector<Hyperslab> window;
  const WeightedL1Ball ones_ball{Vector::Ones(6), cfg.radius};
  Rng rng(8);
  for (int k = 0; k < 50; ++k) {
    Vector x = Vector::NullaryExpr(6, [&](Eigen::Index) { return rng.normal(); });
    const double y = rng.normal();
    filter.step(x, y);

    window.push_back(Hyperslab{x, y, cfg.slab_eps});
    if (static_cast<int>(window.size()) > cfg.window) window.erase(window.begin());
    std::vector<Vector> projections;
    std::vector<double> omegas(window.size(), 1.0 / window.size());
    for (const auto& slab : window) projections.push_back(project_hyperslab(manual, slab));
    const double bound = compute_extrapolation_bound(manual, projections, omegas);
    Vector combined = Vector::Zero(6);
    for (size_t j = 0; j < projections.size(); ++j) combined += omegas[j] * projections[j];
    manual = project_weighted_l1_ball(
        manual + cfg.step_fraction * bound * (combined - manual), ones_ball);

    CHECK((filter.estimate() - manual).norm() <= 1e-12);
  }
}

TEST_CASE("fejer monotonicity on a noiseless feasible run") {
  ScenarioSpec scen;
  scen.dim = 20;
  scen.sparsity = 3;
  scen.kind = ScenarioKind::reconstruction;
  scen.noise_var = 0.0;
  scen.amplitude = AmplitudeDist::gaussian;

  for (std::uint64_t s = 0; s < 8; ++s) {
    scen.seed = Rng::mix(12345, s);
    MeasurementStream stream(scen);
    const Vector truth = stream.truth_at(0);

    FilterConfig cfg;
    cfg.dim = scen.dim;
    cfg.window = 5;
    cfg.slab_eps = 0.02;  // noiseless: truth sits strictly inside every slab
    cfg.radius = truth.lpNorm<1>();
    cfg.weighting = BallWeighting::unweighted;
    Filter filter(cfg);

    std::vector<Vector> trace{filter.estimate()};
    for (int k = 0; k < 250; ++k) {
      const auto sample = stream.next();
      filter.step(sample.x, sample.y);
      trace.push_back(filter.estimate());
    }
    const auto report = verify::check_fejer_run(trace, truth);
    CHECK(report.passed);
    CHECK(filter.state().min_extrapolation >= 1.0 - 1e-9);
  }
}
