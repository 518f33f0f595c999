#include "apwl1/verify.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "apwl1/datagen.hpp"
#include "apwl1/filter.hpp"
#include "apwl1/projections.hpp"
#include "apwl1/rng.hpp"

namespace apwl1::verify {

Vector oracle_project_weighted_l1(const Vector& h, const WeightedL1Ball& ball) {
  const int dim = static_cast<int>(h.size());
  if (dim != ball.w.size())
    throw std::invalid_argument("oracle_project_weighted_l1: dimension mismatch");
  if (dim > 12)
    throw std::invalid_argument("oracle_project_weighted_l1: dimension above 12");
  if (!(ball.delta > 0.0) || (ball.w.array() <= 0.0).any())
    throw std::invalid_argument("oracle_project_weighted_l1: ball invariants violated");

  const Vector a = h.cwiseAbs();
  if (a.dot(ball.w) <= ball.delta) return h;
  const double a2_total = a.squaredNorm();

  double best_d2 = std::numeric_limits<double>::infinity();
  unsigned best_mask = 0;
  double best_shift = 0.0;
  const unsigned masks = 1u << dim;
  for (unsigned mask = 1; mask < masks; ++mask) {
    double swa = 0.0, sw2 = 0.0, a2_in = 0.0;
    for (int i = 0; i < dim; ++i) {
      if (mask & (1u << i)) {
        swa += ball.w[i] * a[i];
        sw2 += ball.w[i] * ball.w[i];
        a2_in += a[i] * a[i];
      }
    }
    // Least-distance point on {u_A >= 0, w_A . u_A = delta}: the hyperplane
    // projection restricted to the active set, zeros elsewhere. Candidates
    // leaving the nonnegative hyperoctant are discarded.
    const double shift = (swa - ball.delta) / sw2;
    bool feasible = true;
    for (int i = 0; i < dim && feasible; ++i)
      if (mask & (1u << i)) feasible = a[i] - shift * ball.w[i] >= 0.0;
    if (!feasible) continue;
    const double d2 = shift * shift * sw2 + (a2_total - a2_in);
    if (d2 < best_d2) {
      best_d2 = d2;
      best_mask = mask;
      best_shift = shift;
    }
  }
  if (best_mask == 0)
    throw std::logic_error("oracle_project_weighted_l1: no feasible candidate");

  Vector p = Vector::Zero(dim);
  for (int i = 0; i < dim; ++i)
    if (best_mask & (1u << i))
      p[i] = std::copysign(a[i] - best_shift * ball.w[i], h[i] >= 0.0 ? 1.0 : -1.0);
  return p;
}

CheckReport check_fejer_run(const std::vector<Vector>& trace, const Vector& h_star,
                            double slack) {
  CheckReport report;
  if (trace.empty()) return report;
  double prev = (trace.front() - h_star).norm();
  for (size_t n = 1; n < trace.size(); ++n) {
    const double cur = (trace[n] - h_star).norm();
    const double increase = cur - prev;
    report.worst = std::max(report.worst, increase);
    if (increase > slack && report.first_violation < 0) {
      report.first_violation = static_cast<std::int64_t>(n);
      report.passed = false;
    }
    prev = cur;
    ++report.checks;
  }
  return report;
}

CheckReport check_slab_distances(const std::vector<Vector>& trace,
                                 const std::vector<Hyperslab>& slabs, int q,
                                 std::int64_t burn_in, double bound) {
  CheckReport report;
  const auto steps = static_cast<std::int64_t>(slabs.size());
  for (std::int64_t n = burn_in; n < steps; ++n) {
    if (n >= static_cast<std::int64_t>(trace.size())) break;
    double worst_here = 0.0;
    const std::int64_t first = std::max<std::int64_t>(0, n - q + 1);
    for (std::int64_t j = first; j <= n; ++j)
      worst_here = std::max(worst_here,
                            distance_to_hyperslab(trace[static_cast<size_t>(n)],
                                                  slabs[static_cast<size_t>(j)]));
    report.worst = std::max(report.worst, worst_here);
    if (worst_here >= bound && report.first_violation < 0) {
      report.first_violation = n;
      report.passed = false;
    }
    ++report.checks;
  }
  return report;
}

OracleReport compare_projection_with_oracle(std::int64_t cases, std::uint64_t seed,
                                            int max_dim) {
  constexpr double kTol = 1e-9;
  constexpr size_t kMaxFailures = 16;
  OracleReport report;
  Rng rng(seed);
  auto log_uniform = [&rng](double lo, double hi) {
    return lo * std::exp(rng.uniform() * std::log(hi / lo));
  };
  for (std::int64_t c = 0; c < cases; ++c) {
    const int dim = static_cast<int>(rng.uniform_int(1, max_dim));
    WeightedL1Ball ball;
    ball.w = Vector::NullaryExpr(dim, [&](Eigen::Index) { return log_uniform(0.1, 10.0); });
    ball.delta = log_uniform(0.1, 10.0);
    const Vector h = Vector::NullaryExpr(dim, [&](Eigen::Index) { return rng.normal(); });

    const Vector fast = project_weighted_l1_ball(h, ball);
    const Vector slow = oracle_project_weighted_l1(h, ball);
    const double deviation = (fast - slow).norm();
    report.max_deviation = std::max(report.max_deviation, deviation);
    if (deviation > kTol && report.failures.size() < kMaxFailures)
      report.failures.push_back({h, ball.w, ball.delta, deviation});
    ++report.cases;
  }
  return report;
}

FeasibleRunReport run_noiseless_feasible_check(std::uint64_t seed, int dim, int sparsity,
                                               int window, int iters,
                                               std::int64_t burn_in) {
  ScenarioSpec scenario;
  scenario.dim = dim;
  scenario.sparsity = sparsity;
  scenario.kind = ScenarioKind::reconstruction;
  scenario.noise_var = 0.0;
  scenario.amplitude = AmplitudeDist::gaussian;
  scenario.seed = seed;
  MeasurementStream stream(scenario);
  const Vector truth = stream.truth_at(0);

  FilterConfig config;
  config.dim = dim;
  config.window = window;
  config.slab_eps = 0.0;
  config.radius = truth.lpNorm<1>();
  config.weighting = BallWeighting::unweighted;
  Filter filter(config);

  std::vector<Vector> trace{filter.estimate()};
  std::vector<Hyperslab> slabs;
  trace.reserve(static_cast<size_t>(iters) + 1);
  slabs.reserve(static_cast<size_t>(iters));
  for (int k = 0; k < iters; ++k) {
    const auto sample = stream.next();
    slabs.push_back(Hyperslab{sample.x, sample.y, config.slab_eps});
    filter.step(sample.x, sample.y);
    trace.push_back(filter.estimate());
  }

  FeasibleRunReport report;
  report.fejer = check_fejer_run(trace, truth);
  report.slabs = check_slab_distances(trace, slabs, window, burn_in);
  report.min_extrapolation = filter.state().min_extrapolation;
  report.final_step_norm =
      filter.state().step_norms.empty() ? 0.0 : filter.state().step_norms.back();
  report.final_error = (filter.estimate() - truth).norm();
  return report;
}

namespace {

nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

std::string to_json(const OracleReport& report) {
  nlohmann::json j;
  j["cases"] = report.cases;
  j["max_deviation"] = report.max_deviation;
  j["failures"] = nlohmann::json::array();
  for (const auto& f : report.failures) {
    j["failures"].push_back({{"h", vector_to_json(f.h)},
                             {"w", vector_to_json(f.w)},
                             {"delta", f.delta},
                             {"deviation", f.deviation}});
  }
  return j.dump();
}

std::string to_json(const CheckReport& report) {
  nlohmann::json j;
  j["passed"] = report.passed;
  j["first_violation"] = report.first_violation;
  j["worst"] = report.worst;
  j["checks"] = report.checks;
  return j.dump();
}

}  // namespace apwl1::verify
