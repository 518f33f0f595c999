#include "apwl1/filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "apwl1/projections.hpp"

namespace apwl1 {

namespace {

constexpr double kDenomTol = 1e-12;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double median_of(std::vector<double> values) {
  const size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    const double lower = *std::max_element(values.begin(), values.begin() + mid);
    m = 0.5 * (lower + m);
  }
  return m;
}

void step_in_place(const FilterConfig& cfg, FilterState& st, const Vector& x, double y) {
  require(x.size() == cfg.dim, "filter step: dimension mismatch");
  require(all_finite(x) && std::isfinite(y), "filter step: non-finite sample");
  require(x.squaredNorm() > 0.0, "filter step: zero measurement vector");

  st.window.push_back(Hyperslab{x, y, cfg.slab_eps});
  if (static_cast<int>(st.window.size()) > cfg.window) st.window.pop_front();

  const double omega = 1.0 / static_cast<double>(st.window.size());
  Vector combined = Vector::Zero(cfg.dim);
  double mean_sq_displacement = 0.0;
  for (const Hyperslab& slab : st.window) {
    const Vector p = project_hyperslab(st.h, slab);
    mean_sq_displacement += omega * (p - st.h).squaredNorm();
    combined.noalias() += omega * p;
  }
  const Vector direction = combined - st.h;
  const double denom = direction.squaredNorm();
  const double bound = denom <= kDenomTol ? 1.0 : mean_sq_displacement / denom;
  st.min_extrapolation = std::min(st.min_extrapolation, bound);

  const Vector extrapolated = st.h + (cfg.step_fraction * bound) * direction;

  // Weights come from the pre-update estimate, immediately before this step's
  // ball projection.
  if (cfg.weighting == BallWeighting::weighted)
    st.ball_weights = update_ball_weights(st.h, st.eps_prime);
  Vector next =
      project_weighted_l1_ball(extrapolated, WeightedL1Ball{st.ball_weights, cfg.radius});

  const double step_norm = (next - st.h).norm();
  st.step_norms.push_back(step_norm);
  const size_t keep = static_cast<size_t>(cfg.detector.window) + 1;
  if (st.step_norms.size() > keep)
    st.step_norms.erase(st.step_norms.begin(),
                        st.step_norms.end() - static_cast<std::ptrdiff_t>(keep));

  if (cfg.eps_prime_mode == EpsPrimeMode::decaying_with_reset) {
    const std::int64_t age = st.last_detection < 0
                                 ? std::numeric_limits<std::int64_t>::max()
                                 : st.n - st.last_detection;
    if (detect_change(st.step_norms, cfg.detector, age)) {
      st.last_detection = st.n;
      st.reset_epoch = st.n + 1;
    }
  }

  st.h = std::move(next);
  st.n += 1;
  st.eps_prime = eps_prime_schedule(st.n, cfg.eps_prime_base, cfg.eps_prime_mode,
                                    st.reset_epoch);
}

}  // namespace

void FilterConfig::validate() const {
  require(dim >= 1, "FilterConfig: dim must be positive");
  require(window >= 1, "FilterConfig: window must be positive");
  require(slab_eps >= 0.0, "FilterConfig: slab_eps must be nonnegative");
  require(radius > 0.0, "FilterConfig: radius must be positive");
  require(step_fraction > 0.0 && step_fraction < 2.0,
          "FilterConfig: step_fraction must lie in (0, 2)");
  require(eps_prime_base > 0.0, "FilterConfig: eps_prime_base must be positive");
  require(detector.window >= 1, "FilterConfig: detector window must be positive");
  require(detector.ratio > 0.0, "FilterConfig: detector ratio must be positive");
}

double compute_extrapolation_bound(const Vector& h, const std::vector<Vector>& projections,
                                   const std::vector<double>& omegas) {
  require(!projections.empty(), "compute_extrapolation_bound: empty projection list");
  require(projections.size() == omegas.size(),
          "compute_extrapolation_bound: list length mismatch");
  double weight_sum = 0.0;
  for (double w : omegas) {
    require(w > 0.0 && w <= 1.0, "compute_extrapolation_bound: weights must lie in (0, 1]");
    weight_sum += w;
  }
  require(std::abs(weight_sum - 1.0) <= 1e-12,
          "compute_extrapolation_bound: weights must sum to 1");

  Vector combined = Vector::Zero(h.size());
  double mean_sq = 0.0;
  for (size_t j = 0; j < projections.size(); ++j) {
    require(projections[j].size() == h.size(),
            "compute_extrapolation_bound: dimension mismatch");
    mean_sq += omegas[j] * (projections[j] - h).squaredNorm();
    combined.noalias() += omegas[j] * projections[j];
  }
  const double denom = (combined - h).squaredNorm();
  if (denom <= kDenomTol) return 1.0;
  return mean_sq / denom;
}

Vector update_ball_weights(const Vector& h, double eps_prime) {
  require(eps_prime > 0.0, "update_ball_weights: eps_prime must be positive");
  return (h.cwiseAbs().array() + eps_prime).inverse().matrix();
}

double eps_prime_schedule(std::int64_t n, double base, EpsPrimeMode mode,
                          std::int64_t reset_epoch) {
  const std::int64_t origin = mode == EpsPrimeMode::decaying_with_reset ? reset_epoch : 0;
  return base + 1.0 / static_cast<double>(n - origin + 1);
}

bool detect_change(std::span<const double> step_norms, const ChangeDetectorParams& params,
                   std::int64_t steps_since_detection) {
  const auto window = static_cast<size_t>(params.window);
  if (step_norms.size() < window + 1) return false;  // warmup
  if (steps_since_detection <= params.window) return false;  // cooldown
  const double latest = step_norms.back();
  std::vector<double> history(step_norms.end() - 1 - static_cast<std::ptrdiff_t>(window),
                              step_norms.end() - 1);
  return latest > params.ratio * median_of(std::move(history));
}

FilterState init(const FilterConfig& config, const Vector& h0) {
  config.validate();
  require(h0.size() == config.dim, "filter init: h0 dimension mismatch");
  require(all_finite(h0), "filter init: h0 must be finite");

  FilterState st;
  st.h = h0;
  st.eps_prime = eps_prime_schedule(0, config.eps_prime_base, config.eps_prime_mode, 0);
  st.ball_weights = config.weighting == BallWeighting::weighted
                        ? update_ball_weights(h0, st.eps_prime)
                        : Vector::Ones(config.dim);
  return st;
}

FilterState step(const FilterConfig& config, const FilterState& state, const Vector& x,
                 double y) {
  FilterState next = state;
  step_in_place(config, next, x, y);
  return next;
}

Filter::Filter(FilterConfig config) : Filter(config, Vector::Zero(std::max(config.dim, 0))) {}

Filter::Filter(FilterConfig config, const Vector& h0)
    : config_(std::move(config)), state_(init(config_, h0)) {}

void Filter::step(const Vector& x, double y) { step_in_place(config_, state_, x, y); }

}  // namespace apwl1
