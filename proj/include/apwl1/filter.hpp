#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <span>
#include <vector>

#include "apwl1/types.hpp"

namespace apwl1 {

enum class BallWeighting { weighted, unweighted };
enum class EpsPrimeMode { decaying, decaying_with_reset };

/// Orbit-spike rule used to restart the weight schedule in time-varying
/// operation: a detection fires when the latest step norm exceeds `ratio`
/// times the median of the `window` norms before it. `window` also acts as
/// the warmup length and as the cooldown after a detection.
struct ChangeDetectorParams {
  double ratio = 5.0;
  int window = 50;
};

/// User parameters of the adaptive estimator. Combination weights over the
/// slab window are uniform (1/|J_n|) and the relaxation is mu_n =
/// step_fraction * M_n with M_n the data-dependent extrapolation bound.
struct FilterConfig {
  int dim = 0;                 // L
  int window = 1;              // q: slabs combined per step
  double slab_eps = 0.0;       // hyperslab half-width epsilon
  double radius = 1.0;         // l1-ball radius delta
  double step_fraction = 0.5;  // kappa in (0, 2)
  BallWeighting weighting = BallWeighting::weighted;
  double eps_prime_base = 0.01;  // eps' of the weight schedule
  EpsPrimeMode eps_prime_mode = EpsPrimeMode::decaying;
  ChangeDetectorParams detector{};

  void validate() const;  // throws std::invalid_argument
};

/// Evolving state of one estimator instance. Single-owner: concurrent steps
/// on the same state are not supported, but distinct states run in parallel.
/// The slab projections inside one step are themselves independent; they are
/// evaluated sequentially so results never depend on scheduling.
struct FilterState {
  std::int64_t n = 0;            // accepted samples so far
  Vector h;                      // current estimate h_n
  std::deque<Hyperslab> window;  // slabs indexed max{0, n-q}..n-1
  Vector ball_weights;           // weights used by the most recent ball projection
  double eps_prime = 0.0;        // eps'_n for the upcoming step
  std::vector<double> step_norms;  // recent ||h_{k+1} - h_k||, detector-window bounded
  std::int64_t reset_epoch = 0;    // schedule restart index (0: never reset)
  std::int64_t last_detection = -1;
  double min_extrapolation = std::numeric_limits<double>::infinity();  // min M_n seen
};

/// Extrapolation bound M_n: the ratio of the weighted mean of squared
/// projection displacements to the squared displacement of the weighted mean;
/// 1 when the weighted mean coincides with h (denominator below 1e-12).
/// Convexity makes the result >= 1 up to rounding. Throws on an empty list or
/// weights that do not sum to 1 within 1e-12.
double compute_extrapolation_bound(const Vector& h, const std::vector<Vector>& projections,
                                   const std::vector<double>& omegas);

/// w_i = 1 / (|h_i| + eps_prime). Throws if eps_prime <= 0.
Vector update_ball_weights(const Vector& h, double eps_prime);

/// eps'_n = base + 1/(n - reset_epoch + 1). Plain decaying mode ignores
/// reset_epoch; with resets, reset_epoch is the first step after the most
/// recent detected change (0 when none).
double eps_prime_schedule(std::int64_t n, double base, EpsPrimeMode mode,
                          std::int64_t reset_epoch = 0);

/// Spike rule on the step-norm history; `steps_since_detection` implements
/// the cooldown. Returns false during warmup.
bool detect_change(std::span<const double> step_norms, const ChangeDetectorParams& params,
                   std::int64_t steps_since_detection = std::numeric_limits<std::int64_t>::max());

/// Fresh state: time 0, empty window, weights from h0 (or all-ones when
/// unweighted), eps'_0 from the schedule.
FilterState init(const FilterConfig& config, const Vector& h0);

/// One measurement update; returns the successor state and leaves the input
/// untouched. A zero or mismatched measurement vector throws and rejects the
/// slab without advancing time.
FilterState step(const FilterConfig& config, const FilterState& state, const Vector& x,
                 double y);

/// Owner of (config, state) updating in place; the convenient form for long
/// runs.
class Filter {
 public:
  explicit Filter(FilterConfig config);        // h0 = 0
  Filter(FilterConfig config, const Vector& h0);

  void step(const Vector& x, double y);
  const Vector& estimate() const { return state_.h; }
  const FilterState& state() const { return state_; }
  const FilterConfig& config() const { return config_; }

 private:
  FilterConfig config_;
  FilterState state_;
};

}  // namespace apwl1
