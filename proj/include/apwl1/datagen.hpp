#pragma once

#include <cstdint>
#include <deque>

#include "apwl1/rng.hpp"
#include "apwl1/types.hpp"

namespace apwl1 {

enum class ScenarioKind { reconstruction, sysid, timevarying };
enum class AmplitudeDist { unit, gaussian };
enum class SensingDist { gaussian, bernoulli };  // regressor entry distribution

/// Description of a synthetic measurement scenario. `sparsity` is ignored by
/// the time-varying kind, whose support is fixed by construction.
struct ScenarioSpec {
  int dim = 100;           // L
  int sparsity = 5;        // S = ||h*||_l0
  ScenarioKind kind = ScenarioKind::reconstruction;
  double noise_var = 0.0;  // sigma^2
  AmplitudeDist amplitude = AmplitudeDist::unit;
  SensingDist sensing = SensingDist::gaussian;  // bernoulli: +-1 equiprobable
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

/// S nonzeros at distinct uniformly random positions; amplitudes are 1 or
/// standard normal draws. Same (arguments, seed) give the same vector.
Vector gen_sparse_vector(int dim, int sparsity, AmplitudeDist amplitude, std::uint64_t seed);

/// Ground truth of the abrupt-change tracking scenario, dimension 100. `n` is
/// the 1-based time instant: through n = 500 the first five coefficients are
/// 1 (S = 5); from n = 501 coefficients 2 and 4 drop out and the odd
/// coefficients 7, 9, 11, 13, 15 switch on (S = 8). Storage is 0-based, so
/// coefficient #k lives at index k-1.
Vector gen_timevarying_truth(std::int64_t n);

/// Sequential source of measurement pairs with y = x . h*(n) + noise holding
/// exactly by construction. Single-consumer; independent streams (distinct
/// seeds) may run in parallel. Draw order is fixed: the ground truth first,
/// then per sample the regressor entries followed by the noise value.
class MeasurementStream {
 public:
  struct Sample {
    Vector x;
    double y = 0.0;
    double noise = 0.0;
  };

  explicit MeasurementStream(const ScenarioSpec& spec);

  Sample next();

  /// Ground truth in effect for 0-based sample index k.
  Vector truth_at(std::int64_t k) const;

  const ScenarioSpec& spec() const { return spec_; }
  std::int64_t emitted() const { return emitted_; }

 private:
  ScenarioSpec spec_;
  Rng rng_;
  Vector truth_;                  // fixed truth for the time-invariant kinds
  std::deque<double> delay_line_;  // sysid input history, newest first
  std::int64_t emitted_ = 0;
};

MeasurementStream gen_reconstruction_stream(ScenarioSpec spec);
MeasurementStream gen_sysid_stream(ScenarioSpec spec);
MeasurementStream gen_timevarying_stream(ScenarioSpec spec);

}  // namespace apwl1
