#include "apwl1/datagen.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace apwl1 {

namespace {

constexpr int kTimevaryingDim = 100;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

Vector sparse_vector(int dim, int sparsity, AmplitudeDist amplitude, Rng& rng) {
  require(sparsity >= 1 && sparsity <= dim, "gen_sparse_vector: need 1 <= S <= L");
  std::vector<int> positions(static_cast<size_t>(dim));
  std::iota(positions.begin(), positions.end(), 0);
  Vector h = Vector::Zero(dim);
  // Partial Fisher-Yates: the first S slots end up holding the support.
  for (int i = 0; i < sparsity; ++i) {
    const auto j = static_cast<size_t>(rng.uniform_int(i, dim - 1));
    std::swap(positions[static_cast<size_t>(i)], positions[j]);
    h[positions[static_cast<size_t>(i)]] =
        amplitude == AmplitudeDist::unit ? 1.0 : rng.normal();
  }
  return h;
}

}  // namespace

void ScenarioSpec::validate() const {
  require(dim >= 1, "ScenarioSpec: dim must be positive");
  require(noise_var >= 0.0, "ScenarioSpec: noise_var must be nonnegative");
  if (kind == ScenarioKind::timevarying) {
    require(dim == kTimevaryingDim, "ScenarioSpec: time-varying scenario is dimension 100");
  } else {
    require(sparsity >= 1 && sparsity <= dim, "ScenarioSpec: need 1 <= S <= L");
  }
}

Vector gen_sparse_vector(int dim, int sparsity, AmplitudeDist amplitude,
                         std::uint64_t seed) {
  Rng rng(seed);
  return sparse_vector(dim, sparsity, amplitude, rng);
}

Vector gen_timevarying_truth(std::int64_t n) {
  Vector h = Vector::Zero(kTimevaryingDim);
  if (n <= 500) {
    for (int i = 0; i < 5; ++i) h[i] = 1.0;  // coefficients #1..#5
  } else {
    for (int coef : {1, 3, 5, 7, 9, 11, 13, 15}) h[coef - 1] = 1.0;
  }
  return h;
}

MeasurementStream::MeasurementStream(const ScenarioSpec& spec)
    : spec_(spec), rng_(spec.seed) {
  spec_.validate();
  if (spec_.kind != ScenarioKind::timevarying)
    truth_ = sparse_vector(spec_.dim, spec_.sparsity, spec_.amplitude, rng_);
}

Vector MeasurementStream::truth_at(std::int64_t k) const {
  if (spec_.kind == ScenarioKind::timevarying) return gen_timevarying_truth(k + 1);
  return truth_;
}

MeasurementStream::Sample MeasurementStream::next() {
  auto draw = [this] {
    return spec_.sensing == SensingDist::bernoulli
               ? (rng_.uniform() < 0.5 ? -1.0 : 1.0)
               : rng_.normal();
  };
  Sample s;
  s.x.resize(spec_.dim);
  if (spec_.kind == ScenarioKind::reconstruction) {
    for (int i = 0; i < spec_.dim; ++i) s.x[i] = draw();
  } else {
    // Shift-window regressor [x_n, x_{n-1}, ..., x_{n-L+1}], zero pre-history.
    delay_line_.push_front(draw());
    if (static_cast<int>(delay_line_.size()) > spec_.dim) delay_line_.pop_back();
    for (int i = 0; i < spec_.dim; ++i)
      s.x[i] = i < static_cast<int>(delay_line_.size()) ? delay_line_[static_cast<size_t>(i)] : 0.0;
  }
  s.noise = spec_.noise_var > 0.0 ? std::sqrt(spec_.noise_var) * rng_.normal() : 0.0;
  s.y = s.x.dot(truth_at(emitted_)) + s.noise;
  ++emitted_;
  return s;
}

MeasurementStream gen_reconstruction_stream(ScenarioSpec spec) {
  spec.kind = ScenarioKind::reconstruction;
  return MeasurementStream(spec);
}

MeasurementStream gen_sysid_stream(ScenarioSpec spec) {
  spec.kind = ScenarioKind::sysid;
  return MeasurementStream(spec);
}

MeasurementStream gen_timevarying_stream(ScenarioSpec spec) {
  spec.kind = ScenarioKind::timevarying;
  spec.dim = 100;
  return MeasurementStream(spec);
}

}  // namespace apwl1
