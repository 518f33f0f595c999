#pragma once

#include <Eigen/Core>

namespace apwl1 {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Current estimate h_n. A plain dense vector; APIs that ingest one validate
/// finiteness at the boundary instead of wrapping it in a class.
using EstimateVector = Vector;

inline bool all_finite(const Vector& v) { return v.allFinite(); }

/// Closed hyperslab {h : |h.x - y| <= eps} built from one measurement pair.
/// eps >= 0; a zero measurement vector makes projections undefined and is
/// rejected by the operations below.
struct Hyperslab {
  Vector x;
  double y = 0.0;
  double eps = 0.0;
};

/// Weighted l1 ball {h : sum_i w_i |h_i| <= delta} with w_i > 0, delta > 0.
struct WeightedL1Ball {
  Vector w;
  double delta = 0.0;
};

}  // namespace apwl1
