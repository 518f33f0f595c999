#pragma once

#include <vector>

#include "apwl1/types.hpp"

namespace apwl1 {

/// Parameters of the sparse LMS baselines.
struct LmsConfig {
  double mu = 0.005;      // step size, > 0
  double rho = 5e-4;      // zero-attractor strength, >= 0
  double eta_inv = 10.0;  // reweighting scale: the 1/eta of log(1 + |h_i|/eta)
};

/// Zero-attracting LMS: h + mu (y - h.x) x - rho sgn(h), with sgn(0) = 0.
Vector zalms_step(const Vector& h, const Vector& x, double y, const LmsConfig& cfg);

/// Reweighted zero-attractor: the shrinkage of each coefficient is damped by
/// 1 / (1 + eta_inv |h_i|), so large coefficients are left almost untouched.
Vector rzalms_step(const Vector& h, const Vector& x, double y, const LmsConfig& cfg);

struct LassoResult {
  Vector h;
  double objective = 0.0;  // ||X h - y||^2 at the returned point
  int iterations = 0;
  std::vector<double> objective_trace;  // one entry per iterate, non-increasing
};

/// Batch LASSO benchmark: minimize ||X h - y||^2 over the unweighted l1 ball
/// of radius delta by projected gradient with step 1/||X||_op^2 (power
/// iteration estimate). Stops when the relative objective decrease falls
/// below tol or after max_iter iterations. Every iterate is a projection
/// output, so the constraint holds throughout.
LassoResult lasso_solve(const Matrix& X, const Vector& y, double delta,
                        int max_iter = 20000, double tol = 1e-12);

}  // namespace apwl1
