#include "apwl1/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "apwl1/projections.hpp"
#include "apwl1/rng.hpp"

namespace apwl1 {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

inline double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Largest eigenvalue of X^T X (= ||X||_op^2) by power iteration from a fixed
// pseudo-random start.
double operator_norm_sq(const Matrix& X) {
  Rng rng(0x9e3779b9u);
  Vector v = Vector::NullaryExpr(X.cols(), [&](Eigen::Index) { return rng.normal(); });
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 100; ++it) {
    Vector u = X.transpose() * (X * v);
    const double norm = u.norm();
    if (norm == 0.0) return 0.0;
    lambda = v.dot(u);
    v = u / norm;
  }
  return lambda;
}

}  // namespace

Vector zalms_step(const Vector& h, const Vector& x, double y, const LmsConfig& cfg) {
  require(h.size() == x.size(), "zalms_step: dimension mismatch");
  const double err = y - h.dot(x);
  Vector next = h + cfg.mu * err * x;
  for (Eigen::Index i = 0; i < h.size(); ++i) next[i] -= cfg.rho * sgn(h[i]);
  return next;
}

Vector rzalms_step(const Vector& h, const Vector& x, double y, const LmsConfig& cfg) {
  require(h.size() == x.size(), "rzalms_step: dimension mismatch");
  require(cfg.eta_inv > 0.0, "rzalms_step: eta_inv must be positive");
  const double err = y - h.dot(x);
  Vector next = h + cfg.mu * err * x;
  for (Eigen::Index i = 0; i < h.size(); ++i)
    next[i] -= cfg.rho * sgn(h[i]) / (1.0 + cfg.eta_inv * std::abs(h[i]));
  return next;
}

LassoResult lasso_solve(const Matrix& X, const Vector& y, double delta, int max_iter,
                        double tol) {
  require(X.rows() >= 1, "lasso_solve: empty measurement matrix");
  require(X.rows() == y.size(), "lasso_solve: row count mismatch");
  require(delta > 0.0, "lasso_solve: radius must be positive");
  require(X.allFinite() && y.allFinite(), "lasso_solve: non-finite data");

  const WeightedL1Ball ball{Vector::Ones(X.cols()), delta};
  const double lambda = operator_norm_sq(X);
  // Guard against a slightly low power-iteration estimate; a marginally
  // shorter step keeps the descent monotone.
  const double step = lambda > 0.0 ? 1.0 / (1.05 * lambda) : 1.0;

  LassoResult result;
  result.h = Vector::Zero(X.cols());
  Vector residual = -y;
  result.objective = residual.squaredNorm();
  result.objective_trace.push_back(result.objective);

  for (int it = 0; it < max_iter; ++it) {
    const Vector gradient = X.transpose() * residual;  // of (1/2)||Xh - y||^2
    const Vector candidate = project_weighted_l1_ball(result.h - step * gradient, ball);
    const Vector candidate_residual = X * candidate - y;
    const double objective = candidate_residual.squaredNorm();
    if (objective > result.objective) break;  // rounding plateau; keep current point
    const double decrease = result.objective - objective;
    result.h = candidate;
    residual = candidate_residual;
    result.objective = objective;
    result.objective_trace.push_back(objective);
    ++result.iterations;
    if (decrease < tol * std::max(result.objective, 1e-300)) break;
  }
  return result;
}

}  // namespace apwl1
