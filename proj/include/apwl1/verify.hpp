#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "apwl1/types.hpp"

namespace apwl1::verify {

// Independent oracles and theorem-derived runtime checks. Everything here is
// intentionally decoupled from the fast implementation paths it validates.

/// Brute-force projection onto a weighted l1 ball: map to the nonnegative
/// hyperoctant, enumerate every nonempty active set, solve the
/// equality-constrained least-distance point on each, keep the feasible
/// candidate closest to the input, and restore signs. Exponential in the
/// dimension; refuses dim > 12.
Vector oracle_project_weighted_l1(const Vector& h, const WeightedL1Ball& ball);

struct CheckReport {
  bool passed = true;
  std::int64_t first_violation = -1;  // index of the first failing step, -1 if none
  double worst = 0.0;                 // largest violation margin (or distance) seen
  std::int64_t checks = 0;
};

/// Monotone approach to a feasible point: ||h_{n+1} - f|| <= ||h_n - f|| + slack
/// for every consecutive pair of the trace.
CheckReport check_fejer_run(const std::vector<Vector>& trace, const Vector& h_star,
                            double slack = 1e-10);

/// Window slab distances past a burn-in: for every n >= burn_in, requires
/// max{d(h_n, S_j) : j in [max(0, n-q+1), n]} < bound, where trace[n] is the
/// estimate facing slab window n.
CheckReport check_slab_distances(const std::vector<Vector>& trace,
                                 const std::vector<Hyperslab>& slabs, int q,
                                 std::int64_t burn_in, double bound = 1e-6);

struct OracleReport {
  std::int64_t cases = 0;
  double max_deviation = 0.0;
  struct Failure {
    Vector h;
    Vector w;
    double delta = 0.0;
    double deviation = 0.0;
  };
  std::vector<Failure> failures;  // cases beyond tolerance (capped)
  bool passed(double tol) const { return max_deviation <= tol; }
};

/// Random-instance agreement between project_weighted_l1_ball and the
/// brute-force oracle: dimensions 1..max_dim, weights and radius log-uniform
/// in [0.1, 10], normal entries. Deviations beyond 1e-9 are recorded.
OracleReport compare_projection_with_oracle(std::int64_t cases, std::uint64_t seed,
                                            int max_dim = 10);

/// JSON rendering of an OracleReport for the CLI `verify` subcommand.
std::string to_json(const OracleReport& report);
std::string to_json(const CheckReport& report);

struct FeasibleRunReport {
  CheckReport fejer;
  CheckReport slabs;
  double min_extrapolation = 0.0;
  double final_step_norm = 0.0;
  double final_error = 0.0;
};

/// Canned noiseless feasible run: unweighted filter, radius ||h*||_l1, exact
/// measurements (eps = 0), so the truth lies in every property set and the
/// monotonicity and vanishing-distance conclusions become checkable. Used by
/// the CLI `verify` subcommand and the acceptance suite.
FeasibleRunReport run_noiseless_feasible_check(std::uint64_t seed, int dim = 20,
                                               int sparsity = 3, int window = 10,
                                               int iters = 2000, std::int64_t burn_in = 500);

}  // namespace apwl1::verify
