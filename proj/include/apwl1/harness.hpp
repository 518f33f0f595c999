#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "apwl1/baselines.hpp"
#include "apwl1/datagen.hpp"
#include "apwl1/filter.hpp"

namespace apwl1 {

/// One algorithm entry of an experiment. Unset eps/delta are resolved per
/// trial against the scenario: eps = 1.3 * noise std; delta = ||h*||_l0 for
/// the weighted filter and ||h*||_l1 for the unweighted one and the LASSO.
/// The *_scale factors are runtime knobs used by sensitivity sweeps; they are
/// not part of the config file syntax.
struct AlgorithmSpec {
  enum class Kind { apwl1, apl1, zalms, rzalms, lasso, oracle };

  Kind kind = Kind::apwl1;
  std::string tag;

  // projection-filter parameters (apwl1 / apl1)
  int q = 1;
  std::optional<double> slab_eps;  // nullopt: auto
  std::optional<double> radius;    // nullopt: auto
  double step_fraction = 0.5;
  double eps_prime = 0.01;
  EpsPrimeMode eps_prime_mode = EpsPrimeMode::decaying;
  ChangeDetectorParams detector{};

  // LMS parameters
  double mu = 0.005;
  double rho = 5e-4;
  double eta_inv = 10.0;
  bool grid_optimized = false;  // grid-search mu, rho before the main run

  // LASSO parameters
  int lasso_max_iter = 20000;
  double lasso_tol = 1e-10;

  // sweep multipliers
  double radius_scale = 1.0;
  double eps_scale = 1.0;
  double mu_scale = 1.0;
  double rho_scale = 1.0;

  void validate() const;
};

struct ExperimentConfig {
  ScenarioSpec scenario;
  std::vector<AlgorithmSpec> algorithms;
  int n_iters = 500;
  int n_trials = 100;
  int eval_iteration = 450;  // 1-based iteration of steady-state readouts
  std::uint64_t master_seed = 1;
  std::string out_dir = "out";

  void validate() const;
};

/// Ensemble-averaged normalized MSE curve of one algorithm, in dB.
struct MseTrace {
  std::string tag;
  std::vector<double> db;  // length n_iters, finite (clamped at the dB rails)
  std::uint64_t config_hash = 0;
  std::uint64_t master_seed = 0;
};

struct TrialResult {
  std::vector<std::vector<double>> err;  // [algorithm][iteration] normalized sq. error
  bool valid = true;
  std::string failure;
};

/// The project-wide error convention, kept in one place: squared deviation
/// normalized by the ground-truth energy.
double normalized_sq_error(const Vector& h, const Vector& truth);

/// dB conversion with documented rails: exact zeros floor at -150 dB and
/// diverged runs cap at +150 dB, so traces stay finite.
double to_db(double mean_normalized_sq);
inline constexpr double kDbFloor = -150.0;
inline constexpr double kDbCeil = 150.0;

/// One Monte-Carlo trial: a single stream derived from (master_seed, trial
/// index) feeds every configured algorithm, and the normalized squared
/// deviation is recorded each iteration. Algorithm failures invalidate the
/// trial; diverging baselines record infinite error instead.
TrialResult run_trial(const ExperimentConfig& config, std::int64_t trial_index);

/// Ensemble averaging over valid trials with a fixed summation order.
/// Grid-optimized baselines are resolved first. Throws when every trial is
/// invalid.
std::vector<MseTrace> run_ensemble(const ExperimentConfig& config);

/// Log-spaced grid search over (mu, rho), minimizing ensemble MSE at the
/// configured evaluation iteration. The grid is mu in [1e-4, 1e-1] and rho in
/// [1e-6, 1e-2], seven points per axis.
LmsConfig grid_optimize_lms(const ExperimentConfig& config, const AlgorithmSpec& algo);

struct SweepEntry {
  double deviation = 0.0;
  bool valid = true;
  std::vector<double> mse_db;  // per algorithm, at the evaluation iteration
};

struct SweepTable {
  std::string parameter;
  int eval_iteration = 0;
  std::vector<std::string> tags;
  std::vector<SweepEntry> rows;
};

/// Reruns the ensemble with `parameter` (one of delta, eps, mu, rho) scaled
/// by (1 + deviation) on every algorithm carrying it, reporting MSE at the
/// evaluation iteration. Deviations that would break an invariant (e.g.
/// delta <= 0) mark the row invalid instead of failing the sweep.
SweepTable sensitivity_sweep(const ExperimentConfig& config, const std::string& parameter,
                             const std::vector<double>& deviations);

struct ExportPaths {
  std::string csv;
  std::string json;
  std::string gnuplot;
};

/// Writes results.csv (header `iteration,<tag>,...`), a results.json metadata
/// sidecar (config text, seeds, git describe, creation time) and a gnuplot
/// script referencing the CSV. Throws on unwritable paths.
ExportPaths export_results(const std::vector<MseTrace>& traces, const std::string& out_dir,
                           const std::string& config_text = "");

/// CSV writer/parser used by export_results; exposed for round-trip checks.
std::string render_csv(const std::vector<MseTrace>& traces);
std::vector<std::vector<double>> parse_csv(std::istream& in, std::vector<std::string>* tags);

// Structured key=value config files, round-trippable through
// parse_config/serialize_config.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

std::uint64_t config_hash(const ExperimentConfig& config);

}  // namespace apwl1
