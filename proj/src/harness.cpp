#include "apwl1/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "apwl1/version.hpp"

namespace apwl1 {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

std::string kind_name(AlgorithmSpec::Kind kind) {
  switch (kind) {
    case AlgorithmSpec::Kind::apwl1: return "apwl1";
    case AlgorithmSpec::Kind::apl1: return "apl1";
    case AlgorithmSpec::Kind::zalms: return "zalms";
    case AlgorithmSpec::Kind::rzalms: return "rzalms";
    case AlgorithmSpec::Kind::lasso: return "lasso";
    case AlgorithmSpec::Kind::oracle: return "oracle";
  }
  return "?";
}

AlgorithmSpec::Kind kind_from_name(const std::string& name) {
  for (auto k : {AlgorithmSpec::Kind::apwl1, AlgorithmSpec::Kind::apl1,
                 AlgorithmSpec::Kind::zalms, AlgorithmSpec::Kind::rzalms,
                 AlgorithmSpec::Kind::lasso, AlgorithmSpec::Kind::oracle})
    if (kind_name(k) == name) return k;
  throw std::invalid_argument("config: unknown algorithm type '" + name + "'");
}

bool is_filter_kind(AlgorithmSpec::Kind kind) {
  return kind == AlgorithmSpec::Kind::apwl1 || kind == AlgorithmSpec::Kind::apl1;
}

bool is_lms_kind(AlgorithmSpec::Kind kind) {
  return kind == AlgorithmSpec::Kind::zalms || kind == AlgorithmSpec::Kind::rzalms;
}

double l0_norm(const Vector& v) {
  return static_cast<double>((v.array() != 0.0).count());
}

double resolved_eps(const AlgorithmSpec& algo, const ScenarioSpec& scenario) {
  const double base =
      algo.slab_eps ? *algo.slab_eps : 1.3 * std::sqrt(scenario.noise_var);
  return base * algo.eps_scale;
}

double resolved_radius(const AlgorithmSpec& algo, const Vector& truth0) {
  double base;
  if (algo.radius) {
    base = *algo.radius;
  } else if (algo.kind == AlgorithmSpec::Kind::apwl1) {
    base = l0_norm(truth0);
  } else {  // apl1, lasso
    base = truth0.lpNorm<1>();
  }
  return base * algo.radius_scale;
}

// Per-iteration error of one algorithm over a materialized stream. Non-finite
// estimates freeze the remainder of the row at +inf.
std::vector<double> run_algorithm(const AlgorithmSpec& algo, const ExperimentConfig& cfg,
                                  const std::vector<MeasurementStream::Sample>& samples,
                                  const MeasurementStream& stream) {
  const int iters = cfg.n_iters;
  std::vector<double> err(static_cast<size_t>(iters), 0.0);
  const ScenarioKind kind = cfg.scenario.kind;
  const Vector truth0 = stream.truth_at(0);
  const bool moving_truth = kind == ScenarioKind::timevarying;

  auto record = [&](std::int64_t k, const Vector& estimate) -> bool {
    if (!all_finite(estimate)) {
      for (std::int64_t j = k; j < iters; ++j) err[static_cast<size_t>(j)] = kInf;
      return false;
    }
    err[static_cast<size_t>(k)] = normalized_sq_error(
        estimate, moving_truth ? stream.truth_at(k) : truth0);
    return true;
  };

  switch (algo.kind) {
    case AlgorithmSpec::Kind::apwl1:
    case AlgorithmSpec::Kind::apl1: {
      FilterConfig fc;
      fc.dim = cfg.scenario.dim;
      fc.window = algo.q;
      fc.slab_eps = resolved_eps(algo, cfg.scenario);
      fc.radius = resolved_radius(algo, truth0);
      fc.step_fraction = algo.step_fraction;
      fc.weighting = algo.kind == AlgorithmSpec::Kind::apwl1 ? BallWeighting::weighted
                                                             : BallWeighting::unweighted;
      fc.eps_prime_base = algo.eps_prime;
      fc.eps_prime_mode = algo.eps_prime_mode;
      fc.detector = algo.detector;
      Filter filter(fc);
      for (std::int64_t k = 0; k < iters; ++k) {
        filter.step(samples[static_cast<size_t>(k)].x, samples[static_cast<size_t>(k)].y);
        if (!record(k, filter.estimate())) break;
      }
      // Theorem-level invariant, asserted on every run the harness drives.
      if (filter.state().min_extrapolation < 1.0 - 1e-9)
        throw std::runtime_error(algo.tag + ": extrapolation bound fell below 1");
      break;
    }
    case AlgorithmSpec::Kind::zalms:
    case AlgorithmSpec::Kind::rzalms: {
      LmsConfig lc{algo.mu * algo.mu_scale, algo.rho * algo.rho_scale, algo.eta_inv};
      Vector h = Vector::Zero(cfg.scenario.dim);
      const bool reweighted = algo.kind == AlgorithmSpec::Kind::rzalms;
      for (std::int64_t k = 0; k < iters; ++k) {
        const auto& s = samples[static_cast<size_t>(k)];
        h = reweighted ? rzalms_step(h, s.x, s.y, lc) : zalms_step(h, s.x, s.y, lc);
        if (!record(k, h)) break;
      }
      break;
    }
    case AlgorithmSpec::Kind::lasso: {
      // Batch benchmark floor: one solve over the full record, reported as a
      // flat per-iteration curve.
      Matrix X(iters, cfg.scenario.dim);
      Vector y(iters);
      for (std::int64_t k = 0; k < iters; ++k) {
        X.row(k) = samples[static_cast<size_t>(k)].x.transpose();
        y[k] = samples[static_cast<size_t>(k)].y;
      }
      const double delta = resolved_radius(algo, truth0);
      const LassoResult sol = lasso_solve(X, y, delta, algo.lasso_max_iter, algo.lasso_tol);
      for (std::int64_t k = 0; k < iters; ++k)
        if (!record(k, sol.h)) break;
      break;
    }
    case AlgorithmSpec::Kind::oracle: {
      for (std::int64_t k = 0; k < iters; ++k)
        err[static_cast<size_t>(k)] = 0.0;
      break;
    }
  }
  return err;
}

std::vector<AlgorithmSpec> grid_candidates(const AlgorithmSpec& algo) {
  constexpr int kPoints = 7;
  auto log_space = [](double lo, double hi, int i) {
    return lo * std::pow(hi / lo, static_cast<double>(i) / (kPoints - 1));
  };
  std::vector<AlgorithmSpec> grid;
  for (int i = 0; i < kPoints; ++i) {
    for (int j = 0; j < kPoints; ++j) {
      AlgorithmSpec c = algo;
      c.grid_optimized = false;
      c.mu = log_space(1e-4, 1e-1, i);
      c.rho = log_space(1e-6, 1e-2, j);
      c.tag = algo.tag + "#" + std::to_string(i) + "," + std::to_string(j);
      grid.push_back(std::move(c));
    }
  }
  return grid;
}

ExperimentConfig resolve_grids(const ExperimentConfig& config) {
  ExperimentConfig resolved = config;
  for (auto& algo : resolved.algorithms) {
    if (is_lms_kind(algo.kind) && algo.grid_optimized) {
      const LmsConfig best = grid_optimize_lms(config, algo);
      algo.mu = best.mu;
      algo.rho = best.rho;
      algo.grid_optimized = false;
    }
  }
  return resolved;
}

}  // namespace

double normalized_sq_error(const Vector& h, const Vector& truth) {
  const double energy = truth.squaredNorm();
  const double err = (h - truth).squaredNorm();
  if (energy == 0.0) return err == 0.0 ? 0.0 : kInf;
  return err / energy;
}

double to_db(double mean_normalized_sq) {
  if (!(mean_normalized_sq > 0.0)) return kDbFloor;
  return std::clamp(10.0 * std::log10(mean_normalized_sq), kDbFloor, kDbCeil);
}

void AlgorithmSpec::validate() const {
  require(!tag.empty(), "AlgorithmSpec: empty tag");
  require(q >= 1, "AlgorithmSpec: q must be positive");
  require(!slab_eps || *slab_eps >= 0.0, "AlgorithmSpec: eps must be nonnegative");
  require(!radius || *radius > 0.0, "AlgorithmSpec: delta must be positive");
  require(step_fraction > 0.0 && step_fraction < 2.0,
          "AlgorithmSpec: kappa must lie in (0, 2)");
  require(eps_prime > 0.0, "AlgorithmSpec: eps_prime must be positive");
  require(mu > 0.0, "AlgorithmSpec: mu must be positive");
  require(rho >= 0.0, "AlgorithmSpec: rho must be nonnegative");
  require(eta_inv > 0.0, "AlgorithmSpec: eta_inv must be positive");
  require(lasso_max_iter >= 1, "AlgorithmSpec: lasso_max_iter must be positive");
  require(lasso_tol >= 0.0, "AlgorithmSpec: lasso_tol must be nonnegative");
  require(radius_scale > 0.0 && eps_scale >= 0.0 && mu_scale > 0.0 && rho_scale >= 0.0,
          "AlgorithmSpec: invalid sweep scale");
  require(detector.window >= 1 && detector.ratio > 0.0, "AlgorithmSpec: invalid detector");
}

void ExperimentConfig::validate() const {
  scenario.validate();
  require(n_iters >= 1, "ExperimentConfig: iterations must be positive");
  require(n_trials >= 1, "ExperimentConfig: trials must be positive");
  require(eval_iteration >= 1 && eval_iteration <= n_iters,
          "ExperimentConfig: eval_iteration must lie in [1, iterations]");
  require(!algorithms.empty(), "ExperimentConfig: no algorithms configured");
  std::set<std::string> tags;
  for (const auto& algo : algorithms) {
    algo.validate();
    require(tags.insert(algo.tag).second,
            "ExperimentConfig: duplicate algorithm tag '" + algo.tag + "'");
  }
}

TrialResult run_trial(const ExperimentConfig& config, std::int64_t trial_index) {
  config.validate();
  ScenarioSpec scenario = config.scenario;
  scenario.seed = Rng::mix(config.master_seed, static_cast<std::uint64_t>(trial_index));
  MeasurementStream stream(scenario);

  std::vector<MeasurementStream::Sample> samples;
  samples.reserve(static_cast<size_t>(config.n_iters));
  for (int k = 0; k < config.n_iters; ++k) samples.push_back(stream.next());

  TrialResult result;
  result.err.reserve(config.algorithms.size());
  for (const auto& algo : config.algorithms) {
    try {
      result.err.push_back(run_algorithm(algo, config, samples, stream));
    } catch (const std::exception& ex) {
      result.valid = false;
      result.failure = algo.tag + ": " + ex.what();
      return result;
    }
  }
  return result;
}

std::vector<MseTrace> run_ensemble(const ExperimentConfig& config) {
  config.validate();
  const ExperimentConfig resolved = resolve_grids(config);
  const size_t n_algos = resolved.algorithms.size();
  const auto iters = static_cast<size_t>(resolved.n_iters);

  std::vector<std::vector<double>> acc(n_algos, std::vector<double>(iters, 0.0));
  std::int64_t valid = 0;
  // Trials are independent and could run in parallel; the accumulation below
  // is kept in trial order so results never depend on completion order.
  for (int t = 0; t < resolved.n_trials; ++t) {
    const TrialResult trial = run_trial(resolved, t);
    if (!trial.valid) continue;
    ++valid;
    for (size_t a = 0; a < n_algos; ++a)
      for (size_t k = 0; k < iters; ++k) acc[a][k] += trial.err[a][k];
  }
  if (valid == 0) throw std::runtime_error("run_ensemble: all trials invalid");

  const std::uint64_t hash = config_hash(config);
  std::vector<MseTrace> traces;
  traces.reserve(n_algos);
  for (size_t a = 0; a < n_algos; ++a) {
    MseTrace trace;
    trace.tag = resolved.algorithms[a].tag;
    trace.config_hash = hash;
    trace.master_seed = resolved.master_seed;
    trace.db.resize(iters);
    for (size_t k = 0; k < iters; ++k)
      trace.db[k] = to_db(acc[a][k] / static_cast<double>(valid));
    traces.push_back(std::move(trace));
  }
  return traces;
}

LmsConfig grid_optimize_lms(const ExperimentConfig& config, const AlgorithmSpec& algo) {
  require(is_lms_kind(algo.kind), "grid_optimize_lms: not an LMS algorithm");
  ExperimentConfig grid_cfg = config;
  grid_cfg.algorithms = grid_candidates(algo);
  grid_cfg.n_iters = config.eval_iteration;  // only the readout iteration matters
  grid_cfg.eval_iteration = config.eval_iteration;

  const size_t n = grid_cfg.algorithms.size();
  std::vector<double> acc(n, 0.0);
  std::int64_t valid = 0;
  for (int t = 0; t < grid_cfg.n_trials; ++t) {
    const TrialResult trial = run_trial(grid_cfg, t);
    if (!trial.valid) continue;
    ++valid;
    for (size_t a = 0; a < n; ++a) acc[a] += trial.err[a].back();
  }
  if (valid == 0) throw std::runtime_error("grid_optimize_lms: all trials invalid");

  size_t best = 0;
  for (size_t a = 1; a < n; ++a)
    if (acc[a] < acc[best]) best = a;
  return LmsConfig{grid_cfg.algorithms[best].mu, grid_cfg.algorithms[best].rho,
                   algo.eta_inv};
}

SweepTable sensitivity_sweep(const ExperimentConfig& config, const std::string& parameter,
                             const std::vector<double>& deviations) {
  config.validate();
  require(parameter == "delta" || parameter == "eps" || parameter == "mu" ||
              parameter == "rho",
          "sensitivity_sweep: parameter must be one of delta, eps, mu, rho");

  // Optimize grid baselines once at the base point; deviations then perturb
  // the optimized values.
  const ExperimentConfig base = resolve_grids(config);

  SweepTable table;
  table.parameter = parameter;
  table.eval_iteration = base.eval_iteration;
  for (const auto& algo : base.algorithms) table.tags.push_back(algo.tag);

  for (double deviation : deviations) {
    SweepEntry entry;
    entry.deviation = deviation;
    const double factor = 1.0 + deviation;

    bool valid = true;
    ExperimentConfig mod = base;
    for (auto& algo : mod.algorithms) {
      if (parameter == "delta") {
        if (algo.kind == AlgorithmSpec::Kind::apwl1 ||
            algo.kind == AlgorithmSpec::Kind::apl1 ||
            algo.kind == AlgorithmSpec::Kind::lasso) {
          if (factor <= 0.0) valid = false;
          algo.radius_scale *= factor;
        }
      } else if (parameter == "eps") {
        if (is_filter_kind(algo.kind)) {
          if (factor < 0.0) valid = false;
          algo.eps_scale *= factor;
        }
      } else if (parameter == "mu") {
        if (is_lms_kind(algo.kind)) {
          if (factor <= 0.0) valid = false;
          algo.mu_scale *= factor;
        }
      } else {  // rho
        if (is_lms_kind(algo.kind)) {
          if (factor < 0.0) valid = false;
          algo.rho_scale *= factor;
        }
      }
    }

    if (!valid) {
      entry.valid = false;
      table.rows.push_back(std::move(entry));
      continue;
    }
    const auto traces = run_ensemble(mod);
    for (const auto& trace : traces)
      entry.mse_db.push_back(trace.db[static_cast<size_t>(base.eval_iteration - 1)]);
    table.rows.push_back(std::move(entry));
  }
  return table;
}

std::string render_csv(const std::vector<MseTrace>& traces) {
  require(!traces.empty(), "render_csv: no traces");
  const size_t iters = traces.front().db.size();
  for (const auto& trace : traces)
    require(trace.db.size() == iters, "render_csv: trace length mismatch");

  std::string out = "iteration";
  for (const auto& trace : traces) out += "," + trace.tag;
  out += "\n";
  char buf[64];
  for (size_t k = 0; k < iters; ++k) {
    std::snprintf(buf, sizeof buf, "%zu", k + 1);
    out += buf;
    for (const auto& trace : traces) {
      std::snprintf(buf, sizeof buf, ",%.10g", trace.db[k]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::vector<std::vector<double>> parse_csv(std::istream& in,
                                           std::vector<std::string>* tags) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "parse_csv: empty input");
  if (tags) {
    tags->clear();
    std::stringstream header(line);
    std::string cell;
    bool first = true;
    while (std::getline(header, cell, ',')) {
      if (!first) tags->push_back(cell);
      first = false;
    }
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

ExportPaths export_results(const std::vector<MseTrace>& traces, const std::string& out_dir,
                           const std::string& config_text) {
  require(!traces.empty(), "export_results: no traces");
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  ExportPaths paths;
  paths.csv = (fs::path(out_dir) / "results.csv").string();
  paths.json = (fs::path(out_dir) / "results.json").string();
  paths.gnuplot = (fs::path(out_dir) / "results.gp").string();

  {
    std::ofstream csv(paths.csv, std::ios::binary);
    if (!csv) throw std::runtime_error("export_results: cannot write " + paths.csv);
    csv << render_csv(traces);
  }
  {
    nlohmann::json j;
    j["master_seed"] = traces.front().master_seed;
    j["config_hash"] = traces.front().config_hash;
    j["git_describe"] = kGitDescribe;
    j["config"] = config_text;
    j["iterations"] = traces.front().db.size();
    j["tags"] = nlohmann::json::array();
    for (const auto& trace : traces) j["tags"].push_back(trace.tag);
    std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["created_utc"] = stamp;
    std::ofstream json_out(paths.json, std::ios::binary);
    if (!json_out) throw std::runtime_error("export_results: cannot write " + paths.json);
    json_out << j.dump(2) << "\n";
  }
  {
    std::ofstream gp(paths.gnuplot, std::ios::binary);
    if (!gp) throw std::runtime_error("export_results: cannot write " + paths.gnuplot);
    gp << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set xlabel 'iteration'\n"
       << "set ylabel 'normalized MSE (dB)'\n"
       << "plot for [i=2:" << traces.size() + 1 << "] 'results.csv' using 1:i with lines\n";
  }
  return paths;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, const std::string& key) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config: bad number for '" + key + "': " + value);
  }
}

std::int64_t parse_int(const std::string& value, const std::string& key) {
  try {
    size_t used = 0;
    const std::int64_t v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config: bad integer for '" + key + "': " + value);
  }
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config: bad boolean for '" + key + "': " + value);
}

std::optional<double> parse_auto(const std::string& value, const std::string& key) {
  if (value == "auto") return std::nullopt;
  return parse_double(value, key);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_auto(const std::optional<double>& v) { return v ? fmt(*v) : "auto"; }

void apply_scenario_key(ScenarioSpec& s, const std::string& key, const std::string& value) {
  if (key == "kind") {
    if (value == "reconstruction") s.kind = ScenarioKind::reconstruction;
    else if (value == "sysid") s.kind = ScenarioKind::sysid;
    else if (value == "timevarying") s.kind = ScenarioKind::timevarying;
    else throw std::invalid_argument("config: unknown scenario kind '" + value + "'");
  } else if (key == "dim") {
    s.dim = static_cast<int>(parse_int(value, key));
  } else if (key == "sparsity") {
    s.sparsity = static_cast<int>(parse_int(value, key));
  } else if (key == "noise_var") {
    s.noise_var = parse_double(value, key);
  } else if (key == "amplitude") {
    if (value == "unit") s.amplitude = AmplitudeDist::unit;
    else if (value == "gaussian") s.amplitude = AmplitudeDist::gaussian;
    else throw std::invalid_argument("config: unknown amplitude '" + value + "'");
  } else if (key == "sensing") {
    if (value == "gaussian") s.sensing = SensingDist::gaussian;
    else if (value == "bernoulli") s.sensing = SensingDist::bernoulli;
    else throw std::invalid_argument("config: unknown sensing '" + value + "'");
  } else if (key == "seed") {
    s.seed = static_cast<std::uint64_t>(parse_int(value, key));
  } else {
    throw std::invalid_argument("config: unknown scenario key '" + key + "'");
  }
}

void apply_experiment_key(ExperimentConfig& c, const std::string& key,
                          const std::string& value) {
  if (key == "iterations") c.n_iters = static_cast<int>(parse_int(value, key));
  else if (key == "trials") c.n_trials = static_cast<int>(parse_int(value, key));
  else if (key == "eval_iteration") c.eval_iteration = static_cast<int>(parse_int(value, key));
  else if (key == "master_seed") c.master_seed = static_cast<std::uint64_t>(parse_int(value, key));
  else if (key == "out_dir") c.out_dir = value;
  else throw std::invalid_argument("config: unknown experiment key '" + key + "'");
}

void apply_algorithm_key(AlgorithmSpec& a, const std::string& key, const std::string& value) {
  if (key == "type") a.kind = kind_from_name(value);
  else if (key == "tag") a.tag = value;
  else if (key == "q") a.q = static_cast<int>(parse_int(value, key));
  else if (key == "eps") a.slab_eps = parse_auto(value, key);
  else if (key == "delta") a.radius = parse_auto(value, key);
  else if (key == "kappa") a.step_fraction = parse_double(value, key);
  else if (key == "eps_prime") a.eps_prime = parse_double(value, key);
  else if (key == "schedule") {
    if (value == "decaying") a.eps_prime_mode = EpsPrimeMode::decaying;
    else if (value == "decaying-with-reset") a.eps_prime_mode = EpsPrimeMode::decaying_with_reset;
    else throw std::invalid_argument("config: unknown schedule '" + value + "'");
  } else if (key == "detector_ratio") a.detector.ratio = parse_double(value, key);
  else if (key == "detector_window") a.detector.window = static_cast<int>(parse_int(value, key));
  else if (key == "mu") a.mu = parse_double(value, key);
  else if (key == "rho") a.rho = parse_double(value, key);
  else if (key == "eta_inv") a.eta_inv = parse_double(value, key);
  else if (key == "grid") a.grid_optimized = parse_bool(value, key);
  else if (key == "lasso_max_iter") a.lasso_max_iter = static_cast<int>(parse_int(value, key));
  else if (key == "lasso_tol") a.lasso_tol = parse_double(value, key);
  else throw std::invalid_argument("config: unknown algorithm key '" + key + "'");
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  cfg.algorithms.clear();
  std::string line;
  std::string section;
  AlgorithmSpec* algo = nullptr;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section == "algorithm") {
        cfg.algorithms.emplace_back();
        algo = &cfg.algorithms.back();
      } else if (section != "scenario" && section != "experiment") {
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unknown section '" + section + "'");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section == "scenario") apply_scenario_key(cfg.scenario, key, value);
    else if (section == "experiment") apply_experiment_key(cfg, key, value);
    else if (section == "algorithm") apply_algorithm_key(*algo, key, value);
    else
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": key outside any section");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& config) {
  std::ostringstream out;
  const auto& s = config.scenario;
  out << "[scenario]\n";
  out << "kind = "
      << (s.kind == ScenarioKind::reconstruction
              ? "reconstruction"
              : s.kind == ScenarioKind::sysid ? "sysid" : "timevarying")
      << "\n";
  out << "dim = " << s.dim << "\n";
  out << "sparsity = " << s.sparsity << "\n";
  out << "noise_var = " << fmt(s.noise_var) << "\n";
  out << "amplitude = " << (s.amplitude == AmplitudeDist::unit ? "unit" : "gaussian")
      << "\n";
  out << "sensing = " << (s.sensing == SensingDist::gaussian ? "gaussian" : "bernoulli")
      << "\n";
  out << "seed = " << s.seed << "\n";

  out << "\n[experiment]\n";
  out << "iterations = " << config.n_iters << "\n";
  out << "trials = " << config.n_trials << "\n";
  out << "eval_iteration = " << config.eval_iteration << "\n";
  out << "master_seed = " << config.master_seed << "\n";
  out << "out_dir = " << config.out_dir << "\n";

  for (const auto& a : config.algorithms) {
    out << "\n[algorithm]\n";
    out << "type = " << kind_name(a.kind) << "\n";
    out << "tag = " << a.tag << "\n";
    if (is_filter_kind(a.kind)) {
      out << "q = " << a.q << "\n";
      out << "eps = " << fmt_auto(a.slab_eps) << "\n";
      out << "delta = " << fmt_auto(a.radius) << "\n";
      out << "kappa = " << fmt(a.step_fraction) << "\n";
      out << "eps_prime = " << fmt(a.eps_prime) << "\n";
      out << "schedule = "
          << (a.eps_prime_mode == EpsPrimeMode::decaying ? "decaying"
                                                         : "decaying-with-reset")
          << "\n";
      out << "detector_ratio = " << fmt(a.detector.ratio) << "\n";
      out << "detector_window = " << a.detector.window << "\n";
    } else if (is_lms_kind(a.kind)) {
      out << "mu = " << fmt(a.mu) << "\n";
      out << "rho = " << fmt(a.rho) << "\n";
      out << "eta_inv = " << fmt(a.eta_inv) << "\n";
      out << "grid = " << (a.grid_optimized ? "true" : "false") << "\n";
    } else if (a.kind == AlgorithmSpec::Kind::lasso) {
      out << "delta = " << fmt_auto(a.radius) << "\n";
      out << "lasso_max_iter = " << a.lasso_max_iter << "\n";
      out << "lasso_tol = " << fmt(a.lasso_tol) << "\n";
    }
  }
  return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  // FNV-1a over the canonical serialization.
  const std::string text = serialize_config(config);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace apwl1
