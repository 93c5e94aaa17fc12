#pragma once
#include <optional>
#include <string>
#include <vector>

#include "slelab/estimator.hpp"
#include "slelab/results.hpp"

namespace slelab {

enum class ExperimentKind {
  one_point_convergence,
  two_point_bounds,
  martingale,
  ghat_crosscheck,
  scaling,
  pde_check,
  hull_checks,
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::one_point_convergence;
  double kappa = 8.0 / 3.0;
  std::vector<cplx> points;
  std::vector<double> radii;
  std::vector<std::vector<double>> schedule;
  std::size_t n_samples = 0;
  double dt = 1e-4;
  double truncation_factor = 20.0;
  std::optional<double> c_hat;  // auto-calibrated when absent and needed
  std::uint64_t master_seed = 0;
  int workers = 1;
  std::string output_dir;
  std::vector<double> times;  // martingale
  double rho1 = 0.05;         // ghat_crosscheck
  double lambda = 2.0;        // scaling
  double step = 1e-4;         // pde_check
  int emit_traces = 0;
};

// Parses the strict-mode JSON config; unknown fields are errors.  On failure
// throws std::invalid_argument whose message is a JSON array of field-level
// error strings.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);

// Collects field-level validation errors; empty means runnable.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

// Runs the experiment and writes results.csv / results.json (and traces.json
// + traces.svg when emit_traces > 0) into cfg.output_dir.  Returns the rows.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

// Re-renders a traces.json file written by run_experiment.
void render_trace_file(const std::string& trace_path,
                       const std::string& svg_path);

// Default output directory: $SLELAB_OUT_DIR if set, else ".".
std::string default_output_dir();

}  // namespace slelab
