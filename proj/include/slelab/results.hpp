#pragma once
#include <string>
#include <vector>

namespace slelab {

// One emitted experiment cell.  Every row echoes enough parameters to re-run
// itself in isolation.  wall_ms is informational and excluded from
// determinism comparisons.
struct ResultRow {
  std::string experiment_id;
  double kappa = 0.0;
  int n_points = 0;
  std::string points;  // "re:im;re:im" (no commas, CSV-safe)
  std::string radii;   // "r1;r2"
  std::size_t n_samples = 0;
  double dt = 0.0;
  double truncation_factor = 0.0;
  std::uint64_t seed = 0;
  double raw_p = 0.0;
  double stderr_ = 0.0;
  double rescaled = 0.0;
  double ratio_to_F = 0.0;
  double wall_ms = 0.0;
};

// Fixed column order; numbers with 12 significant digits.
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);
void emit_json(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> read_json_rows(const std::string& path);

std::string format_g12(double v);

}  // namespace slelab
