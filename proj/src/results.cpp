#include "slelab/results.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace slelab {

std::string format_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

const char* kHeader =
    "experiment_id,kappa,n_points,points,radii,n_samples,dt,"
    "truncation_factor,seed,raw_p,stderr,rescaled,ratio_to_F,wall_ms";

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out = open_out(path);
  out << kHeader << "\n";
  for (const ResultRow& r : rows) {
    out << r.experiment_id << ',' << format_g12(r.kappa) << ',' << r.n_points
        << ',' << r.points << ',' << r.radii << ',' << r.n_samples << ','
        << format_g12(r.dt) << ',' << format_g12(r.truncation_factor) << ','
        << r.seed << ',' << format_g12(r.raw_p) << ',' << format_g12(r.stderr_)
        << ',' << format_g12(r.rescaled) << ',' << format_g12(r.ratio_to_F)
        << ',' << format_g12(r.wall_ms) << "\n";
  }
}

void emit_json(const std::vector<ResultRow>& rows, const std::string& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const ResultRow& r : rows) {
    arr.push_back({{"experiment_id", r.experiment_id},
                   {"kappa", r.kappa},
                   {"n_points", r.n_points},
                   {"points", r.points},
                   {"radii", r.radii},
                   {"n_samples", r.n_samples},
                   {"dt", r.dt},
                   {"truncation_factor", r.truncation_factor},
                   {"seed", r.seed},
                   {"raw_p", r.raw_p},
                   {"stderr", r.stderr_},
                   {"rescaled", r.rescaled},
                   {"ratio_to_F", r.ratio_to_F},
                   {"wall_ms", r.wall_ms}});
  }
  std::ofstream out = open_out(path);
  out << arr.dump(2) << "\n";
}

std::vector<ResultRow> read_json_rows(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  nlohmann::json arr = nlohmann::json::parse(in);
  std::vector<ResultRow> rows;
  rows.reserve(arr.size());
  for (const auto& j : arr) {
    ResultRow r;
    r.experiment_id = j.at("experiment_id").get<std::string>();
    r.kappa = j.at("kappa").get<double>();
    r.n_points = j.at("n_points").get<int>();
    r.points = j.at("points").get<std::string>();
    r.radii = j.at("radii").get<std::string>();
    r.n_samples = j.at("n_samples").get<std::size_t>();
    r.dt = j.at("dt").get<double>();
    r.truncation_factor = j.at("truncation_factor").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.raw_p = j.at("raw_p").get<double>();
    r.stderr_ = j.at("stderr").get<double>();
    r.rescaled = j.at("rescaled").get<double>();
    r.ratio_to_F = j.at("ratio_to_F").get<double>();
    r.wall_ms = j.at("wall_ms").get<double>();
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace slelab
