#include "slelab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "slelab/svg.hpp"

namespace slelab {

namespace {

using nlohmann::json;

const std::vector<std::pair<std::string, ExperimentKind>> kKinds = {
    {"one_point_convergence", ExperimentKind::one_point_convergence},
    {"two_point_bounds", ExperimentKind::two_point_bounds},
    {"martingale", ExperimentKind::martingale},
    {"ghat_crosscheck", ExperimentKind::ghat_crosscheck},
    {"scaling", ExperimentKind::scaling},
    {"pde_check", ExperimentKind::pde_check},
    {"hull_checks", ExperimentKind::hull_checks},
};

std::string kind_name(ExperimentKind k) {
  for (const auto& [name, kind] : kKinds) {
    if (kind == k) return name;
  }
  return "?";
}

std::string encode_points(const std::vector<cplx>& pts) {
  std::ostringstream os;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) os << ';';
    os << format_g12(pts[i].real()) << ':' << format_g12(pts[i].imag());
  }
  return os.str();
}

std::string encode_radii(const std::vector<double>& rs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (i) os << ';';
    os << format_g12(rs[i]);
  }
  return os.str();
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

Scenario scenario_from(const ExperimentConfig& cfg) {
  Scenario s;
  s.kappa = kappa_params(cfg.kappa);
  s.points = cfg.points;
  s.radii = cfg.radii;
  s.n_samples = cfg.n_samples;
  s.dt = cfg.dt;
  s.truncation_factor = cfg.truncation_factor;
  s.master_seed = cfg.master_seed;
  s.workers = cfg.workers;
  return s;
}

ResultRow base_row(const ExperimentConfig& cfg, const std::string& id) {
  ResultRow r;
  r.experiment_id = id;
  r.kappa = cfg.kappa;
  r.n_points = static_cast<int>(cfg.points.size());
  r.points = encode_points(cfg.points);
  r.n_samples = cfg.n_samples;
  r.dt = cfg.dt;
  r.truncation_factor = cfg.truncation_factor;
  r.seed = cfg.master_seed;
  return r;
}

ResultRow estimate_row(const ExperimentConfig& cfg, const std::string& id,
                       const std::vector<double>& radii,
                       const GreenEstimate& raw, double f_value) {
  ResultRow r = base_row(cfg, id);
  r.radii = encode_radii(radii);
  r.raw_p = raw.mean;
  r.stderr_ = raw.stderr_;
  double factor = 1.0;
  const double d = 1.0 + cfg.kappa / 8.0;
  for (double rad : radii) factor *= std::pow(rad, d - 2.0);
  r.rescaled = raw.mean * factor;
  r.ratio_to_F = f_value > 0.0 ? raw.mean / f_value : 0.0;
  return r;
}

void write_traces_json(const ExperimentConfig& cfg,
                       const std::vector<CurveTrace>& traces,
                       const std::string& path) {
  json doc;
  doc["traces"] = json::array();
  for (const CurveTrace& tr : traces) {
    json jt;
    jt["dt"] = tr.driving.dt;
    json tips = json::array();
    for (const cplx& p : tr.tips) tips.push_back({p.real(), p.imag()});
    jt["tips"] = std::move(tips);
    doc["traces"].push_back(std::move(jt));
  }
  doc["targets"] = json::array();
  for (const cplx& z : cfg.points) doc["targets"].push_back({z.real(), z.imag()});
  doc["radii"] = cfg.radii;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace

std::string default_output_dir() {
  if (const char* env = std::getenv("SLELAB_OUT_DIR")) return env;
  return ".";
}

ExperimentConfig config_from_json_text(const std::string& text) {
  std::vector<std::string> errors;
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(json::array({std::string("json: ") + e.what()}).dump());
  }
  static const std::vector<std::string> allowed = {
      "experiment", "kappa",       "points",   "radii",      "schedule",
      "n_samples",  "dt",          "truncation_factor",      "c_hat",
      "master_seed", "workers",    "output_dir", "times",    "rho1",
      "lambda",     "step",        "emit_traces"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      errors.push_back("unknown field: " + it.key());
    }
  }
  ExperimentConfig cfg;
  try {
    const std::string kind = j.at("experiment").get<std::string>();
    bool found = false;
    for (const auto& [name, k] : kKinds) {
      if (name == kind) {
        cfg.kind = k;
        found = true;
      }
    }
    if (!found) errors.push_back("experiment: unknown kind '" + kind + "'");
  } catch (const std::exception&) {
    errors.push_back("experiment: missing or not a string");
  }
  auto get_double = [&](const char* key, double& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) {
      errors.push_back(std::string(key) + ": must be a number");
    } else {
      dst = j[key].get<double>();
    }
  };
  get_double("kappa", cfg.kappa);
  get_double("dt", cfg.dt);
  get_double("truncation_factor", cfg.truncation_factor);
  get_double("rho1", cfg.rho1);
  get_double("lambda", cfg.lambda);
  get_double("step", cfg.step);
  if (j.contains("c_hat")) {
    if (!j["c_hat"].is_number()) {
      errors.push_back("c_hat: must be a number");
    } else {
      cfg.c_hat = j["c_hat"].get<double>();
    }
  }
  if (j.contains("n_samples")) {
    if (!j["n_samples"].is_number_unsigned()) {
      errors.push_back("n_samples: must be a nonnegative integer");
    } else {
      cfg.n_samples = j["n_samples"].get<std::size_t>();
    }
  }
  if (j.contains("master_seed")) {
    if (!j["master_seed"].is_number_unsigned()) {
      errors.push_back("master_seed: must be a nonnegative integer");
    } else {
      cfg.master_seed = j["master_seed"].get<std::uint64_t>();
    }
  }
  if (j.contains("workers")) {
    if (!j["workers"].is_number_integer()) {
      errors.push_back("workers: must be an integer");
    } else {
      cfg.workers = j["workers"].get<int>();
    }
  }
  if (j.contains("emit_traces")) {
    if (!j["emit_traces"].is_number_integer()) {
      errors.push_back("emit_traces: must be an integer");
    } else {
      cfg.emit_traces = j["emit_traces"].get<int>();
    }
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) {
      errors.push_back("output_dir: must be a string");
    } else {
      cfg.output_dir = j["output_dir"].get<std::string>();
    }
  }
  if (j.contains("points")) {
    if (!j["points"].is_array()) {
      errors.push_back("points: must be an array of [re, im] pairs");
    } else {
      for (const auto& p : j["points"]) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
          errors.push_back("points: each entry must be [re, im]");
          break;
        }
        cfg.points.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
    }
  }
  auto get_double_list = [&](const char* key, std::vector<double>& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_array()) {
      errors.push_back(std::string(key) + ": must be an array of numbers");
      return;
    }
    for (const auto& v : j[key]) {
      if (!v.is_number()) {
        errors.push_back(std::string(key) + ": must be an array of numbers");
        return;
      }
      dst.push_back(v.get<double>());
    }
  };
  get_double_list("radii", cfg.radii);
  get_double_list("times", cfg.times);
  if (j.contains("schedule")) {
    if (!j["schedule"].is_array()) {
      errors.push_back("schedule: must be an array of radii lists");
    } else {
      for (const auto& entry : j["schedule"]) {
        std::vector<double> rs;
        if (!entry.is_array()) {
          errors.push_back("schedule: each entry must be an array");
          break;
        }
        for (const auto& v : entry) rs.push_back(v.get<double>());
        cfg.schedule.push_back(std::move(rs));
      }
    }
  }
  if (!errors.empty()) throw std::invalid_argument(json(errors).dump());
  if (cfg.output_dir.empty()) cfg.output_dir = default_output_dir();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument(
        json::array({"config: cannot open " + path}).dump());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> errors;
  if (!(cfg.kappa > 0.0 && cfg.kappa < 8.0)) {
    errors.push_back("kappa: must satisfy kappa in (0,8)");
  }
  const bool needs_mc = cfg.kind != ExperimentKind::pde_check &&
                        cfg.kind != ExperimentKind::hull_checks;
  if (cfg.points.empty() && cfg.kind != ExperimentKind::hull_checks) {
    errors.push_back("points: at least one point required");
  }
  if (needs_mc && cfg.n_samples == 0) {
    errors.push_back("n_samples: must be positive");
  }
  if (!(cfg.dt > 0.0)) errors.push_back("dt: must be positive");
  if (cfg.workers < 1) errors.push_back("workers: must be >= 1");
  if (errors.empty() && needs_mc) {
    try {
      Scenario s = scenario_from(cfg);
      if (s.radii.empty() && !cfg.schedule.empty()) s.radii = cfg.schedule.front();
      validate_scenario(s);
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
  }
  if (cfg.kind == ExperimentKind::one_point_convergence && cfg.schedule.empty() &&
      cfg.radii.empty()) {
    errors.push_back("schedule: required for one_point_convergence");
  }
  if (cfg.kind == ExperimentKind::martingale && cfg.times.empty()) {
    errors.push_back("times: required for martingale");
  }
  if (cfg.kind == ExperimentKind::ghat_crosscheck && cfg.points.size() != 2) {
    errors.push_back("points: ghat_crosscheck needs exactly two points");
  }
  return errors;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  {
    const auto errors = validate_config(cfg);
    if (!errors.empty()) throw std::invalid_argument(json(errors).dump());
  }
  const Kappa k = kappa_params(cfg.kappa);
  std::vector<ResultRow> rows;
  const auto t0 = std::chrono::steady_clock::now();

  switch (cfg.kind) {
    case ExperimentKind::one_point_convergence: {
      auto schedule = cfg.schedule;
      if (schedule.empty()) schedule.push_back(cfg.radii);
      Scenario s = scenario_from(cfg);
      s.radii = schedule.front();
      const auto sweep = convergence_sweep(s, schedule);
      const PointConfig pc = config_quantities(cfg.points);
      for (std::size_t i = 0; i < sweep.size(); ++i) {
        const double f = f_radii(k, pc, schedule[i]).value;
        GreenEstimate raw = sweep[i];
        double factor = 1.0;
        for (double rad : schedule[i]) factor *= std::pow(rad, k.d - 2.0);
        raw.mean /= factor;  // sweep returns rescaled values
        raw.stderr_ /= factor;
        ResultRow row = estimate_row(cfg, "convergence[" + std::to_string(i) + "]",
                                     schedule[i], raw, f);
        row.wall_ms = elapsed_ms(t0);
        rows.push_back(row);
      }
      break;
    }
    case ExperimentKind::two_point_bounds: {
      Scenario s = scenario_from(cfg);
      const PointConfig pc = config_quantities(cfg.points);
      std::vector<double> half = cfg.radii;
      for (double& r : half) r *= 0.5;
      const double t_max = 0.5 * std::pow(cfg.truncation_factor *
                                              std::abs(*std::max_element(
                                                  cfg.points.begin(), cfg.points.end(),
                                                  [](cplx a, cplx b) {
                                                    return std::abs(a) < std::abs(b);
                                                  })),
                                          2.0);
      const auto counts = run_hit_mc(s, {HitArm{cfg.radii, t_max}, HitArm{half, t_max}});
      const std::vector<std::vector<double>> arms = {cfg.radii, half};
      for (std::size_t a = 0; a < arms.size(); ++a) {
        GreenEstimate raw;
        raw.n_samples = cfg.n_samples;
        raw.n_hits = counts[a].all_hit;
        raw.mean = static_cast<double>(counts[a].all_hit) / cfg.n_samples;
        raw.stderr_ = std::sqrt(raw.mean * (1 - raw.mean) / cfg.n_samples);
        const double f = f_radii(k, pc, arms[a]).value;
        ResultRow row = estimate_row(cfg, a == 0 ? "bounds[r]" : "bounds[r/2]",
                                     arms[a], raw, f);
        row.wall_ms = elapsed_ms(t0);
        rows.push_back(row);
      }
      break;
    }
    case ExperimentKind::martingale: {
      const auto res = martingale_test(k, cfg.c_hat.value_or(1.0), cfg.points.at(0),
                                       cfg.times, cfg.n_samples, cfg.dt,
                                       cfg.master_seed);
      for (std::size_t i = 0; i < res.size(); ++i) {
        ResultRow row = base_row(cfg, "martingale[t=" + format_g12(cfg.times[i]) + "]");
        row.radii = encode_radii(cfg.radii);
        row.raw_p = res[i].mean;
        row.stderr_ = res[i].stderr_;
        row.wall_ms = elapsed_ms(t0);
        rows.push_back(row);
      }
      break;
    }
    case ExperimentKind::ghat_crosscheck: {
      const cplx z1 = cfg.points[0], z2 = cfg.points[1];
      double c_hat;
      if (cfg.c_hat) {
        c_hat = *cfg.c_hat;
      } else {
        c_hat = calibrate_c_hat(k, z1, cfg.radii.at(0), cfg.n_samples, cfg.dt,
                                cfg.master_seed ^ 0xC0FFEEULL);
      }
      Scenario s = scenario_from(cfg);
      const auto visit = estimate_visit_prob(s);
      double factor = 1.0;
      for (double rad : cfg.radii) factor *= std::pow(rad, k.d - 2.0);
      GreenEstimate ordered;
      if (auto it = visit.per_permutation.find(Permutation{0, 1});
          it != visit.per_permutation.end()) {
        ordered = it->second;
      }
      ResultRow direct = base_row(cfg, "ordered_direct");
      direct.radii = encode_radii(cfg.radii);
      direct.raw_p = ordered.mean;
      direct.stderr_ = ordered.stderr_ * factor;
      direct.rescaled = ordered.mean * factor;
      direct.wall_ms = elapsed_ms(t0);
      rows.push_back(direct);

      const auto ghat = ghat_two_point(k, c_hat, z1, z2, cfg.rho1,
                                       cfg.n_samples, cfg.dt,
                                       cfg.master_seed ^ 0xBEEFULL);
      ResultRow imp = base_row(cfg, "ghat_importance");
      imp.radii = encode_radii({cfg.rho1});
      imp.raw_p = ghat.mean;
      imp.stderr_ = ghat.stderr_;
      imp.rescaled = ghat.mean;
      imp.wall_ms = elapsed_ms(t0);
      rows.push_back(imp);
      break;
    }
    case ExperimentKind::scaling: {
      Scenario s = scenario_from(cfg);
      const auto [a, b] = scaling_check(s, cfg.lambda);
      ResultRow ra = estimate_row(cfg, "scaling[base]", cfg.radii, a, 0.0);
      ra.wall_ms = elapsed_ms(t0);
      rows.push_back(ra);
      std::vector<double> scaled_r = cfg.radii;
      for (double& r : scaled_r) r *= cfg.lambda;
      ResultRow rb = estimate_row(cfg, "scaling[lambda=" + format_g12(cfg.lambda) + "]",
                                  scaled_r, b, 0.0);
      rb.wall_ms = elapsed_ms(t0);
      rows.push_back(rb);
      break;
    }
    case ExperimentKind::pde_check: {
      for (std::size_t i = 0; i < cfg.points.size(); ++i) {
        const cplx z = cfg.points[i];
        const double g = green_one_point(k, cfg.c_hat.value_or(1.0), z).value;
        const double res = pde_residual_1pt(k, cfg.c_hat.value_or(1.0), z, cfg.step);
        ResultRow row = base_row(cfg, "pde[" + std::to_string(i) + "]");
        row.raw_p = std::fabs(res) / g;
        row.wall_ms = elapsed_ms(t0);
        rows.push_back(row);
      }
      break;
    }
    case ExperimentKind::hull_checks: {
      const std::size_t ntraces = std::max<std::size_t>(1, cfg.n_samples);
      const double t_end = cfg.times.empty() ? 0.25 : cfg.times.front();
      for (std::size_t i = 0; i < ntraces; ++i) {
        const DrivingPath path = sample_driving(k, t_end, cfg.dt,
                                                mix_seed(cfg.master_seed, i));
        const CurveTrace trace = trace_curve(path);
        double rho = 0.0;
        for (const cplx& tip : trace.tips) rho = std::max(rho, std::abs(tip));
        rho += 3.0 * std::sqrt(cfg.dt);
        SplitMix64 rng(mix_seed(cfg.master_seed ^ 0x7E57ULL, i));
        double worst26 = 0.0, worst27 = 0.0;
        for (int s = 0; s < 100; ++s) {
          const double ang = 3.141592653589793 * rng.next_unit();
          const double rad = rho * (1.05 + 9.0 * rng.next_unit());
          const cplx z = std::polar(rad, ang);
          const MapState st = evolve_point(path, z, t_end);
          worst26 = std::max(worst26, std::abs(st.g - z) / (3.0 * rho));
          if (rad >= 5.0 * rho) {
            const double q = (rho / rad) * (rho / rad);
            worst27 = std::max(worst27, std::abs(st.g - z) / (2.0 * rad * q));
            worst27 = std::max(worst27, std::abs(st.gprime - 1.0) / (5.0 * q));
            worst27 = std::max(
                worst27, std::fabs(st.g.imag() - z.imag()) / (4.0 * q * z.imag()));
          }
        }
        ResultRow row = base_row(cfg, "hull[" + std::to_string(i) + "]");
        row.raw_p = worst26;
        row.rescaled = worst27;
        row.wall_ms = elapsed_ms(t0);
        rows.push_back(row);
      }
      break;
    }
  }

  std::filesystem::create_directories(cfg.output_dir);
  emit_csv(rows, cfg.output_dir + "/results.csv");
  emit_json(rows, cfg.output_dir + "/results.json");

  if (cfg.emit_traces > 0) {
    std::vector<CurveTrace> traces;
    for (int i = 0; i < cfg.emit_traces; ++i) {
      const DrivingPath path =
          sample_driving(k, 1.0, cfg.dt, mix_seed(cfg.master_seed, 1000 + i));
      traces.push_back(trace_curve(path));
    }
    ExperimentConfig marks = cfg;
    if (marks.radii.size() != marks.points.size()) {
      marks.points.clear();
      marks.radii.clear();
    }
    write_traces_json(marks, traces, cfg.output_dir + "/traces.json");
    render_traces(traces, marks.points, marks.radii,
                  cfg.output_dir + "/traces.svg");
  }
  return rows;
}

void render_trace_file(const std::string& trace_path,
                       const std::string& svg_path) {
  std::ifstream in(trace_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + trace_path);
  json doc = json::parse(in);
  std::vector<CurveTrace> traces;
  for (const auto& jt : doc.at("traces")) {
    CurveTrace tr;
    tr.driving.dt = jt.at("dt").get<double>();
    for (const auto& p : jt.at("tips")) {
      tr.tips.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    traces.push_back(std::move(tr));
  }
  std::vector<cplx> targets;
  for (const auto& p : doc.at("targets")) {
    targets.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  std::vector<double> radii = doc.at("radii").get<std::vector<double>>();
  render_traces(traces, targets, radii, svg_path);
}

}  // namespace slelab
