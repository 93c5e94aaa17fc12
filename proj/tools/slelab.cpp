#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "slelab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"SLE Green's-function laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_override, trace_path, svg_out;
  std::uint64_t seed_override = 0;
  int workers_override = 0;
  bool have_seed = false;

  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "JSON config file")->required();
  run->add_option("--out", out_override, "override output directory");
  run->add_option("--seed", seed_override, "override master seed")
      ->each([&](const std::string&) { have_seed = true; });
  run->add_option("--workers", workers_override, "override worker count");

  auto* validate = app.add_subcommand("validate", "validate a config without running");
  validate->add_option("config", config_path, "JSON config file")->required();

  auto* render = app.add_subcommand("render", "render a traces.json to SVG");
  render->add_option("trace-file", trace_path, "traces.json from a run")->required();
  render->add_option("--out", svg_out, "output SVG path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(validate)) {
      const auto cfg = slelab::load_config(config_path);
      const auto errors = slelab::validate_config(cfg);
      if (!errors.empty()) {
        std::cerr << "{\"errors\":[";
        for (std::size_t i = 0; i < errors.size(); ++i) {
          std::cerr << (i ? "," : "") << '"' << errors[i] << '"';
        }
        std::cerr << "]}\n";
        return 2;
      }
      std::cout << "ok\n";
      return 0;
    }
    if (app.got_subcommand(run)) {
      auto cfg = slelab::load_config(config_path);
      if (!out_override.empty()) cfg.output_dir = out_override;
      if (have_seed) cfg.master_seed = seed_override;
      if (workers_override > 0) cfg.workers = workers_override;
      const auto rows = slelab::run_experiment(cfg);
      std::cout << "wrote " << rows.size() << " rows to " << cfg.output_dir
                << "/results.csv\n";
      return 0;
    }
    if (app.got_subcommand(render)) {
      if (svg_out.empty()) svg_out = trace_path + ".svg";
      slelab::render_trace_file(trace_path, svg_out);
      std::cout << "wrote " << svg_out << "\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "{\"errors\":" << e.what() << "}\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
