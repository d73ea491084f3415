#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dilatlab/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"dilatlab - numerical laboratory for metric spaces with dilations"};
  std::string kind, config_path, out_dir, a_file, b_file, mode = "exact";
  long long seed = -1;
  app.add_option("kind", kind,
                 "experiment kind (metric, groupoid, gh, length, axioms, "
                 "tangent, profile, rnp, tempered, gamma, equivalence)")
      ->required();
  app.add_option("--config", config_path, "experiment config file");
  app.add_option("--out", out_dir, "output directory for report and ladders");
  app.add_option("--seed", seed, "seed override");
  app.add_option("--a", a_file, "first sample file (gh shortcut)");
  app.add_option("--b", b_file, "second sample file (gh shortcut)");
  app.add_option("--mode", mode, "gh search mode: exact|heuristic");
  CLI11_PARSE(app, argc, argv);

  dilatlab::ExperimentConfig config;
  try {
    if (kind == "gh" && config_path.empty()) {
      if (a_file.empty() || b_file.empty()) {
        std::cerr << "gh without --config needs --a and --b\n";
        return 2;
      }
      config.kv = {{"kind", "gh"},
                   {"a_file", a_file},
                   {"b_file", b_file},
                   {"mode", mode}};
    } else {
      if (config_path.empty()) {
        std::cerr << "missing --config\n";
        return 2;
      }
      config = dilatlab::ExperimentConfig::parse_file(config_path);
      if (config.kv.count("kind") && config.kv.at("kind") != kind) {
        std::cerr << "config kind '" << config.kv.at("kind")
                  << "' does not match command '" << kind << "'\n";
        return 2;
      }
      config.kv["kind"] = kind;
    }
    if (seed >= 0) config.kv["seed"] = std::to_string(seed);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const dilatlab::RunResult result = dilatlab::run(config, out_dir);
  const auto t1 = std::chrono::steady_clock::now();
  const double secs =
      std::chrono::duration_cast<std::chrono::duration<double>>(t1 - t0).count();

  if (result.exit_code == 2) {
    std::cerr << result.report.value("error", "validation error") << "\n";
    return 2;
  }
  if (kind == "gh" && config_path.empty()) {
    // shortcut form prints just the GhResult object
    const auto& entry = result.report["checks"][0];
    nlohmann::json gh{{"mu", entry["mu"]},
                      {"relation", entry["relation"]},
                      {"breakdown", entry["breakdown"]}};
    std::cout << gh.dump(2) << "\n";
  } else {
    std::cout << result.report.dump(2) << "\n";
  }
  std::fprintf(stderr, "wall-clock: %.3fs\n", secs);
  return result.exit_code;
}
