#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "halfcell/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"halfcell: ergodic constants, correctors and effective data for "
               "periodic half-space problems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  long long seed = -1;
  std::vector<std::string> overrides;
  bool quiet = false;

  app.add_option("--config", config_path, "problem configuration file")->required();
  app.add_option("--out", out_dir, "output directory for JSON/CSV artifacts");
  app.add_option("--seed", seed, "override numerics.seed");
  app.add_option("--override", overrides,
                 "config override section.key=value (repeatable)");
  app.add_flag("--quiet", quiet, "suppress the summary line");

  const std::vector<std::string> names = {"lambda", "mu", "cell", "effective",
                                          "homogenize", "mc", "bavg", "audit"};
  for (const std::string& n : names) app.add_subcommand(n)->fallthrough();

  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    halfcell::RunConfig cfg = halfcell::RunConfig::parse_file(config_path);
    for (const std::string& o : overrides) cfg.apply_override(o);
    if (seed >= 0) cfg.apply_override("numerics.seed=" + std::to_string(seed));
    if (const char* env = std::getenv("HALFCELL_THREADS"))
      cfg.apply_override(std::string("numerics.threads=") + env);

    halfcell::RunResult r = halfcell::run_subcommand(cmd, cfg, out_dir);
    if (!quiet) std::cout << r.summary << "\n";
    return r.exit_code;
  } catch (const halfcell::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
