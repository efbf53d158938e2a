#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "halfcell/runner.hpp"

using namespace halfcell;
namespace fs = std::filesystem;

namespace {

std::string examples_dir() { return HALFCELL_EXAMPLES_DIR; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("halfcell_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("lambda subcommand produces the documented artifacts") {
  RunConfig cfg = RunConfig::parse_file(examples_dir() + "/constant_f.cfg");
  fs::path out = fresh_dir("lambda");
  RunResult r = run_subcommand("lambda", cfg, out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.result["lambda"].get<double>() == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(fs::exists(out / "lambda.json"));
  CHECK(fs::exists(out / "lambda_corrector.csv"));
}

TEST_CASE("unknown keys and bad values raise ConfigError") {
  RunConfig cfg = RunConfig::parse_text("[problem]\ndim = 7\n");
  CHECK_THROWS_AS(run_subcommand("lambda", cfg, fresh_dir("bad").string()),
                  ConfigError);
  RunConfig cfg2 = RunConfig::parse_file(examples_dir() + "/constant_f.cfg");
  CHECK_THROWS_AS(cfg2.apply_override("no_equals_sign"), ConfigError);
  cfg2.apply_override("numerics.mc_mode=bogus");
  CHECK_THROWS_AS(run_subcommand("mc", cfg2, fresh_dir("bad2").string()), ConfigError);
}

TEST_CASE("outputs are byte-reproducible across runs") {
  RunConfig cfg = RunConfig::parse_file(examples_dir() + "/constant_f.cfg");
  fs::path a = fresh_dir("gold_a");
  fs::path b = fresh_dir("gold_b");
  run_subcommand("lambda", cfg, a.string());
  run_subcommand("lambda", cfg, b.string());
  CHECK(slurp(a / "lambda.json") == slurp(b / "lambda.json"));
  CHECK(slurp(a / "lambda_corrector.csv") == slurp(b / "lambda_corrector.csv"));

  RunConfig scan = RunConfig::parse_file(examples_dir() + "/cosine_slope_scan.cfg");
  fs::path c = fresh_dir("gold_c");
  fs::path d = fresh_dir("gold_d");
  run_subcommand("bavg", scan, c.string());
  run_subcommand("bavg", scan, d.string());
  CHECK(slurp(c / "bavg.json") == slurp(d / "bavg.json"));
  CHECK(slurp(c / "bavg.csv") == slurp(d / "bavg.csv"));
}

TEST_CASE("audit subcommand reports assumption checks") {
  RunConfig cfg = RunConfig::parse_file(examples_dir() + "/divergence_1d.cfg");
  fs::path out = fresh_dir("audit");
  RunResult r = run_subcommand("audit", cfg, out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.result["all_pass"].get<bool>());
  CHECK(r.result["entries"].size() >= 3);
}
