#include "halfcell/runner.hpp"

#include <cmath>
#include <filesystem>

#include "halfcell/boundary_ergodic.hpp"
#include "halfcell/correctors.hpp"
#include "halfcell/halfspace_average.hpp"
#include "halfcell/homogenize.hpp"
#include "halfcell/interior_ergodic.hpp"
#include "halfcell/mc.hpp"

namespace halfcell {

namespace {

ErgodicOptions ergodic_from(const RunConfig& cfg) {
  ErgodicOptions opt;
  opt.deltas = cfg.get_list("numerics", "deltas", opt.deltas);
  return opt;
}

MuSchedules schedules_from(const RunConfig& cfg) {
  MuSchedules s;
  s.eps = cfg.get_list("numerics", "epsilons", s.eps);
  s.alphas = cfg.get_list("numerics", "alphas", s.alphas);
  s.heights = cfg.get_list("numerics", "heights", s.heights);
  s.nodes_per_unit = cfg.get_int("numerics", "nodes_per_unit", s.nodes_per_unit);
  s.n_t = cfg.get_int("numerics", "n_t", s.n_t);
  return s;
}

VectorXd p_from(const RunConfig& cfg, int dim) {
  std::vector<double> fallback(dim, 0.0);
  std::vector<double> v = cfg.get_list("numerics", "p", fallback);
  if (static_cast<int>(v.size()) != dim)
    throw ConfigError("numerics.p has wrong dimension");
  return Eigen::Map<VectorXd>(v.data(), dim);
}

McOptions mc_from(const RunConfig& cfg) {
  McOptions m;
  m.dt = cfg.get_double("numerics", "dt", m.dt);
  m.T = cfg.get_double("numerics", "T", m.T);
  m.paths = cfg.get_int("numerics", "paths", m.paths);
  m.seed = static_cast<std::uint64_t>(cfg.get_double("numerics", "seed", 1));
  m.threads = cfg.get_int("numerics", "threads", 0);
  m.height = cfg.get_double("numerics", "height", m.height);
  return m;
}

json vec_json(const VectorXd& v) {
  json j = json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

json mat_json(const Eigen::MatrixXd& m) {
  json j = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    j.push_back(row);
  }
  return j;
}

std::string fmt(double v) { return format_double(v); }

RunResult run_lambda(const CoefficientSet& set, const RunConfig& cfg,
                     const std::string& out) {
  TorusGrid grid(set.op.dim, cfg.get_int("numerics", "grid_n", 256));
  ErgodicSolution sol = lambda_torus(set.op, grid, ergodic_from(cfg));
  RunResult r;
  r.result = {{"lambda", sol.constant}, {"residual_sup", sol.residual_sup}};
  json hist = json::array();
  for (const auto& [d, est] : sol.history) hist.push_back({d, est});
  r.result["history"] = hist;
  write_json_file(out + "/lambda.json", r.result);
  write_grid_csv(out + "/lambda_corrector.csv", grid, sol.corrector);
  r.summary = "lambda = " + fmt(sol.constant) + " (residual " + fmt(sol.residual_sup) + ")";
  return r;
}

RunResult run_mu(const CoefficientSet& set, const RunConfig& cfg, const std::string& out) {
  TorusGrid torus(set.op.dim, cfg.get_int("numerics", "grid_n", 256));
  VectorXd p = p_from(cfg, set.op.dim);
  ErgodicSolution interior = lambda_torus(set.op, torus, ergodic_from(cfg), p);
  FieldFn ubar = [torus, corr = interior.corrector](const VectorXd& y) {
    return torus_interpolate(torus, corr, y);
  };
  MuResult mu = mu_limit(set.op, set.bop, set.dom, interior.constant, ubar, p,
                         schedules_from(cfg));
  RunResult r;
  r.result = {{"mu", mu.mu},
              {"lambda", interior.constant},
              {"uniqueness_flag", to_string(mu.flag)},
              {"r_drift", mu.r_drift},
              {"alpha_corrector_mass", mu.alpha_corrector_mass},
              {"mu_per_height", mu.mu_per_height},
              {"interior_residual", mu.interior_residual},
              {"boundary_residual", mu.boundary_residual}};
  write_json_file(out + "/mu.json", r.result);
  std::vector<std::vector<double>> rows;
  for (const PenalizedSample& s : mu.history)
    rows.push_back({s.height, s.alpha, s.eps, s.value});
  write_csv(out + "/mu_history.csv", {"R", "alpha", "eps", "minus_alpha_u0"}, rows);
  r.summary = "mu = " + fmt(mu.mu) + " [" + to_string(mu.flag) + "]";
  r.exit_code = mu.flag == UniquenessFlag::SuspectNonunique ? 1 : 0;
  return r;
}

RunResult run_cell(const CoefficientSet& set, const RunConfig& cfg,
                   const std::string& out) {
  if (set.op.kind != OperatorSpec::Kind::Linear)
    throw ConfigError("cell subcommand requires a linear operator");
  TorusGrid grid(set.op.dim, cfg.get_int("numerics", "grid_n", 256));
  VectorXd p = p_from(cfg, set.op.dim);
  ErgodicSolution sol = drift_cell_lambda(set.op.controls[0], p, grid, ergodic_from(cfg));
  RunResult r;
  r.result = {{"lambda_bar", sol.constant}, {"residual_sup", sol.residual_sup}};
  write_json_file(out + "/cell.json", r.result);
  write_grid_csv(out + "/cell_corrector.csv", grid, sol.corrector);
  r.summary = "lambda_bar = " + fmt(sol.constant);
  return r;
}

RunResult run_effective(const CoefficientSet& set, const RunConfig& cfg,
                        const std::string& out) {
  if (set.op.kind != OperatorSpec::Kind::Linear)
    throw ConfigError("effective subcommand requires a linear operator");
  TorusGrid grid(set.op.dim, cfg.get_int("numerics", "grid_n", 256));
  CorrectorOptions copt;
  copt.ergodic = ergodic_from(cfg);
  copt.singular_drift = set.op.singular_drift;
  EffectiveData eff = effective_interior(set.op.controls[0], grid, copt);
  eff = effective_boundary(set.op, set.bop, set.dom, grid, schedules_from(cfg), copt,
                           std::move(eff));
  RunResult r;
  r.result = {{"A_bar", mat_json(eff.A_bar)},
              {"b_bar", vec_json(eff.b_bar)},
              {"f_bar", eff.f_bar},
              {"gamma_bar", vec_json(eff.gamma_bar)},
              {"g_bar", eff.g_bar},
              {"interior_affinity_deviation", eff.interior_affinity_deviation},
              {"boundary_affinity_deviation", eff.boundary_affinity_deviation}};
  write_json_file(out + "/effective.json", r.result);
  r.summary = "f_bar = " + fmt(eff.f_bar) + ", g_bar = " + fmt(eff.g_bar);
  return r;
}

RunResult run_homogenize(const CoefficientSet& set, const RunConfig& cfg,
                         const std::string& out) {
  StudyOptions sopt;
  sopt.epsilons = cfg.get_list("numerics", "eps_list", sopt.epsilons);
  sopt.window_height = cfg.get_double("numerics", "window", sopt.window_height);
  sopt.reference_eps = cfg.get_double("numerics", "ref_eps", 0.0);
  sopt.eps_opt.nodes_per_fast_period =
      cfg.get_int("numerics", "nodes_per_fast_period", sopt.eps_opt.nodes_per_fast_period);

  ConvergenceStudy study;
  if (sopt.reference_eps > 0) {
    study = convergence_study(set.op, set.bop, set.dom, nullptr, sopt);
  } else {
    if (set.op.kind != OperatorSpec::Kind::Linear)
      throw ConfigError("homogenize with effective reference requires a linear operator");
    TorusGrid grid(set.op.dim, cfg.get_int("numerics", "grid_n", 256));
    CorrectorOptions copt;
    copt.ergodic = ergodic_from(cfg);
    copt.singular_drift = set.op.singular_drift;
    EffectiveData eff = effective_interior(set.op.controls[0], grid, copt);
    eff = effective_boundary(set.op, set.bop, set.dom, grid, schedules_from(cfg), copt,
                             std::move(eff));
    study = convergence_study(set.op, set.bop, set.dom, &eff, sopt);
  }
  RunResult r;
  r.result = {{"epsilons", study.epsilons},
              {"errors", study.errors},
              {"reference", study.reference},
              {"window_height", study.window_height}};
  write_json_file(out + "/homogenize.json", r.result);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < study.epsilons.size(); ++i)
    rows.push_back({study.epsilons[i], study.errors[i], study.runtimes[i]});
  write_csv(out + "/homogenize.csv", {"eps", "error", "runtime_s"}, rows);
  r.summary = "e(eps_min) = " + fmt(study.errors.back());
  bool nonincreasing = true;
  for (std::size_t i = 1; i < study.errors.size(); ++i)
    nonincreasing = nonincreasing && study.errors[i] <= study.errors[i - 1] + 1e-12;
  r.result["nonincreasing"] = nonincreasing;
  return r;
}

RunResult run_mc(const CoefficientSet& set, const RunConfig& cfg, const std::string& out) {
  if (set.op.kind != OperatorSpec::Kind::Linear)
    throw ConfigError("mc subcommand requires a linear operator");
  McOptions mopt = mc_from(cfg);
  const std::string mode = cfg.get("numerics", "mc_mode", "mu");
  VectorXd x0;
  {
    std::vector<double> v =
        cfg.get_list("numerics", "x0", std::vector<double>(set.op.dim, 0.5));
    x0 = Eigen::Map<VectorXd>(v.data(), static_cast<int>(v.size()));
  }
  RunResult r;
  if (mode == "ktime") {
    PathBatch batch = simulate_reflected(set.op.controls[0], set.bop, set.dom, x0, mopt);
    r.result = {{"mean_k", batch.mean_k}, {"se_k", batch.se_k}, {"T", mopt.T},
                {"paths", mopt.paths}, {"dt", mopt.dt}};
    r.summary = "E|k|_T = " + fmt(batch.mean_k) + " +- " + fmt(batch.se_k);
  } else if (mode == "lemma31") {
    std::vector<double> horizons =
        cfg.get_list("numerics", "horizons", {2.5, 5.0, 10.0, 20.0});
    Lemma31Report rep = lemma31_check(set.op.controls[0], set.bop, set.dom, x0,
                                      horizons, mopt);
    json growth = json::array();
    for (const auto& [t, m] : rep.growth) growth.push_back({t, m});
    r.result = {{"diverges", rep.diverges}, {"last_slope", rep.last_slope},
                {"growth", growth}};
    r.summary = std::string("local time ") + (rep.diverges ? "diverges" : "bounded") +
                " (slope " + fmt(rep.last_slope) + ")";
  } else if (mode == "mu") {
    double lambda = cfg.get_double("numerics", "lambda", 0.0);
    MuEstimate est = mu_mc_estimate(set.op.controls[0], set.bop, set.dom, lambda, x0, mopt);
    r.result = {{"mu_hat", est.mu_hat}, {"std_error", est.std_error},
                {"mean_k", est.mean_k}};
    r.summary = "mu_hat = " + fmt(est.mu_hat) + " +- " + fmt(est.std_error);
  } else {
    throw ConfigError("unknown mc_mode: " + mode);
  }
  write_json_file(out + "/mc.json", r.result);
  return r;
}

RunResult run_bavg(const CoefficientSet& set, const RunConfig& cfg,
                   const std::string& out) {
  std::vector<double> alphas = cfg.get_list("numerics", "qalphas", {0.0, 0.2});
  std::vector<double> radii = cfg.get_list("numerics", "radii", {10, 20, 40, 80});
  const int npu = cfg.get_int("numerics", "nodes_per_unit", 64);
  SlopeScan scan = slope_scan(set.bop.g, alphas, radii, npu);
  RunResult r;
  json entries = json::array();
  std::vector<std::vector<double>> rows;
  for (const SlopeEntry& e : scan.entries) {
    entries.push_back({{"alpha", e.alpha},
                       {"extrapolated", e.extrapolated},
                       {"fit_residual", e.fit_residual}});
    for (const auto& [R, a] : e.averages) rows.push_back({e.alpha, R, a});
  }
  r.result = {{"gap", scan.gap}, {"entries", entries}};
  write_json_file(out + "/bavg.json", r.result);
  write_csv(out + "/bavg.csv", {"alpha", "R", "average"}, rows);
  r.summary = "gap = " + fmt(scan.gap);
  return r;
}

RunResult run_audit(const CoefficientSet& set, const RunConfig& cfg,
                    const std::string& out) {
  const int probes = cfg.get_int("numerics", "probes", 200);
  AuditReport rep = audit_assumptions(set.op, set.bop, set.dom, probes);
  RunResult r;
  json entries = json::array();
  for (const AuditEntry& e : rep.entries)
    entries.push_back({{"assumption", e.assumption},
                       {"pass", e.pass},
                       {"margin", e.margin},
                       {"detail", e.detail}});
  r.result = {{"all_pass", rep.all_pass()}, {"entries", entries}};
  write_json_file(out + "/audit.json", r.result);
  r.summary = rep.all_pass() ? "all assumptions pass" : "assumption violations found";
  r.exit_code = rep.all_pass() ? 0 : 1;
  return r;
}

}  // namespace

RunResult run_subcommand(const std::string& cmd, const RunConfig& cfg,
                         const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  CoefficientSet set = problem_from_config(cfg);
  try {
    if (cmd == "lambda") return run_lambda(set, cfg, out_dir);
    if (cmd == "mu") return run_mu(set, cfg, out_dir);
    if (cmd == "cell") return run_cell(set, cfg, out_dir);
    if (cmd == "effective") return run_effective(set, cfg, out_dir);
    if (cmd == "homogenize") return run_homogenize(set, cfg, out_dir);
    if (cmd == "mc") return run_mc(set, cfg, out_dir);
    if (cmd == "bavg") return run_bavg(set, cfg, out_dir);
    if (cmd == "audit") return run_audit(set, cfg, out_dir);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    RunResult r;
    r.exit_code = 1;
    r.result = {{"error", e.what()}};
    write_json_file(out_dir + "/" + cmd + ".json", r.result);
    r.summary = std::string("failed: ") + e.what();
    return r;
  }
  throw ConfigError("unknown subcommand: " + cmd);
}

}  // namespace halfcell
