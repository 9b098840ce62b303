// photon-gain: single binary exposing the library workflows.
//
// Subcommands: specfun eval, gain mc-demo, gain ci, estimate t-nu,
// estimate moments, optsize curve|point, simulate run, gmap.
// Exit codes: 0 ok, 2 usage/config, 3 domain or pole, 4 convergence or
// constraint.  PHOTON_GAIN_THREADS caps parallelism (default 1).

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "photongain/errors.hpp"
#include "photongain/estimator.hpp"
#include "photongain/fracsum.hpp"
#include "photongain/gain.hpp"
#include "photongain/optsize.hpp"
#include "photongain/simpipe.hpp"
#include "photongain/specfun.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace pg;

namespace {

constexpr const char* kVersion = "photon-gain 1.0.0";

int thread_budget() {
  const char* env = std::getenv("PHOTON_GAIN_THREADS");
  if (env == nullptr) return 1;
  int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot open for writing: " + path.string());
  out << text;
}

// Row-major CSV with a `rows,cols` header line.
void write_array_csv(const fs::path& path, const Eigen::ArrayXXd& a) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot open for writing: " + path.string());
  out << a.rows() << "," << a.cols() << "\n";
  for (long i = 0; i < a.rows(); ++i) {
    for (long j = 0; j < a.cols(); ++j)
      out << (j ? "," : "") << fmt17(a(i, j));
    out << "\n";
  }
}

Eigen::ArrayXXd read_array_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw DomainError("empty array file: " + path.string());
  long rows = 0, cols = 0;
  if (std::sscanf(line.c_str(), "%ld,%ld", &rows, &cols) != 2 || rows < 1 ||
      cols < 1)
    throw DomainError("bad rows,cols header in " + path.string());
  Eigen::ArrayXXd a(rows, cols);
  for (long i = 0; i < rows; ++i) {
    if (!std::getline(in, line))
      throw DomainError("truncated array file: " + path.string());
    const char* p = line.c_str();
    char* end = nullptr;
    for (long j = 0; j < cols; ++j) {
      a(i, j) = std::strtod(p, &end);
      if (end == p)
        throw DomainError("bad number in " + path.string());
      p = (*end == ',') ? end + 1 : end;
    }
  }
  return a;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw DomainError(std::string("invalid JSON: ") + e.what());
  }
  return j;
}

// ---------------------------------------------------------------- specfun

int cmd_specfun_eval(const std::string& name,
                     const std::vector<double>& a) {
  auto need = [&](size_t n) {
    if (a.size() != n)
      throw CLI::ValidationError(name + " expects " + std::to_string(n) +
                                 " arguments");
  };
  double v = 0.0;
  if (name == "hyp2f1") {
    need(4);
    v = specfun::hyp2f1(a[0], a[1], a[2], a[3]);
  } else if (name == "hyp2f1_reg") {
    need(4);
    v = specfun::hyp2f1_reg(a[0], a[1], a[2], a[3]);
  } else if (name == "hyp1f1") {
    need(3);
    v = specfun::hyp1f1(a[0], a[1], a[2]);
  } else if (name == "inc_beta") {
    need(3);
    v = specfun::inc_beta(a[0], a[1], a[2]);
  } else if (name == "reg_inc_beta") {
    need(3);
    v = specfun::reg_inc_beta(a[0], a[1], a[2]);
  } else if (name == "f_cdf") {
    need(3);
    v = specfun::f_cdf(a[0], a[1], a[2]);
  } else if (name == "f_quantile") {
    need(3);
    v = specfun::f_quantile(a[0], a[1], a[2]);
  } else if (name == "lower_gamma") {
    need(2);
    v = specfun::lower_gamma(a[0], a[1]);
  } else if (name == "expint_ei") {
    need(1);
    v = specfun::expint_ei(a[0]);
  } else if (name == "polygamma") {
    need(2);
    v = specfun::polygamma(static_cast<int>(a[0]), a[1]);
  } else if (name == "dawson") {
    need(1);
    v = specfun::dawson(a[0]);
  } else if (name == "gamma_ratio") {
    need(2);
    v = specfun::gamma_ratio(a[0], a[1]);
  } else if (name == "pochhammer") {
    need(2);
    v = specfun::pochhammer(a[0], a[1]);
  } else if (name == "falling_factorial") {
    need(2);
    v = specfun::falling_factorial(a[0], a[1]);
  } else if (name == "gtilde") {
    need(4);
    v = fracsum::gtilde_nw(static_cast<int>(a[0]), a[1], a[2], a[3]);
  } else {
    throw CLI::ValidationError("unknown function name: " + name);
  }
  std::cout << fmt17(v) << "\n";
  return 0;
}

// ------------------------------------------------------------------- gain

json sensor_json(const gain::SensorParams& sp) {
  return json{{"mu_d", sp.mu_d},   {"sigma_d2", sp.sigma_d2},
              {"mu_e", sp.mu_e},   {"g", sp.g},
              {"n1", sp.n1},       {"n2", sp.n2}};
}

gain::SensorParams sensor_from_json(const json& j,
                                    const gain::SensorParams& defaults) {
  gain::SensorParams sp = defaults;
  sp.mu_d = j.value("mu_d", sp.mu_d);
  sp.sigma_d2 = j.value("sigma_d2", sp.sigma_d2);
  sp.mu_e = j.value("mu_e", sp.mu_e);
  sp.g = j.value("g", sp.g);
  sp.n1 = j.value("n1", sp.n1);
  sp.n2 = j.value("n2", sp.n2);
  return sp;
}

int cmd_mc_demo(const std::string& config_path, long trials_override,
                std::uint64_t seed_override, const std::string& out_path) {
  // Defaults are the simulation-parameter table: g = 5, nu = e^pi / 2,
  // n1 = 3001, n2 = 1501, mu_e = 150, mu_d = 10, sigma_d2 = 16.
  gain::SensorParams sp{10.0, 16.0, 150.0, 5.0, 3001, 1501};
  double nu = std::exp(M_PI) / 2.0;
  double alpha = 0.05;
  long trials = 100000;
  std::uint64_t seed = 20260823ULL;
  if (!config_path.empty()) {
    json cfg = load_json(config_path);
    sp = sensor_from_json(cfg, sp);
    nu = cfg.value("nu", nu);
    alpha = cfg.value("alpha", alpha);
    trials = cfg.value("trials", trials);
    seed = cfg.value("seed", seed);
  }
  if (trials_override > 0) trials = trials_override;
  if (seed_override != 0) seed = seed_override;

  gain::McDemoResult r = gain::mc_demo(sp, nu, alpha, trials, seed);
  json out;
  out["version"] = kVersion;
  out["config"] = sensor_json(sp);
  out["config"]["nu"] = nu;
  out["config"]["alpha"] = alpha;
  out["config"]["trials"] = trials;
  out["config"]["seed"] = seed;
  out["mean_g"] = r.mean_g;
  out["var_g"] = r.var_g;
  out["exact_mean"] = r.exact_mean;
  out["exact_var"] = r.exact_var;
  out["coverage_arb"] = r.coverage_arb;
  out["coverage_acv"] = r.coverage_acv;
  out["asym_k"] = r.asym_k;
  out["k_star"] = r.k_star;
  out["r_star"] = r.r_star;
  out["z_range"] = json::array({r.z_lo, r.z_hi});
  std::string text = out.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_text(out_path, text);
  return 0;
}

int cmd_gain_ci(double y1, double y2, int n1, int n2, double nu,
                double alpha) {
  estimator::VariancePair vp{y1, y2, (n1 - 1) / 2.0, (n2 - 1) / 2.0};
  json out;
  out["version"] = kVersion;
  gain::ConfidenceInterval arb = gain::ci_arb(vp, nu, alpha);
  out["arb"] = {{"level", arb.level},
                {"lower", arb.lower},
                {"upper", arb.upper}};
  try {
    gain::ConfidenceInterval acv = gain::ci_acv(vp, nu, alpha);
    out["acv"] = {{"level", acv.level},
                  {"lower", acv.lower},
                  {"upper", acv.upper}};
  } catch (const DomainError& e) {
    // |nu| <= 1: the ACV interval is undefined; report why.
    out["acv"] = {{"error", e.what()}};
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

// --------------------------------------------------------------- estimate

int cmd_estimate_t_nu(double y1, double y2, int n1, int n2, double nu,
                      int asym_k) {
  estimator::VariancePair vp{y1, y2, (n1 - 1) / 2.0, (n2 - 1) / 2.0};
  double t = asym_k > 0 ? estimator::t_nu_asym(vp, nu, asym_k)
                        : estimator::t_nu_auto(vp, nu);
  std::cout << fmt17(t) << "\n";
  return 0;
}

int cmd_estimate_moments(double kappa1, double kappa2, int n1, int n2,
                         double nu, double tol) {
  estimator::PopulationParams pp{kappa1, kappa2};
  estimator::MomentReport r = estimator::moments_t_nu(
      pp, (n1 - 1) / 2.0, (n2 - 1) / 2.0, nu, tol);
  json out;
  out["version"] = kVersion;
  out["mean"] = r.mean;
  out["second_moment"] = r.second_moment;
  out["variance"] = r.variance;
  out["cv"] = r.cv;
  out["acv"] = r.acv;
  out["terms_used"] = r.terms_used;
  out["rel_error_bound"] = r.rel_error_bound;
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------- optsize

json sizes_json(const optsize::OptimalSizes& s) {
  const char* method = s.method == optsize::SizeMethod::kExactPoint
                           ? "exact-point"
                           : (s.method == optsize::SizeMethod::kApprox
                                  ? "approx"
                                  : "newton");
  return json{{"n1", s.n1},
              {"n2", s.n2},
              {"n1_real", s.n1_real},
              {"n2_real", s.n2_real},
              {"zeta", s.zeta},
              {"acv_target", s.acv_target},
              {"terms_used", s.terms_used},
              {"rel_bound", s.rel_bound},
              {"method", method}};
}

int cmd_optsize_point(double zeta, double arb0, double acv0, double b) {
  optsize::BiasProfileSpec spec{arb0, b};
  optsize::OptimalSizes s = optsize::solve_opt_sizes(zeta, spec, acv0);
  json out = sizes_json(s);
  out["version"] = kVersion;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_optsize_curve(double arb0, double acv0, double b, double sigma_dg,
                      int grid, const std::string& out_path) {
  if (grid < 2) throw CLI::ValidationError("--grid must be >= 2");
  optsize::BiasProfileSpec spec{arb0, b};
  std::ofstream out(out_path);
  if (!out) throw DomainError("cannot open for writing: " + out_path);
  out << "zeta,nudag,n1_opt,n2_opt,terms,rel_bound,e_ratio\n";
  double inv = 1.0 + 1.0 / (acv0 * acv0);
  for (int k = 0; k < grid; ++k) {
    // Monotone grid from the shot-noise limit up to zeta = 0.99.
    double z = 0.99 * static_cast<double>(k) / (grid - 1);
    optsize::OptimalSizes s = optsize::solve_opt_sizes(z, spec, acv0);
    double nud = z > 0.0 ? optsize::nudag(z, spec) : b;
    double e = 1.0;
    if (z > 0.0) {
      double pen = z / ((1.0 - z) * (1.0 - z)) *
                   (1.0 / s.n1_real + z / s.n2_real);
      e = 1.0 / (1.0 + inv / (sigma_dg * sigma_dg) * pen);
    }
    out << fmt17(z) << "," << fmt17(nud) << "," << fmt17(s.n1_real) << ","
        << fmt17(s.n2_real) << "," << s.terms_used << ","
        << fmt17(s.rel_bound) << "," << fmt17(e) << "\n";
  }
  return 0;
}

// --------------------------------------------------------------- simulate

simpipe::SimSensorConfig sim_config_from_json(const json& cfg) {
  simpipe::SimSensorConfig sc;
  sc.rows = cfg.value("rows", 16);
  sc.cols = cfg.value("cols", 16);
  sc.rng_seed = cfg.value("seed", 1ULL);
  sc.quantize = cfg.value("quantize", false);
  gain::SensorParams base{100.0, 25.0, 185.714285714285714, 2.0, 2, 2};
  if (cfg.contains("column")) base = sensor_from_json(cfg["column"], base);
  if (cfg.contains("columns")) {
    for (const json& cj : cfg["columns"])
      sc.columns.push_back(sensor_from_json(cj, base));
    if (static_cast<int>(sc.columns.size()) != sc.cols)
      throw DomainError("config: columns array length must equal cols");
  } else {
    sc.columns.assign(sc.cols, base);
  }
  return sc;
}

int cmd_simulate_run(const std::string& config_path, double arb0,
                     double acv0, double b, const std::string& out_dir) {
  json cfg = config_path.empty() ? json::object() : load_json(config_path);
  simpipe::SimSensorConfig sc = sim_config_from_json(cfg);
  optsize::BiasProfileSpec spec{arb0, b};
  fs::create_directories(out_dir);

  simpipe::CollectResult r = simpipe::collect(sc, spec, acv0);
  write_array_csv(fs::path(out_dir) / "masters_ybar.csv", r.dark.mean);
  write_array_csv(fs::path(out_dir) / "masters_xbar.csv", r.illum.mean);
  write_array_csv(fs::path(out_dir) / "masters_yhat.csv",
                  r.dark.variance());
  write_array_csv(fs::path(out_dir) / "masters_xhat.csv",
                  r.illum.variance());

  {
    std::ofstream g(fs::path(out_dir) / "groups.csv");
    g << "iteration,group,z,nudag,n1_opt,n2_opt\n";
    for (size_t it = 0; it < r.z_history.size(); ++it)
      for (size_t jg = 0; jg < r.z_history[it].size(); ++jg)
        g << it << "," << jg << "," << fmt17(r.z_history[it][jg]) << ","
          << fmt17(r.nudag_history[it][jg]) << ","
          << fmt17(r.n1_opt_history[it][jg]) << ","
          << fmt17(r.n2_opt_history[it][jg]) << "\n";
  }

  int threads = thread_budget();
  Eigen::ArrayXXd gm = simpipe::gmap(r.dark, r.illum, r.state.nudag,
                                     r.state.n1, r.state.n2, 2, threads);
  write_array_csv(fs::path(out_dir) / "gmap.csv", gm);
  simpipe::MapStats gs = simpipe::map_stats(gm);
  simpipe::TraditionalMap tm = simpipe::gmap_traditional(r.dark, r.illum);
  simpipe::MapStats ts = simpipe::map_stats(tm.map);

  json out;
  out["version"] = kVersion;
  out["config"] = {{"rows", sc.rows},
                   {"cols", sc.cols},
                   {"seed", sc.rng_seed},
                   {"quantize", sc.quantize},
                   {"arb0", arb0},
                   {"acv0", acv0},
                   {"b", b}};
  json cols = json::array();
  for (const gain::SensorParams& sp : sc.columns) {
    json cj = sensor_json(sp);
    cj.erase("n1");
    cj.erase("n2");
    cols.push_back(cj);
  }
  out["config"]["columns"] = cols;
  out["n1"] = r.state.n1;
  out["n2"] = r.state.n2;
  out["iterations"] = r.state.iterations;
  out["frames_captured"] = r.state.frames_captured;
  out["clamp_events"] = r.state.clamp_events;
  out["z"] = r.state.z;
  out["nudag"] = r.state.nudag;
  out["n1_opt"] = r.state.n1_opt;
  out["n2_opt"] = r.state.n2_opt;
  out["gmap_stats"] = {{"mean", gs.mean},
                       {"variance", gs.variance},
                       {"acv", gs.acv},
                       {"skewness", gs.skewness}};
  out["traditional_stats"] = {{"mean", ts.mean},
                              {"variance", ts.variance},
                              {"acv", ts.acv},
                              {"skewness", ts.skewness},
                              {"flagged", tm.n_flagged}};
  write_text(fs::path(out_dir) / "summary.json", out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ------------------------------------------------------------------- gmap

int cmd_gmap(const std::string& run_dir, int K,
             const std::string& out_path) {
  fs::path dir(run_dir);
  json summary = load_json((dir / "summary.json").string());
  int n1 = summary.at("n1").get<int>();
  int n2 = summary.at("n2").get<int>();
  std::vector<double> nudag =
      summary.at("nudag").get<std::vector<double>>();

  auto masters = [&](const char* bar, const char* hat, long count) {
    simpipe::MasterFrames mf;
    mf.count = count;
    mf.mean = read_array_csv(dir / bar);
    mf.m2 = read_array_csv(dir / hat) * static_cast<double>(count - 1);
    return mf;
  };
  simpipe::MasterFrames dark =
      masters("masters_ybar.csv", "masters_yhat.csv", n2);
  simpipe::MasterFrames illum =
      masters("masters_xbar.csv", "masters_xhat.csv", n1);

  Eigen::ArrayXXd gm =
      simpipe::gmap(dark, illum, nudag, n1, n2, K, thread_budget());
  if (!out_path.empty()) write_array_csv(out_path, gm);
  simpipe::MapStats gs = simpipe::map_stats(gm);
  simpipe::TraditionalMap tm = simpipe::gmap_traditional(dark, illum);
  simpipe::MapStats ts = simpipe::map_stats(tm.map);
  json out;
  out["version"] = kVersion;
  out["K"] = K;
  out["gmap_stats"] = {{"mean", gs.mean},
                       {"variance", gs.variance},
                       {"acv", gs.acv},
                       {"skewness", gs.skewness}};
  out["traditional_stats"] = {{"mean", ts.mean},
                              {"variance", ts.variance},
                              {"acv", ts.acv},
                              {"skewness", ts.skewness},
                              {"flagged", tm.n_flagged}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"photon-transfer conversion gain estimation toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // specfun eval
  auto* sf = app.add_subcommand("specfun", "special function evaluation");
  sf->require_subcommand(1);
  auto* sf_eval = sf->add_subcommand("eval", "evaluate a function by name");
  std::string sf_name;
  std::vector<double> sf_args;
  sf_eval->add_option("name", sf_name, "function name")->required();
  sf_eval->add_option("args", sf_args, "numeric arguments");

  // gain mc-demo / ci
  auto* gn = app.add_subcommand("gain", "conversion-gain estimator tools");
  gn->require_subcommand(1);
  auto* mc = gn->add_subcommand("mc-demo", "Monte Carlo demonstration");
  std::string mc_config, mc_out;
  long mc_trials = 0;
  std::uint64_t mc_seed = 0;
  mc->add_option("--config", mc_config, "JSON config path");
  mc->add_option("--trials", mc_trials, "trial count override");
  mc->add_option("--seed", mc_seed, "seed override");
  mc->add_option("--out", mc_out, "write summary JSON here");
  auto* ci = gn->add_subcommand("ci", "confidence intervals");
  double ci_y1, ci_y2, ci_nu, ci_alpha = 0.05;
  int ci_n1, ci_n2;
  ci->add_option("--y1", ci_y1)->required();
  ci->add_option("--y2", ci_y2)->required();
  ci->add_option("--n1", ci_n1)->required();
  ci->add_option("--n2", ci_n2)->required();
  ci->add_option("--nu", ci_nu)->required();
  ci->add_option("--alpha", ci_alpha);

  // estimate t-nu / moments
  auto* est = app.add_subcommand("estimate", "T_nu evaluation and moments");
  est->require_subcommand(1);
  auto* tn = est->add_subcommand("t-nu", "evaluate T_nu");
  double tn_y1, tn_y2, tn_nu;
  int tn_n1, tn_n2, tn_k = 0;
  tn->add_option("--y1", tn_y1)->required();
  tn->add_option("--y2", tn_y2)->required();
  tn->add_option("--n1", tn_n1)->required();
  tn->add_option("--n2", tn_n2)->required();
  tn->add_option("--nu", tn_nu)->required();
  tn->add_option("--asym", tn_k, "force asymptotic order K");
  auto* mo = est->add_subcommand("moments", "exact moments of T_nu");
  double mo_k1, mo_k2, mo_nu, mo_tol = 1e-10;
  int mo_n1, mo_n2;
  mo->add_option("--kappa1", mo_k1)->required();
  mo->add_option("--kappa2", mo_k2)->required();
  mo->add_option("--n1", mo_n1)->required();
  mo->add_option("--n2", mo_n2)->required();
  mo->add_option("--nu", mo_nu)->required();
  mo->add_option("--tol", mo_tol);

  // optsize point / curve
  auto* os = app.add_subcommand("optsize", "optimal sample sizes");
  os->require_subcommand(1);
  auto* op = os->add_subcommand("point", "solve one zeta");
  double op_zeta, op_arb0 = 0.01, op_acv0 = 0.01, op_b = 0.0;
  op->add_option("--zeta", op_zeta)->required();
  op->add_option("--arb0", op_arb0);
  op->add_option("--acv0", op_acv0);
  op->add_option("--b", op_b);
  auto* oc = os->add_subcommand("curve", "write a zeta grid CSV");
  double oc_arb0 = 0.01, oc_acv0 = 0.05, oc_b = 0.0, oc_sdg = 10.0;
  int oc_grid = 200;
  std::string oc_out = "curve.csv";
  oc->add_option("--arb0", oc_arb0);
  oc->add_option("--acv0", oc_acv0);
  oc->add_option("--b", oc_b);
  oc->add_option("--sigma-dg", oc_sdg);
  oc->add_option("--grid", oc_grid);
  oc->add_option("--out", oc_out);

  // simulate run
  auto* sim = app.add_subcommand("simulate", "simulated experiments");
  sim->require_subcommand(1);
  auto* run = sim->add_subcommand("run", "full collection pipeline");
  std::string run_config, run_out = "rundir";
  double run_arb0 = 0.01, run_acv0 = 0.05, run_b = 0.0;
  run->add_option("--config", run_config, "sensor JSON config");
  run->add_option("--arb0", run_arb0);
  run->add_option("--acv0", run_acv0);
  run->add_option("--b", run_b);
  run->add_option("--out", run_out, "output directory");

  // gmap
  auto* gm = app.add_subcommand("gmap", "g-map statistics from a run dir");
  std::string gm_dir, gm_out;
  int gm_k = 2;
  gm->add_option("--rundir", gm_dir)->required();
  gm->add_option("--k", gm_k, "asymptotic order K (1 or 2)");
  gm->add_option("--out", gm_out, "write the g-map CSV here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sf_eval->parsed()) return cmd_specfun_eval(sf_name, sf_args);
    if (mc->parsed()) return cmd_mc_demo(mc_config, mc_trials, mc_seed, mc_out);
    if (ci->parsed())
      return cmd_gain_ci(ci_y1, ci_y2, ci_n1, ci_n2, ci_nu, ci_alpha);
    if (tn->parsed())
      return cmd_estimate_t_nu(tn_y1, tn_y2, tn_n1, tn_n2, tn_nu, tn_k);
    if (mo->parsed())
      return cmd_estimate_moments(mo_k1, mo_k2, mo_n1, mo_n2, mo_nu, mo_tol);
    if (op->parsed())
      return cmd_optsize_point(op_zeta, op_arb0, op_acv0, op_b);
    if (oc->parsed())
      return cmd_optsize_curve(oc_arb0, oc_acv0, oc_b, oc_sdg, oc_grid,
                               oc_out);
    if (run->parsed())
      return cmd_simulate_run(run_config, run_arb0, run_acv0, run_b,
                              run_out);
    if (gm->parsed()) return cmd_gmap(gm_dir, gm_k, gm_out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const PoleError& e) {
    std::cerr << "PoleError: " << e.what() << "\n";
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "DomainError: " << e.what() << "\n";
    return 3;
  } catch (const DivergenceError& e) {
    std::cerr << "DivergenceError: " << e.what() << "\n";
    return 3;
  } catch (const RangeError& e) {
    std::cerr << "RangeError: " << e.what() << "\n";
    return 3;
  } catch (const ShapeError& e) {
    std::cerr << "ShapeError: " << e.what() << "\n";
    return 3;
  } catch (const ConvergenceError& e) {
    std::cerr << "ConvergenceError: " << e.what() << "\n";
    return 4;
  } catch (const ConstraintError& e) {
    std::cerr << "ConstraintError: " << e.what() << "\n";
    return 4;
  } catch (const IterationCapError& e) {
    std::cerr << "IterationCapError: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
