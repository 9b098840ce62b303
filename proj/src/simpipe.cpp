#include "photongain/simpipe.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "photongain/estimator.hpp"
#include "photongain/rng.hpp"

namespace pg::simpipe {

namespace {

// Frame synthesis only needs nonnegative variances (a zero-variance
// column yields constant frames); the collection loop additionally
// needs illuminated variance to form the group ratio.
void validate_cfg(const SimSensorConfig& cfg) {
  if (cfg.rows < 1 || cfg.cols < 1)
    throw DomainError("simpipe: rows and cols must be positive");
  if (static_cast<int>(cfg.columns.size()) != cfg.cols)
    throw ShapeError("simpipe: one SensorParams per column required");
  for (const gain::SensorParams& sp : cfg.columns) {
    if (!(sp.g > 0.0) || !(sp.sigma_d2 >= 0.0) || !(sp.mu_e >= 0.0))
      throw DomainError("simpipe: column needs g > 0, variances >= 0");
  }
}

void validate_for_collect(const SimSensorConfig& cfg) {
  validate_cfg(cfg);
  for (const gain::SensorParams& sp : cfg.columns) {
    if (!(sp.sigma_pd2() > 0.0))
      throw DomainError("collect: column needs sigma_pd2 > 0");
    if (!(sp.zeta() < 1.0))
      throw DomainError("collect: column zeta must be < 1");
  }
}

void check_shape(const MasterFrames& a, const MasterFrames& b) {
  if (a.mean.rows() != b.mean.rows() || a.mean.cols() != b.mean.cols())
    throw ShapeError("simpipe: master frame shapes differ");
}

}  // namespace

Eigen::ArrayXXd simulate_frame(const SimSensorConfig& cfg, FrameMode mode,
                               long frame_index) {
  validate_cfg(cfg);
  if (frame_index < 0)
    throw DomainError("simulate_frame: frame_index must be >= 0");
  // One stream per (mode, index): capture order never changes content.
  std::uint64_t sid = 2ULL * static_cast<std::uint64_t>(frame_index) +
                      (mode == FrameMode::kIlluminated ? 1ULL : 0ULL);
  rng::Stream rs(cfg.rng_seed, sid);
  Eigen::ArrayXXd frame(cfg.rows, cfg.cols);
  for (int i = 0; i < cfg.rows; ++i)
    for (int j = 0; j < cfg.cols; ++j) {
      const gain::SensorParams& sp = cfg.columns[j];
      double mu = mode == FrameMode::kDark ? sp.mu_d : sp.mu_pd();
      double s2 = mode == FrameMode::kDark ? sp.sigma_d2 : sp.sigma_pd2();
      double v = mu + std::sqrt(s2) * rs.normal();
      frame(i, j) = cfg.quantize ? std::round(v) : v;
    }
  return frame;
}

Eigen::ArrayXXd MasterFrames::variance() const {
  if (count < 2) return Eigen::ArrayXXd::Zero(mean.rows(), mean.cols());
  return m2 / static_cast<double>(count - 1);
}

MasterFrames welford_update(const MasterFrames& mf,
                            const Eigen::ArrayXXd& frame) {
  if (mf.count == 0) {
    MasterFrames out;
    out.count = 1;
    out.mean = frame;
    out.m2 = Eigen::ArrayXXd::Zero(frame.rows(), frame.cols());
    return out;
  }
  if (mf.mean.rows() != frame.rows() || mf.mean.cols() != frame.cols())
    throw ShapeError("welford_update: frame shape mismatch");
  MasterFrames out;
  out.count = mf.count + 1;
  Eigen::ArrayXXd d0 = frame - mf.mean;
  out.mean = mf.mean + d0 / static_cast<double>(out.count);
  out.m2 = mf.m2 + d0 * (frame - out.mean);
  return out;
}

MasterFrames welford_merge(const MasterFrames& a, const MasterFrames& b) {
  if (a.count == 0) return b;
  if (b.count == 0) return a;
  check_shape(a, b);
  MasterFrames out;
  out.count = a.count + b.count;
  double na = static_cast<double>(a.count);
  double nb = static_cast<double>(b.count);
  double n = na + nb;
  Eigen::ArrayXXd delta = b.mean - a.mean;
  out.mean = a.mean + delta * (nb / n);
  out.m2 = a.m2 + b.m2 + delta.square() * (na * nb / n);
  return out;
}

double group_zeta(double yhat_sum, double xhat_sum, long m, long n1) {
  if (m < 1) throw DomainError("group_zeta: group size must be >= 1");
  if (n1 < 2) throw DomainError("group_zeta: n1 must be >= 2");
  if (!(xhat_sum > 0.0))
    throw DomainError("group_zeta: illuminated variance sum must be > 0");
  double mn = static_cast<double>(m) * static_cast<double>(n1);
  return (mn - 3.0) / (mn - 1.0) * yhat_sum / xhat_sum;
}

CollectResult collect(const SimSensorConfig& cfg,
                      const optsize::BiasProfileSpec& spec, double acv0,
                      const CollectRules& rules) {
  validate_for_collect(cfg);
  if (!(acv0 > 0.0)) throw DomainError("collect: acv0 must be positive");
  if (!(rules.halt_fraction > 0.0 && rules.halt_fraction <= 1.0))
    throw DomainError("collect: halt_fraction outside (0,1]");

  CollectResult res;
  CollectionState& st = res.state;
  long y_index = 0, x_index = 0;

  auto capture = [&](FrameMode mode) {
    if (st.frames_captured >= rules.frame_cap)
      throw IterationCapError("collect: frame cap reached");
    ++st.frames_captured;
    if (mode == FrameMode::kDark) {
      res.dark = welford_update(res.dark,
                                simulate_frame(cfg, mode, y_index++));
      st.n2 = static_cast<int>(res.dark.count);
    } else {
      res.illum = welford_update(res.illum,
                                 simulate_frame(cfg, mode, x_index++));
      st.n1 = static_cast<int>(res.illum.count);
    }
  };

  // Initial stacks: one dark frame, illuminated up to the shot-noise
  // floor n1Min = ceil(2 acv0^-2 + 5).
  int n1_min = static_cast<int>(
      std::ceil(2.0 / (acv0 * acv0) + 5.0 - 1e-9));
  capture(FrameMode::kDark);
  while (st.n1 < n1_min) capture(FrameMode::kIlluminated);

  int groups = cfg.cols;
  st.z.assign(groups, 0.0);
  st.nudag.assign(groups, 0.0);
  st.n1_opt.assign(groups, 0.0);
  st.n2_opt.assign(groups, 0.0);

  // Group estimates for the current master frames; per-iteration sizes
  // come from the closed-form approximation (the loop runs per capture).
  auto evaluate_groups = [&]() {
    Eigen::ArrayXXd yhat = res.dark.variance();
    Eigen::ArrayXXd xhat = res.illum.variance();
    double alpha1 = (st.n1 - 1) / 2.0;
    for (int jg = 0; jg < groups; ++jg) {
      double zg = group_zeta(yhat.col(jg).sum(), xhat.col(jg).sum(),
                             cfg.rows, st.n1);
      // Size estimation needs zeta strictly inside (0,1); sampling
      // noise in the ratio can land outside early on.
      double z_est = std::clamp(zg, 1e-9, 1.0 - 1e-9);
      double v = optsize::nudag(z_est, spec);
      // Moment-existence strip clamp before any estimator use.
      double lo = spec.b + 1e-3;
      double hi = std::max(lo, alpha1 / 2.0 - 1.0);
      double vc = std::clamp(v, lo, hi);
      if (vc != v) ++st.clamp_events;
      auto [o1, o2] = optsize::approx_opt_sizes(z_est, spec, acv0);
      st.z[jg] = zg;
      st.nudag[jg] = vc;
      st.n1_opt[jg] = o1;
      st.n2_opt[jg] = o2;
    }
    res.z_history.push_back(st.z);
    res.nudag_history.push_back(st.nudag);
    res.n1_opt_history.push_back(st.n1_opt);
    res.n2_opt_history.push_back(st.n2_opt);
  };

  // Prose-consistent gating: a flag goes true (stop that stack) only
  // once every group's estimated optimal size is covered; the loop
  // halts when both sizes are covered in a halt_fraction quorum.
  auto update_flags = [&]() {
    bool y_done = true, x_done = true;
    int covered = 0;
    for (int jg = 0; jg < groups; ++jg) {
      bool y_ok = static_cast<double>(st.n2) >= st.n2_opt[jg];
      bool x_ok = static_cast<double>(st.n1) >= st.n1_opt[jg];
      y_done = y_done && y_ok;
      x_done = x_done && x_ok;
      if (y_ok && x_ok) ++covered;
    }
    st.yflag = y_done;
    st.xflag = x_done;
    st.stop = covered >=
              static_cast<int>(std::ceil(rules.halt_fraction * groups - 1e-9));
  };

  while (!st.stop) {
    if (!st.yflag) capture(FrameMode::kDark);
    if (!st.xflag) capture(FrameMode::kIlluminated);
    ++st.iterations;
    evaluate_groups();
    update_flags();
    if (st.yflag && st.xflag && !st.stop) {
      // Both stacks are frozen but the quorum is unmet: the estimates
      // cannot change any further, so the run would spin forever.
      throw IterationCapError("collect: flags frozen below halt quorum");
    }
  }

  if (rules.newton_final) {
    for (int jg = 0; jg < groups; ++jg) {
      // A zero measured Z (zero dark variance) is the exact boundary
      // point; the continuous optimum at the clamp floor would not be,
      // since n2_real does not tend to 1 as zeta -> 0+.
      double z_est = st.z[jg] < 1e-12
                         ? 0.0
                         : std::clamp(st.z[jg], 1e-9, 1.0 - 1e-9);
      try {
        optsize::OptimalSizes s = optsize::solve_opt_sizes(z_est, spec, acv0);
        st.n1_opt[jg] = s.n1_real;
        st.n2_opt[jg] = s.n2_real;
      } catch (const Error&) {
        // Keep the approximate estimate when the solver cannot certify.
      }
    }
  }
  return res;
}

Eigen::ArrayXXd gmap(const MasterFrames& dark, const MasterFrames& illum,
                     const std::vector<double>& v_groups, int n1, int n2,
                     int K, int threads) {
  check_shape(dark, illum);
  if (K != 1 && K != 2) throw DomainError("gmap: K must be 1 or 2");
  if (n1 < 2 || n2 < 2)
    throw DomainError("gmap: variance frames need n1, n2 >= 2");
  long rows = dark.mean.rows(), cols = dark.mean.cols();
  if (static_cast<long>(v_groups.size()) != cols)
    throw ShapeError("gmap: one nu-dagger per column required");
  Eigen::ArrayXXd yhat = dark.variance();
  Eigen::ArrayXXd xhat = illum.variance();
  double alpha1 = (n1 - 1) / 2.0;
  double alpha2 = (n2 - 1) / 2.0;
  Eigen::ArrayXXd out(rows, cols);
  auto run_rows = [&](long r0, long r1) {
    for (long i = r0; i < r1; ++i)
      for (long j = 0; j < cols; ++j) {
        estimator::VariancePair vp{xhat(i, j), yhat(i, j), alpha1, alpha2};
        out(i, j) = (illum.mean(i, j) - dark.mean(i, j)) *
                    estimator::t_nu_asym(vp, v_groups[j], K);
      }
  };
  int nt = std::max(1, std::min<int>(threads, static_cast<int>(rows)));
  if (nt == 1) {
    run_rows(0, rows);
  } else {
    std::vector<std::thread> pool;
    long chunk = (rows + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
      long r0 = t * chunk, r1 = std::min(rows, r0 + chunk);
      if (r0 >= r1) break;
      pool.emplace_back(run_rows, r0, r1);
    }
    for (std::thread& th : pool) th.join();
  }
  return out;
}

TraditionalMap gmap_traditional(const MasterFrames& dark,
                                const MasterFrames& illum) {
  check_shape(dark, illum);
  if (dark.count < 2 || illum.count < 2)
    throw DomainError("gmap_traditional: variance frames need count >= 2");
  TraditionalMap out;
  Eigen::ArrayXXd denom = illum.variance() - dark.variance();
  out.map = (illum.mean - dark.mean) / denom;
  out.flagged = denom <= 0.0;
  out.n_flagged = out.flagged.count();
  return out;
}

MapStats map_stats(const Eigen::ArrayXXd& map) {
  long n = map.size();
  if (n < 1) throw DomainError("map_stats: empty map");
  MapStats st;
  st.mean = map.mean();
  if (n < 2) return st;
  Eigen::ArrayXXd c = map - st.mean;
  double m2 = c.square().sum() / static_cast<double>(n);
  double m3 = c.cube().sum() / static_cast<double>(n);
  st.variance = c.square().sum() / static_cast<double>(n - 1);
  st.acv = std::sqrt(st.variance) / std::abs(st.mean);
  st.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  return st;
}

}  // namespace pg::simpipe
