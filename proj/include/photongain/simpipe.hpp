#ifndef PHOTONGAIN_SIMPIPE_HPP
#define PHOTONGAIN_SIMPIPE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "photongain/errors.hpp"
#include "photongain/gain.hpp"
#include "photongain/optsize.hpp"

namespace pg::simpipe {

// Simulated sensor, streaming Welford master frames, column grouping,
// the adaptive data-collection controller, and g-map production.

// Per-column physical parameters reuse gain::SensorParams; the n1/n2
// fields are ignored by the simulator (sample sizes are what the
// collection loop determines).  Frames are real-valued DN; uniform
// quantization to integer DN is available behind a flag.
struct SimSensorConfig {
  int rows = 0;
  int cols = 0;
  std::vector<gain::SensorParams> columns;  // size cols
  std::uint64_t rng_seed = 0;
  bool quantize = false;
};

enum class FrameMode { kDark, kIlluminated };

// One frame of i.i.d. normal pixels, N(mu_d, sigma_d2) per column in
// dark mode and N(mu_pd, sigma_pd2) when illuminated.  frame_index
// selects the RNG stream, so any capture order reproduces the same
// frame contents under a fixed seed.
Eigen::ArrayXXd simulate_frame(const SimSensorConfig& cfg, FrameMode mode,
                               long frame_index);

// Streaming per-pixel count / mean / sum-of-squares state.
struct MasterFrames {
  long count = 0;
  Eigen::ArrayXXd mean;
  Eigen::ArrayXXd m2;

  // Sample variance m2/(count-1); all zeros while count < 2 (the
  // variance is undefined there, see variance_defined).
  Eigen::ArrayXXd variance() const;
  bool variance_defined() const { return count >= 2; }
};

// One Welford step; initializes the state when mf.count == 0.
MasterFrames welford_update(const MasterFrames& mf,
                            const Eigen::ArrayXXd& frame);

// Combines two disjoint streams into the single-stream result.
MasterFrames welford_merge(const MasterFrames& a, const MasterFrames& b);

// Group estimate of zeta from variance-frame sums over m pixels:
// Z = (m n1 - 3)/(m n1 - 1) * sum(Yhat) / sum(Xhat).
double group_zeta(double yhat_sum, double xhat_sum, long m, long n1);

// Controller state after (or during) a collection run.
struct CollectionState {
  int n1 = 0;                  // illuminated frames captured
  int n2 = 0;                  // dark frames captured
  std::vector<double> z;       // per-group zeta estimates
  std::vector<double> nudag;   // per-group clamped nu-dagger estimates
  std::vector<double> n1_opt;  // per-group final optimal-size estimates
  std::vector<double> n2_opt;
  bool yflag = false;  // true = stop capturing dark frames
  bool xflag = false;
  bool stop = false;
  int iterations = 0;
  long frames_captured = 0;
  int clamp_events = 0;  // nu-dagger strip clamps, counted per evaluation
};

struct CollectRules {
  double halt_fraction = 0.95;  // group quorum for HaltRule
  long frame_cap = 50000;       // total frames before IterationCapError
  bool newton_final = true;     // refine final sizes with the solver
};

struct CollectResult {
  CollectionState state;
  MasterFrames dark;   // Y stack state: mean = Ybar, variance = Yhat
  MasterFrames illum;  // X stack state: mean = Xbar, variance = Xhat
  // Per-iteration per-group traces of Z, clamped nu-dagger, and the
  // approximate optimal-size estimates driving the capture rules.
  std::vector<std::vector<double>> z_history;
  std::vector<std::vector<double>> nudag_history;
  std::vector<std::vector<double>> n1_opt_history;
  std::vector<std::vector<double>> n2_opt_history;
};

// Adaptive capture loop: one dark frame, then illuminated frames up to
// n1Min = ceil(2 acv0^-2 + 5), then alternating captures gated per the
// prose semantics of the collection algorithm: a stack keeps growing
// while any group's estimated optimal size exceeds its current size,
// and the loop halts once current >= estimated for both stacks in at
// least halt_fraction of the groups.  (The displayed pseudo-code rules
// return true when n_opt >= n_current, which would stop capture exactly
// when more samples are called for; the prose reading is implemented.)
// Per-iteration size estimates use the closed-form approximation; the
// Newton solver runs once per group on the final estimates.
// The loop body captures before the rules are first evaluated (group
// variances need n2 >= 2), so even a zero-dark-noise sensor halts at
// (n1Min + 1, 2) rather than the idealized boundary point (n1Min, 1).
CollectResult collect(const SimSensorConfig& cfg,
                      const optsize::BiasProfileSpec& spec, double acv0,
                      const CollectRules& rules = CollectRules{});

// Per-pixel conversion-gain map
// (G_nu,K)_ij = (Xbar_ij - Ybar_ij) * T_{V_j,K}(Xhat_ij, Yhat_ij),
// with V the per-column (group) nu-dagger vector and K in {1, 2}.
// threads > 1 splits rows across worker threads; results are identical
// to the serial evaluation.
Eigen::ArrayXXd gmap(const MasterFrames& dark, const MasterFrames& illum,
                     const std::vector<double>& v_groups, int n1, int n2,
                     int K, int threads = 1);

// Traditional ratio map G_ij = (Xbar-Ybar)/(Xhat-Yhat) with a flag mask
// for nonpositive denominators (the ratio itself is still reported).
struct TraditionalMap {
  Eigen::ArrayXXd map;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> flagged;
  long n_flagged = 0;
};
TraditionalMap gmap_traditional(const MasterFrames& dark,
                                const MasterFrames& illum);

// Sample moments of a map: mean, sample variance (n-1 denominator),
// acv = sqrt(variance)/|mean|, and skewness as the standardized third
// central moment m3 / m2^(3/2) (population central moments).
struct MapStats {
  double mean = 0.0;
  double variance = 0.0;
  double acv = 0.0;
  double skewness = 0.0;
};
MapStats map_stats(const Eigen::ArrayXXd& map);

}  // namespace pg::simpipe

#endif  // PHOTONGAIN_SIMPIPE_HPP
