#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bibc/parallel.hpp"
#include "bibc/reader.hpp"

namespace bibc {

enum class ProjectionMode { None, Perfect, Estimated };
enum class DetectorMode { Full, P2Only };

/// Dynamic range of one probing slot for fixed channels and a fixed
/// projector: (direct energy + backscatter energy) / backscatter energy.
/// Always >= 1. Throws if the projection removes the backscatter component
/// entirely (ratio to its unprojected energy below 1e-18), since the ratio
/// stops being meaningful there.
inline double zeta_of(const ChannelSet& ch, const CMat& p_s, const CMat& psi) {
  CMat probe = p_s * psi;
  double direct = (ch.g_ab * probe).squaredNorm();
  CMat bs_op = ch.g_cb * ch.g_ac.transpose();
  double den = (bs_op * probe).squaredNorm();
  double den_raw = (bs_op * psi).squaredNorm();
  if (den <= 1e-18 * den_raw)
    throw std::runtime_error("zeta_of: backscatter component fully nulled, ratio degenerate");
  return (direct + den) / den;
}

struct DynamicRangeReport {
  double zeta_linear = 1.0;
  double zeta_db = 0.0;
  ProjectionMode mode = ProjectionMode::None;
  int trials = 1;
};

/// Dynamic range under a projection policy. The none/perfect modes are
/// deterministic (one evaluation); estimated mode averages the ratio over
/// Monte Carlo redraws of the phase-1 noise, rebuilding the projector from
/// the per-trial channel estimate. Trial t uses RNG stream t of `seed`.
inline DynamicRangeReport dynamic_range(const ChannelSet& ch, const Waveforms& wf,
                                        const PhasePlan& plan, ProjectionMode mode, int k,
                                        int trials, std::uint64_t seed) {
  DynamicRangeReport rep;
  rep.mode = mode;
  if (mode == ProjectionMode::None || k == 0) {
    rep.trials = 1;
    Projector proj = identity_projector(static_cast<int>(ch.g_ab.cols()));
    rep.zeta_linear = zeta_of(ch, proj.p_s, wf.psi);
  } else if (mode == ProjectionMode::Perfect) {
    rep.trials = 1;
    Projector proj = build_projector(ch.g_ab, k);
    rep.zeta_linear = zeta_of(ch, proj.p_s, wf.psi);
  } else {
    if (trials < 1) throw std::invalid_argument("dynamic_range: trials must be >= 1");
    rep.trials = trials;
    double acc = 0.0;
    for (int t = 0; t < trials; ++t) {
      Rng rng(seed, static_cast<std::uint64_t>(t));
      std::vector<CMat> yp = transmit_phase1(ch, wf, plan, rng);
      CMat gab_hat = ls_estimate_direct(yp, wf.phi).transpose();
      Projector proj = build_projector(gab_hat, k);
      acc += zeta_of(ch, proj.p_s, wf.psi);
    }
    rep.zeta_linear = acc / trials;
  }
  rep.zeta_db = 10.0 * std::log10(rep.zeta_linear);
  return rep;
}

struct RadiationPoint {
  double theta = 0.0;
  double e_t = 0.0;
};

/// Radiated energy of one probing slot toward each grid direction,
/// E_t(theta) = alpha_d * ||g(theta)^T P_s||^2. With P_s = I this is flat at
/// alpha_d * m; the lambda^2 energy reallocation is already inside P_s.
inline std::vector<RadiationPoint> radiation_pattern(const CMat& p_s,
                                                     const std::vector<double>& theta_grid,
                                                     double d_ant, double alpha_d) {
  if (theta_grid.empty())
    throw std::invalid_argument("radiation_pattern: empty direction grid");
  if (p_s.rows() != p_s.cols())
    throw std::invalid_argument("radiation_pattern: p_s must be square");
  int m = static_cast<int>(p_s.rows());
  std::vector<RadiationPoint> pts;
  pts.reserve(theta_grid.size());
  for (double theta : theta_grid) {
    CVec g = steering_vector(theta, m, d_ant);
    RadiationPoint pt;
    pt.theta = theta;
    pt.e_t = alpha_d * (g.transpose() * p_s).squaredNorm();
    pts.push_back(pt);
  }
  return pts;
}

/// One detection experiment: fixed channels, plan, waveforms, and policy
/// knobs for projector construction and detector flavor.
struct RocScenario {
  ChannelSet ch;
  PhasePlan plan;
  Waveforms wf;
  ProjectionMode projection = ProjectionMode::Perfect;
  int k = 3;
  DetectorMode detector = DetectorMode::Full;
  double epsilon = 1e-8;
  int max_iters = 50;
};

struct PairedStats {
  std::vector<double> h0;
  std::vector<double> h1;
};

namespace detail {

inline double glr_statistic(const Observation& obs, const ReaderSideInfo& info,
                            const RocScenario& sc) {
  if (sc.detector == DetectorMode::P2Only)
    return p2only_glrt(obs, info, sc.epsilon, sc.max_iters, 1.0).log_glr;
  CMat h0 = estimate_gab_h0(obs, info);
  H1Estimate h1 = algorithm1(obs, info, sc.epsilon, sc.max_iters, false);
  return glrt_log(obs, info, h0, h1);
}

}  // namespace detail

/// Paired Monte Carlo of the log GLR statistic: trial t draws one noise
/// realization (stream t of `seed`) and evaluates the detector on silent
/// and active data built from that same realization. Identical seeds give
/// identical statistics for every projection mode (common random numbers),
/// and results are byte-identical for any thread count.
inline PairedStats paired_glr_stats(const RocScenario& sc, int trials, std::uint64_t seed,
                                    int threads = 1) {
  if (trials < 1) throw std::invalid_argument("paired_glr_stats: trials must be >= 1");
  int m = static_cast<int>(sc.ch.g_ab.cols());
  Projector fixed_proj = sc.projection == ProjectionMode::Perfect && sc.k > 0
                             ? build_projector(sc.ch.g_ab, sc.k)
                             : identity_projector(m);
  PairedStats st;
  st.h0.resize(static_cast<size_t>(trials));
  st.h1.resize(static_cast<size_t>(trials));
  parallel_for(trials, threads, [&](int t) {
    Rng rng0(seed, static_cast<std::uint64_t>(t));
    Observation obs0;
    obs0.yp = transmit_phase1(sc.ch, sc.wf, sc.plan, rng0);
    Projector proj = fixed_proj;
    if (sc.projection == ProjectionMode::Estimated && sc.k > 0) {
      CMat gab_hat = ls_estimate_direct(obs0.yp, sc.wf.phi).transpose();
      proj = build_projector(gab_hat, sc.k);
    }
    obs0.y = transmit_phase2(sc.ch, sc.wf, sc.plan, proj.p_s, Hypothesis::H0, rng0);
    Rng rng1(seed, static_cast<std::uint64_t>(t));
    Observation obs1;
    obs1.yp = transmit_phase1(sc.ch, sc.wf, sc.plan, rng1);
    obs1.y = transmit_phase2(sc.ch, sc.wf, sc.plan, proj.p_s, Hypothesis::H1, rng1);
    ReaderSideInfo info = make_reader_side_info(sc.wf, proj, sc.plan);
    st.h0[static_cast<size_t>(t)] = detail::glr_statistic(obs0, info, sc);
    st.h1[static_cast<size_t>(t)] = detail::glr_statistic(obs1, info, sc);
  });
  return st;
}

struct RocPoint {
  double threshold_log = 0.0;
  double p_fa = 0.0;
  double p_d = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  int trials_h0 = 0;
  int trials_h1 = 0;
};

/// Sweep log-thresholds over cached statistics. Matches detect(): a trial
/// counts iff its statistic strictly exceeds the log threshold.
inline RocCurve roc_from_stats(const PairedStats& st, const std::vector<double>& thresholds_log) {
  RocCurve curve;
  curve.trials_h0 = static_cast<int>(st.h0.size());
  curve.trials_h1 = static_cast<int>(st.h1.size());
  if (curve.trials_h0 == 0 || curve.trials_h1 == 0)
    throw std::invalid_argument("roc_from_stats: empty statistics");
  curve.points.reserve(thresholds_log.size());
  for (double thr : thresholds_log) {
    RocPoint pt;
    pt.threshold_log = thr;
    int fa = 0, d = 0;
    for (double v : st.h0)
      if (v > thr) ++fa;
    for (double v : st.h1)
      if (v > thr) ++d;
    pt.p_fa = static_cast<double>(fa) / curve.trials_h0;
    pt.p_d = static_cast<double>(d) / curve.trials_h1;
    curve.points.push_back(pt);
  }
  return curve;
}

/// Threshold grid for a ROC trace: pooled quantiles of both statistic sets,
/// bracketed by sentinels below the minimum and above the maximum so the
/// curve reaches (1,1) and (0,0). Sorted ascending.
inline std::vector<double> default_log_thresholds(const PairedStats& st, int count) {
  if (count < 2) throw std::invalid_argument("default_log_thresholds: count must be >= 2");
  std::vector<double> pooled;
  pooled.reserve(st.h0.size() + st.h1.size());
  pooled.insert(pooled.end(), st.h0.begin(), st.h0.end());
  pooled.insert(pooled.end(), st.h1.begin(), st.h1.end());
  if (pooled.empty()) throw std::invalid_argument("default_log_thresholds: empty statistics");
  std::sort(pooled.begin(), pooled.end());
  std::vector<double> thr;
  thr.reserve(static_cast<size_t>(count));
  thr.push_back(pooled.front() - 1.0);
  for (int i = 1; i + 1 < count; ++i) {
    double q = static_cast<double>(i) / (count - 1);
    size_t idx = static_cast<size_t>(q * (pooled.size() - 1));
    thr.push_back(pooled[idx]);
  }
  thr.push_back(pooled.back() + 1.0);
  std::sort(thr.begin(), thr.end());
  thr.erase(std::unique(thr.begin(), thr.end()), thr.end());
  return thr;
}

/// End-to-end ROC: paired statistics then a threshold sweep.
inline RocCurve roc_curve(const RocScenario& sc, int trials,
                          const std::vector<double>& thresholds_log, std::uint64_t seed,
                          int threads = 1) {
  return roc_from_stats(paired_glr_stats(sc, trials, seed, threads), thresholds_log);
}

}  // namespace bibc
