#pragma once

#include <cmath>
#include <vector>

#include "bibc/emitter.hpp"
#include "bibc/linalg.hpp"
#include "bibc/waveform.hpp"

namespace bibc {

/// Everything PanB needs to run detection: both probing blocks, the
/// projector bundle, and the slot schedule. `probe` caches p_s * psi since
/// every estimator multiplies by it.
struct ReaderSideInfo {
  CMat phi;
  CMat psi;
  double alpha_p = 0.0;
  double alpha_d = 0.0;
  Projector proj;
  PhasePlan plan;
  CMat probe;
};

inline ReaderSideInfo make_reader_side_info(const Waveforms& wf, const Projector& proj,
                                            const PhasePlan& plan) {
  if (proj.p_s.rows() != wf.psi.rows())
    throw std::invalid_argument("make_reader_side_info: projector size must match probe rows");
  if (wf.phi.cols() != plan.tau_p || wf.psi.cols() != plan.tau_d)
    throw std::invalid_argument("make_reader_side_info: slot lengths disagree with plan");
  if (plan.gamma.size() != static_cast<size_t>(plan.j_p + plan.j_d))
    throw std::invalid_argument("make_reader_side_info: gamma pattern length disagrees with plan");
  ReaderSideInfo info;
  info.phi = wf.phi;
  info.psi = wf.psi;
  info.alpha_p = wf.alpha_p;
  info.alpha_d = wf.alpha_d;
  info.proj = proj;
  info.plan = plan;
  info.probe = proj.p_s * wf.psi;
  return info;
}

namespace detail {

inline void check_observation(const Observation& obs, const ReaderSideInfo& info,
                              bool need_p1) {
  if (need_p1) {
    if (obs.yp.size() != static_cast<size_t>(info.plan.j_p))
      throw std::invalid_argument("reader: phase-1 slot count disagrees with plan");
    for (const CMat& yp : obs.yp)
      if (yp.rows() != info.psi.rows() || yp.cols() != info.phi.cols())
        throw std::invalid_argument("reader: phase-1 slot has wrong shape");
  }
  if (obs.y.size() != static_cast<size_t>(info.plan.j_d))
    throw std::invalid_argument("reader: phase-2 slot count disagrees with plan");
  for (const CMat& y : obs.y)
    if (y.rows() != info.phi.rows() || y.cols() != info.psi.cols())
      throw std::invalid_argument("reader: phase-2 slot has wrong shape");
}

// Joint LS for the direct channel over all P1 slots plus the given P2 slots,
// optionally subtracting gamma_j * hbl * Psi first. Normal equations reduce
// to a right-multiplication by (a I + b P)^-1 with b carrying lambda^2 from
// the Gram of the scaled probe: (P_s Psi)(P_s Psi)^H = alpha_d lambda^2 P.
inline CMat gab_joint_ls(const Observation& obs, const ReaderSideInfo& info,
                         const std::vector<int>& p2_slots, const CMat* hbl) {
  check_observation(obs, info, true);
  const Eigen::Index n = info.phi.rows();
  const Eigen::Index m = info.psi.rows();
  CMat num = CMat::Zero(n, m);
  for (const CMat& yp : obs.yp) num += (yp * info.phi.adjoint()).transpose();
  CMat bs;
  if (hbl != nullptr) bs = (*hbl) * info.psi;
  for (int i : p2_slots) {
    const CMat& y = obs.y.at(static_cast<size_t>(i));
    if (hbl != nullptr && info.plan.gamma_p2(i) == 1)
      num += (y - bs) * info.psi.adjoint() * info.proj.p_s;
    else
      num += y * info.psi.adjoint() * info.proj.p_s;
  }
  double a = info.alpha_p * info.plan.j_p;
  double b = info.alpha_d * static_cast<double>(p2_slots.size()) * info.proj.lambda *
             info.proj.lambda;
  return solve_identity_plus_projector(a, b, info.proj.p, num);
}

// Rank-1 backscatter fit against an arbitrary direct-path prediction
// (pred = direct estimate times the transmitted block). Shared by the full
// and P2-only pipelines.
inline CMat hbl_from_prediction(const Observation& obs, const ReaderSideInfo& info,
                                const CMat& pred) {
  std::vector<int> s1 = info.plan.p2_gamma1();
  if (s1.empty())
    throw std::invalid_argument("estimate_hbl: plan has no active backscatter slots");
  const Eigen::Index n = info.phi.rows();
  CMat z = CMat::Zero(n, info.proj.q.cols());
  for (int i : s1) z += (obs.y.at(static_cast<size_t>(i)) - pred) * info.psi.adjoint() * info.proj.q;
  z /= static_cast<double>(s1.size()) * info.alpha_d * info.proj.lambda;
  RankOne r1 = best_rank_one(z);
  return (info.proj.lambda * r1.delta) * (r1.u * r1.v.adjoint()) * info.proj.q.adjoint();
}

}  // namespace detail

/// Closed-form direct-channel estimate assuming the BD stayed silent: joint
/// LS over every phase-1 and phase-2 slot.
inline CMat estimate_gab_h0(const Observation& obs, const ReaderSideInfo& info) {
  std::vector<int> all(static_cast<size_t>(info.plan.j_d));
  for (int i = 0; i < info.plan.j_d; ++i) all[static_cast<size_t>(i)] = i;
  return detail::gab_joint_ls(obs, info, all, nullptr);
}

/// Step-1 estimate under the active hypothesis: same joint LS but the
/// phase-2 sum is restricted to the slots where the BD is known silent.
inline CMat estimate_gab_h1_initial(const Observation& obs, const ReaderSideInfo& info) {
  return detail::gab_joint_ls(obs, info, info.plan.p2_gamma0(), nullptr);
}

/// Rank-1 cascaded-channel estimate from the active slots, given a direct
/// channel estimate. Returns lambda * u1 delta1 v1^H Q^H, the minimizer of
/// the residual fit over matrices whose adjoint lies in range(P) with rank
/// at most one.
inline CMat estimate_hbl(const Observation& obs, const ReaderSideInfo& info,
                         const CMat& gab_hat) {
  detail::check_observation(obs, info, false);
  return detail::hbl_from_prediction(obs, info, gab_hat * info.probe);
}

/// Re-estimate the direct channel from all observations with the estimated
/// backscatter contribution subtracted from the active slots.
inline CMat refine_gab_h1(const Observation& obs, const ReaderSideInfo& info,
                          const CMat& hbl_hat) {
  std::vector<int> all(static_cast<size_t>(info.plan.j_d));
  for (int i = 0; i < info.plan.j_d; ++i) all[static_cast<size_t>(i)] = i;
  return detail::gab_joint_ls(obs, info, all, &hbl_hat);
}

/// Joint fit objective for a (direct, backscatter) estimate pair: squared
/// residual norms over both phases.
inline double h1_objective(const Observation& obs, const ReaderSideInfo& info, const CMat& gab,
                           const CMat& hbl) {
  double f = 0.0;
  CMat c = gab.transpose() * info.phi;
  for (const CMat& yp : obs.yp) f += (yp - c).squaredNorm();
  CMat base = gab * info.probe;
  CMat bs = hbl * info.psi;
  for (int i = 0; i < info.plan.j_d; ++i) {
    if (info.plan.gamma_p2(i) == 1)
      f += (obs.y[static_cast<size_t>(i)] - base - bs).squaredNorm();
    else
      f += (obs.y[static_cast<size_t>(i)] - base).squaredNorm();
  }
  return f;
}

struct H1Estimate {
  CMat gab_hat;
  CMat hbl_hat;
  int iterations = 0;
  double final_delta = 0.0;
  bool converged = false;
  std::vector<double> objective_trace;
};

/// Cyclic H1 estimator: initial direct estimate from the silent slots, then
/// alternate the rank-1 backscatter fit and the compensated direct refit
/// until the squared Frobenius change in the direct estimate drops to
/// epsilon, or max_iters cycles. Each half-step is an exact coordinate
/// minimizer, so the joint objective never increases.
inline H1Estimate algorithm1(const Observation& obs, const ReaderSideInfo& info, double epsilon,
                             int max_iters, bool record_trace = true) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("algorithm1: epsilon must be > 0");
  if (max_iters < 1) throw std::invalid_argument("algorithm1: max_iters must be >= 1");
  H1Estimate est;
  CMat ghat = estimate_gab_h1_initial(obs, info);
  CMat hbl = detail::hbl_from_prediction(obs, info, ghat * info.probe);
  if (record_trace) est.objective_trace.push_back(h1_objective(obs, info, ghat, hbl));
  for (int it = 1; it <= max_iters; ++it) {
    CMat gnew = refine_gab_h1(obs, info, hbl);
    hbl = detail::hbl_from_prediction(obs, info, gnew * info.probe);
    est.final_delta = (gnew - ghat).squaredNorm();
    ghat = std::move(gnew);
    est.iterations = it;
    if (record_trace) est.objective_trace.push_back(h1_objective(obs, info, ghat, hbl));
    if (!(est.final_delta > epsilon)) {
      est.converged = true;
      break;
    }
  }
  est.gab_hat = std::move(ghat);
  est.hbl_hat = std::move(hbl);
  return est;
}

/// Log generalized likelihood ratio in its expanded form. h0_est and h1_est
/// must come from the same observation. Equals the direct difference of the
/// two model residual norms.
inline double glrt_log(const Observation& obs, const ReaderSideInfo& info, const CMat& h0_est,
                       const H1Estimate& h1_est) {
  double s = 0.0;
  CMat b = h0_est * info.probe;
  CMat a_base = h1_est.gab_hat * info.probe;
  CMat bs = h1_est.hbl_hat * info.psi;
  for (int i = 0; i < info.plan.j_d; ++i) {
    CMat a = info.plan.gamma_p2(i) == 1 ? CMat(a_base + bs) : a_base;
    CMat d = a - b;
    s += 2.0 * (obs.y[static_cast<size_t>(i)].cwiseProduct(d.conjugate())).sum().real() -
         a.squaredNorm() + b.squaredNorm();
  }
  CMat c1 = h1_est.gab_hat.transpose() * info.phi;
  CMat c2 = h0_est.transpose() * info.phi;
  CMat dc = c1 - c2;
  for (const CMat& yp : obs.yp)
    s += 2.0 * (yp.cwiseProduct(dc.conjugate())).sum().real() - c1.squaredNorm() +
         c2.squaredNorm();
  return s;
}

/// Threshold rule: declare the BD present iff the log ratio strictly exceeds
/// log(eta). Ties go to H0.
inline Hypothesis detect(double log_glr, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("detect: eta must be > 0");
  return log_glr > std::log(eta) ? Hypothesis::H1 : Hypothesis::H0;
}

/// Outcome of one detector run. In full mode the direct estimates are for
/// the PanA-PanB channel itself; in P2-only mode they are for the projected
/// direct component (the channel itself is not identifiable there, and no
/// field claims to be it).
struct GlrtResult {
  double log_glr = 0.0;
  Hypothesis decision = Hypothesis::H0;
  double threshold = 1.0;
  CMat h0_direct;
  CMat h1_direct;
  CMat h1_backscatter;
  int iterations = 0;
  bool converged = false;
};

/// Full detector pipeline: both hypothesis fits, the log ratio, and the
/// threshold decision.
inline GlrtResult run_glrt(const Observation& obs, const ReaderSideInfo& info, double epsilon,
                           int max_iters, double eta) {
  GlrtResult res;
  res.h0_direct = estimate_gab_h0(obs, info);
  H1Estimate h1 = algorithm1(obs, info, epsilon, max_iters, false);
  res.log_glr = glrt_log(obs, info, res.h0_direct, h1);
  res.decision = detect(res.log_glr, eta);
  res.threshold = eta;
  res.h1_direct = std::move(h1.gab_hat);
  res.h1_backscatter = std::move(h1.hbl_hat);
  res.iterations = h1.iterations;
  res.converged = h1.converged;
  return res;
}

/// Silent-hypothesis estimate of the projected direct component when the
/// phase-1 observations are unavailable: average the per-slot LS fits and
/// project onto the feasible row space.
inline CMat p2only_estimate_hdl_h0(const Observation& obs, const ReaderSideInfo& info) {
  detail::check_observation(obs, info, false);
  const Eigen::Index n = info.phi.rows();
  const Eigen::Index m = info.psi.rows();
  CMat acc = CMat::Zero(n, m);
  for (const CMat& y : obs.y) acc += y * info.psi.adjoint() * info.proj.p;
  return acc / (static_cast<double>(info.plan.j_d) * info.alpha_d);
}

namespace detail {

inline CMat p2only_refit_hdl(const Observation& obs, const ReaderSideInfo& info,
                             const CMat& hbl) {
  const Eigen::Index n = info.phi.rows();
  const Eigen::Index m = info.psi.rows();
  CMat bs = hbl * info.psi;
  CMat acc = CMat::Zero(n, m);
  for (int i = 0; i < info.plan.j_d; ++i) {
    const CMat& y = obs.y[static_cast<size_t>(i)];
    if (info.plan.gamma_p2(i) == 1)
      acc += (y - bs) * info.psi.adjoint() * info.proj.p;
    else
      acc += y * info.psi.adjoint() * info.proj.p;
  }
  return acc / (static_cast<double>(info.plan.j_d) * info.alpha_d);
}

}  // namespace detail

/// Phase-2-only detector: the same alternating scheme, but the direct
/// component is fit by projected LS instead of the two-phase joint solve,
/// and the statistic has no phase-1 part.
inline GlrtResult p2only_glrt(const Observation& obs, const ReaderSideInfo& info, double epsilon,
                              int max_iters, double eta) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("p2only_glrt: epsilon must be > 0");
  if (max_iters < 1) throw std::invalid_argument("p2only_glrt: max_iters must be >= 1");
  detail::check_observation(obs, info, false);
  std::vector<int> s0 = info.plan.p2_gamma0();
  if (s0.empty())
    throw std::invalid_argument("p2only_glrt: plan has no silent phase-2 slots");

  GlrtResult res;
  res.h0_direct = p2only_estimate_hdl_h0(obs, info);

  const Eigen::Index n = info.phi.rows();
  const Eigen::Index m = info.psi.rows();
  CMat hdl = CMat::Zero(n, m);
  for (int i : s0) hdl += obs.y[static_cast<size_t>(i)] * info.psi.adjoint() * info.proj.p;
  hdl /= static_cast<double>(s0.size()) * info.alpha_d;
  CMat hbl = detail::hbl_from_prediction(obs, info, hdl * info.psi);
  for (int it = 1; it <= max_iters; ++it) {
    CMat hnew = detail::p2only_refit_hdl(obs, info, hbl);
    hbl = detail::hbl_from_prediction(obs, info, hnew * info.psi);
    double delta = (hnew - hdl).squaredNorm();
    hdl = std::move(hnew);
    res.iterations = it;
    if (!(delta > epsilon)) {
      res.converged = true;
      break;
    }
  }

  double s = 0.0;
  CMat b = res.h0_direct * info.psi;
  CMat a_base = hdl * info.psi;
  CMat bs = hbl * info.psi;
  for (int i = 0; i < info.plan.j_d; ++i) {
    CMat a = info.plan.gamma_p2(i) == 1 ? CMat(a_base + bs) : a_base;
    CMat d = a - b;
    s += 2.0 * (obs.y[static_cast<size_t>(i)].cwiseProduct(d.conjugate())).sum().real() -
         a.squaredNorm() + b.squaredNorm();
  }
  res.log_glr = s;
  res.decision = detect(s, eta);
  res.threshold = eta;
  res.h1_direct = std::move(hdl);
  res.h1_backscatter = std::move(hbl);
  return res;
}

}  // namespace bibc
