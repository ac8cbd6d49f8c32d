#pragma once

#include <vector>

#include "bibc/rng.hpp"
#include "bibc/scene.hpp"

namespace bibc {

enum class Hypothesis { H0, H1 };

/// Slot schedule for the two protocol phases. gamma holds the BD reflection
/// coefficient per slot over the whole run (phase 1 first, then phase 2);
/// it is always 0 during phase 1. The p2_* helpers index into the phase-2
/// observation list directly (0-based within phase 2).
struct PhasePlan {
  int j_p = 1;
  int tau_p = 16;
  int j_d = 2;
  int tau_d = 16;
  std::vector<int> gamma;

  int gamma_p2(int i) const { return gamma.at(static_cast<size_t>(j_p + i)); }

  std::vector<int> p2_gamma0() const {
    std::vector<int> s;
    for (int i = 0; i < j_d; ++i)
      if (gamma_p2(i) == 0) s.push_back(i);
    return s;
  }

  std::vector<int> p2_gamma1() const {
    std::vector<int> s;
    for (int i = 0; i < j_d; ++i)
      if (gamma_p2(i) == 1) s.push_back(i);
    return s;
  }
};

/// Default slot pattern: silent throughout phase 1, then alternating
/// 0,1,0,1,... in phase 2 so both halves are equally represented.
inline PhasePlan make_phase_plan(int j_p, int j_d, int tau_p, int tau_d) {
  if (j_p < 1) throw std::invalid_argument("make_phase_plan: j_p must be >= 1");
  if (j_d < 2 || j_d % 2 != 0)
    throw std::invalid_argument("make_phase_plan: j_d must be even and >= 2");
  if (tau_p < 1 || tau_d < 1)
    throw std::invalid_argument("make_phase_plan: slot lengths must be >= 1");
  PhasePlan plan;
  plan.j_p = j_p;
  plan.tau_p = tau_p;
  plan.j_d = j_d;
  plan.tau_d = tau_d;
  plan.gamma.assign(static_cast<size_t>(j_p), 0);
  for (int i = 0; i < j_d; ++i) plan.gamma.push_back(i % 2);
  return plan;
}

namespace detail {

// first `rows` rows of a cols-point DFT family, scaled so the Gram is
// (p_t cols / rows) I
inline CMat dft_rows(int rows, int cols, double scale) {
  CMat f(rows, cols);
  for (int k = 0; k < rows; ++k)
    for (int t = 0; t < cols; ++t)
      f(k, t) = std::polar(scale, -kTwoPi * static_cast<double>(k) * static_cast<double>(t) /
                                      static_cast<double>(cols));
  return f;
}

}  // namespace detail

/// Pilot block Phi (n x tau_p) with Phi Phi^H = alpha_p I, alpha_p = p_t tau_p / n.
inline CMat make_pilot(int n, int tau_p, double p_t) {
  if (n < 1) throw std::invalid_argument("make_pilot: n must be >= 1");
  if (tau_p < n) throw std::invalid_argument("make_pilot: tau_p must be >= n");
  if (!(p_t > 0.0)) throw std::invalid_argument("make_pilot: p_t must be > 0");
  return detail::dft_rows(n, tau_p, std::sqrt(p_t / n));
}

/// Probe block Psi (m x tau_d) with Psi Psi^H = alpha_d I, alpha_d = p_t tau_d / m.
inline CMat make_probe(int m, int tau_d, double p_t) {
  if (m < 1) throw std::invalid_argument("make_probe: m must be >= 1");
  if (tau_d < m) throw std::invalid_argument("make_probe: tau_d must be >= m");
  if (!(p_t > 0.0)) throw std::invalid_argument("make_probe: p_t must be > 0");
  return detail::dft_rows(m, tau_d, std::sqrt(p_t / m));
}

struct Waveforms {
  CMat phi;  // n x tau_p
  CMat psi;  // m x tau_d
  double alpha_p = 0.0;
  double alpha_d = 0.0;
  double p_t_phase1 = 0.0;
  double p_t_phase2 = 0.0;
};

inline Waveforms make_waveforms(int n, int m, const PhasePlan& plan, double p_t_phase1,
                                double p_t_phase2) {
  Waveforms wf;
  wf.phi = make_pilot(n, plan.tau_p, p_t_phase1);
  wf.psi = make_probe(m, plan.tau_d, p_t_phase2);
  wf.alpha_p = p_t_phase1 * plan.tau_p / n;
  wf.alpha_d = p_t_phase2 * plan.tau_d / m;
  wf.p_t_phase1 = p_t_phase1;
  wf.p_t_phase2 = p_t_phase2;
  return wf;
}

struct PhasePowers {
  double p_t_phase1 = 0.0;
  double p_t_phase2 = 0.0;
};

/// Per-phase transmit powers hitting the target SNRs against unit-variance
/// noise: snr_p = beta_ba p_t J_p tau_p and snr_d = beta_ac beta_cb p_t J_d
/// tau_d gamma_bar with gamma_bar = 1/2 (equal slot split). Linear SNRs.
inline PhasePowers calibrate_powers(const ChannelSet& ch, const PhasePlan& plan, double snr_p,
                                    double snr_d) {
  if (!(snr_p > 0.0) || !(snr_d > 0.0))
    throw std::invalid_argument("calibrate_powers: SNRs must be > 0");
  MeanPathGains g = mean_path_gains(ch);
  if (!(g.beta_ba > 0.0) || !(g.beta_ac > 0.0) || !(g.beta_cb > 0.0))
    throw std::invalid_argument("calibrate_powers: channel gains must be nonzero");
  PhasePowers p;
  p.p_t_phase1 = snr_p / (g.beta_ba * plan.j_p * plan.tau_p);
  p.p_t_phase2 = snr_d / (g.beta_ac * g.beta_cb * plan.j_d * plan.tau_d * 0.5);
  return p;
}

/// Observations of one protocol run: yp holds the phase-1 slots (received at
/// PanA, m x tau_p each), y the phase-2 slots (received at PanB, n x tau_d).
struct Observation {
  std::vector<CMat> yp;
  std::vector<CMat> y;
};

/// Phase 1: PanB sends pilots, the BD is silent, PanA receives
/// Yp_j = G_AB^T Phi + W. noise_scale is a test hook; 1 is the model.
inline std::vector<CMat> transmit_phase1(const ChannelSet& ch, const Waveforms& wf,
                                         const PhasePlan& plan, Rng& rng,
                                         double noise_scale = 1.0) {
  if (wf.phi.rows() != ch.g_ab.rows())
    throw std::invalid_argument("transmit_phase1: pilot rows must match PanB antenna count");
  CMat clean = ch.g_ab.transpose() * wf.phi;
  std::vector<CMat> yp;
  yp.reserve(plan.j_p);
  for (int j = 0; j < plan.j_p; ++j) {
    CMat slot = clean;
    if (noise_scale != 0.0) slot += noise_scale * rng.cnormal_matrix(clean.rows(), clean.cols());
    yp.push_back(std::move(slot));
  }
  return yp;
}

/// Phase 2: PanA sends the projected probe, PanB receives
/// Y_j = G_AB P_s Psi + gamma_j g_CB g_AC^T P_s Psi + W. Under H0 the
/// backscatter term is absent in every slot regardless of the plan.
inline std::vector<CMat> transmit_phase2(const ChannelSet& ch, const Waveforms& wf,
                                         const PhasePlan& plan, const CMat& p_s, Hypothesis hyp,
                                         Rng& rng, double noise_scale = 1.0) {
  if (p_s.rows() != ch.g_ab.cols() || p_s.cols() != ch.g_ab.cols())
    throw std::invalid_argument("transmit_phase2: p_s must be m x m");
  if (wf.psi.rows() != ch.g_ab.cols())
    throw std::invalid_argument("transmit_phase2: probe rows must match PanA antenna count");
  CMat probe = p_s * wf.psi;
  CMat direct = ch.g_ab * probe;
  CMat backscatter = (ch.g_cb * ch.g_ac.transpose()) * probe;
  std::vector<CMat> y;
  y.reserve(plan.j_d);
  for (int i = 0; i < plan.j_d; ++i) {
    CMat slot = direct;
    if (hyp == Hypothesis::H1 && plan.gamma_p2(i) == 1) slot += backscatter;
    if (noise_scale != 0.0) slot += noise_scale * rng.cnormal_matrix(slot.rows(), slot.cols());
    y.push_back(std::move(slot));
  }
  return y;
}

}  // namespace bibc
