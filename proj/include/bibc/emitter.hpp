#pragma once

#include <vector>

#include "bibc/waveform.hpp"

namespace bibc {

/// Transmit-side nullspace description. P projects onto the orthogonal
/// complement of the K dominant right-singular directions of the estimated
/// direct channel; Q is an orthonormal basis of range(P) with Q Q^H = P by
/// construction; P_s = Lambda P rescales so the radiated energy is kept.
struct Projector {
  CMat p;    // m x m orthogonal projector, rank m - k
  CMat q;    // m x (m - k)
  CMat p_s;  // lambda * p
  double lambda = 1.0;
  int k = 0;
  bool subspace_ambiguous = false;  // sigma_k ~ sigma_{k+1}: subspace ill-defined
};

inline Projector identity_projector(int m) {
  if (m < 1) throw std::invalid_argument("identity_projector: m must be >= 1");
  Projector proj;
  proj.p = CMat::Identity(m, m);
  proj.q = CMat::Identity(m, m);
  proj.p_s = proj.p;
  proj.lambda = 1.0;
  proj.k = 0;
  return proj;
}

/// Least-squares direct-channel estimate from the phase-1 slots:
/// Ghat_BA = (1/J_p) sum_j Yp_j Phi^H (Phi Phi^H)^-1. The pilot Gram is
/// alpha_p I by construction, which the implementation checks rather than
/// assumes. The reader-side view is the plain transpose (reciprocity).
inline CMat ls_estimate_direct(const std::vector<CMat>& yp, const CMat& phi) {
  if (yp.empty()) throw std::invalid_argument("ls_estimate_direct: no phase-1 slots");
  require_finite(phi, "ls_estimate_direct");
  for (const auto& slot : yp)
    if (slot.cols() != phi.cols())
      throw std::invalid_argument("ls_estimate_direct: slot length does not match pilot");
  CMat gram = phi * phi.adjoint();
  double alpha = gram.trace().real() / static_cast<double>(gram.rows());
  if (!(alpha > 0.0) ||
      (gram - alpha * CMat::Identity(gram.rows(), gram.cols())).norm() > 1e-8 * alpha)
    throw std::invalid_argument("ls_estimate_direct: pilot rows are not orthogonal");
  CMat acc = CMat::Zero(yp.front().rows(), phi.rows());
  for (const auto& slot : yp) acc += slot * phi.adjoint();
  return acc / (alpha * static_cast<double>(yp.size()));
}

/// Builds the scaled nullspace projector from an estimated direct channel
/// (reader-side orientation, n x m): V_K = first K right singular vectors,
/// P = I - V_K V_K^H, Lambda = sqrt(m/(m-K)), Q = unitary completion of V_K.
inline Projector build_projector(const CMat& g_hat_ab, int k) {
  require_finite(g_hat_ab, "build_projector");
  const int m = static_cast<int>(g_hat_ab.cols());
  if (k < 0) throw std::invalid_argument("build_projector: k must be >= 0");
  if (k >= m) throw std::invalid_argument("build_projector: k must be < m (lambda finite)");
  if (k == 0) return identity_projector(m);

  ThinSvd svd = svd_thin(g_hat_ab);
  if (k > svd.rank)
    throw std::invalid_argument("build_projector: k exceeds the numerical rank of the estimate");
  CMat vk = svd.v.leftCols(k);
  Projector proj;
  proj.k = k;
  proj.lambda = std::sqrt(static_cast<double>(m) / (m - k));
  proj.p = CMat::Identity(m, m) - vk * vk.adjoint();
  // complete V_K to a unitary basis; the trailing columns span range(P) and
  // give Q Q^H = P exactly instead of re-factorizing P
  Eigen::HouseholderQR<CMat> qr(vk);
  CMat full = qr.householderQ() * CMat::Identity(m, m);
  proj.q = full.rightCols(m - k);
  proj.p_s = proj.lambda * proj.p;
  double next = k < svd.rank ? svd.sigma(k) : 0.0;
  proj.subspace_ambiguous = (svd.sigma(k - 1) - next) < 1e-10;
  return proj;
}

}  // namespace bibc
