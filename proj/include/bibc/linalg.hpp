#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace bibc {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

constexpr double kTwoPi = 6.283185307179586476925287;

inline void require_finite(const CMat& a, const char* what) {
  if (a.size() == 0) throw std::invalid_argument(std::string(what) + ": matrix is empty");
  if (!a.allFinite()) throw std::invalid_argument(std::string(what) + ": matrix has non-finite entries");
}

/// Thin SVD A = U diag(sigma) V^H restricted to singular values above
/// rank_tol * sigma_max. Each singular pair's free phase is pinned by making
/// the largest-magnitude entry of the right vector real and positive, so
/// repeated factorizations of equal inputs agree exactly.
struct ThinSvd {
  CMat u;
  RVec sigma;  // descending
  CMat v;
  Eigen::Index rank = 0;
};

inline ThinSvd svd_thin(const CMat& a, double rank_tol = 1e-12) {
  require_finite(a, "svd_thin");
  if (rank_tol < 0.0) throw std::invalid_argument("svd_thin: rank_tol must be >= 0");
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec& s = svd.singularValues();
  Eigen::Index r = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    const double cut = rank_tol * s(0);
    while (r < s.size() && s(r) > cut) ++r;
  }
  ThinSvd out;
  out.u = svd.matrixU().leftCols(r);
  out.v = svd.matrixV().leftCols(r);
  out.sigma = s.head(r);
  out.rank = r;
  for (Eigen::Index i = 0; i < r; ++i) {
    Eigen::Index imax = 0;
    out.v.col(i).cwiseAbs().maxCoeff(&imax);
    cplx pivot = out.v(imax, i);
    double mag = std::abs(pivot);
    if (mag > 0.0) {
      cplx rot = std::conj(pivot) / mag;  // same rotation on u keeps u sigma v^H fixed
      out.v.col(i) *= rot;
      out.u.col(i) *= rot;
    }
  }
  return out;
}

/// Best rank-1 approximation of A in Frobenius norm: unit factors u, v and
/// gain delta >= 0 with A ~ delta * u v^H. A zero input is flagged degenerate
/// and returns delta = 0 with arbitrary unit factors.
struct RankOne {
  CVec u;
  double delta = 0.0;
  CVec v;
  bool degenerate = false;
};

inline RankOne best_rank_one(const CMat& a) {
  require_finite(a, "best_rank_one");
  ThinSvd svd = svd_thin(a, 0.0);
  RankOne out;
  if (svd.rank == 0) {
    out.u = CVec::Zero(a.rows());
    out.u(0) = 1.0;
    out.v = CVec::Zero(a.cols());
    out.v(0) = 1.0;
    out.degenerate = true;
    return out;
  }
  out.u = svd.u.col(0);
  out.delta = svd.sigma(0);
  out.v = svd.v.col(0);
  return out;
}

/// Right-multiplies RHS by (a I + b P)^-1 where P is an orthogonal projector.
/// Uses the exact resolvent (a I + b P)^-1 = (1/a) I - b / (a (a + b)) P,
/// which follows from P^2 = P, instead of forming any dense inverse.
inline CMat solve_identity_plus_projector(double a, double b, const CMat& p, const CMat& rhs) {
  if (!(a > 0.0)) throw std::invalid_argument("solve_identity_plus_projector: a must be > 0");
  if (!(b >= 0.0)) throw std::invalid_argument("solve_identity_plus_projector: b must be >= 0");
  require_finite(p, "solve_identity_plus_projector");
  require_finite(rhs, "solve_identity_plus_projector");
  if (p.rows() != p.cols())
    throw std::invalid_argument("solve_identity_plus_projector: p must be square");
  if (rhs.cols() != p.rows())
    throw std::invalid_argument("solve_identity_plus_projector: rhs columns must match p");
  const double scale = std::max(1.0, p.norm());
  if ((p * p - p).norm() > 1e-10 * scale || (p.adjoint() - p).norm() > 1e-10 * scale)
    throw std::invalid_argument("solve_identity_plus_projector: p is not an orthogonal projector");
  return rhs / a - (b / (a * (a + b))) * (rhs * p);
}

}  // namespace bibc
