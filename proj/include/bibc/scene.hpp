#pragma once

#include <vector>

#include "bibc/linalg.hpp"

namespace bibc {

/// Planar geometry: two uniform linear arrays (PanA with m elements, PanB
/// with n), a single-antenna backscatter device, and one specular reflector
/// modeled as the horizontal line y = reflector_y. Arrays lie along the
/// y-axis, so broadside is +x and PanB sits at 0 degrees from PanA.
/// Defaults are the reference evaluation layout.
struct Scene {
  Eigen::Vector2d pan_a_center{0.0, 0.0};
  Eigen::Vector2d pan_b_center{6.0, 0.0};
  int m = 16;
  int n = 16;
  double d_ant = 0.5;   // element spacing in wavelengths
  double lambda = 0.1;  // wavelength, meters
  Eigen::Vector2d bd_position{3.0, 10.0};
  double reflector_y = -4.0;
  double g_smc = 0.5;  // real amplitude gain of the specular component
};

enum class Panel { A, B };

inline std::vector<Eigen::Vector2d> antenna_positions(const Scene& sc, Panel which) {
  int count = which == Panel::A ? sc.m : sc.n;
  Eigen::Vector2d center = which == Panel::A ? sc.pan_a_center : sc.pan_b_center;
  if (count < 1) throw std::invalid_argument("antenna_positions: element count must be >= 1");
  if (!(sc.lambda > 0.0) || !(sc.d_ant > 0.0))
    throw std::invalid_argument("antenna_positions: lambda and d_ant must be > 0");
  std::vector<Eigen::Vector2d> pos;
  pos.reserve(count);
  double step = sc.d_ant * sc.lambda;
  for (int i = 0; i < count; ++i) {
    double off = (static_cast<double>(i) - (count - 1) / 2.0) * step;
    pos.emplace_back(center.x(), center.y() + off);
  }
  return pos;
}

/// Direct channel G_AB (n x m, PanA -> PanB) plus the two backscatter legs
/// g_AC (PanA -> BD, length m) and g_CB (BD -> PanB, length n). The reverse
/// directions are reciprocity views of the same data, not separate storage.
struct ChannelSet {
  CMat g_ab;
  CVec g_ac;
  CVec g_cb;
  CMat g_ba() const { return g_ab.transpose(); }
  const CVec& g_ca() const { return g_ac; }
  const CVec& g_bc() const { return g_cb; }
};

namespace detail {

// single propagation path: amplitude 1/d, phase -2 pi d / lambda
inline cplx path_term(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double lambda) {
  double d = (a - b).norm();
  return std::polar(1.0 / d, -kTwoPi * d / lambda);
}

// LoS plus one image-source specular bounce off the line y = reflector_y
inline cplx two_ray(const Eigen::Vector2d& tx, const Eigen::Vector2d& rx, const Scene& sc) {
  cplx v = path_term(tx, rx, sc.lambda);
  if (sc.g_smc != 0.0) {
    Eigen::Vector2d image(tx.x(), 2.0 * sc.reflector_y - tx.y());
    v += sc.g_smc * path_term(image, rx, sc.lambda);
  }
  return v;
}

}  // namespace detail

inline ChannelSet synthesize_channels(const Scene& sc) {
  auto pa = antenna_positions(sc, Panel::A);
  auto pb = antenna_positions(sc, Panel::B);
  double min_y = sc.bd_position.y();
  for (const auto& p : pa) min_y = std::min(min_y, p.y());
  for (const auto& p : pb) min_y = std::min(min_y, p.y());
  if (!(min_y > sc.reflector_y))
    throw std::invalid_argument(
        "synthesize_channels: all antennas and the BD must lie strictly above reflector_y");
  for (const auto& p : pa)
    if ((p - sc.bd_position).norm() == 0.0)
      throw std::invalid_argument("synthesize_channels: bd_position coincides with a PanA element");
  for (const auto& p : pb)
    if ((p - sc.bd_position).norm() == 0.0)
      throw std::invalid_argument("synthesize_channels: bd_position coincides with a PanB element");

  ChannelSet ch;
  ch.g_ab.resize(sc.n, sc.m);
  for (int r = 0; r < sc.n; ++r)
    for (int c = 0; c < sc.m; ++c) ch.g_ab(r, c) = detail::two_ray(pa[c], pb[r], sc);
  ch.g_ac.resize(sc.m);
  for (int c = 0; c < sc.m; ++c) ch.g_ac(c) = detail::two_ray(pa[c], sc.bd_position, sc);
  ch.g_cb.resize(sc.n);
  for (int r = 0; r < sc.n; ++r) ch.g_cb(r) = detail::two_ray(sc.bd_position, pb[r], sc);
  require_finite(ch.g_ab, "synthesize_channels");
  return ch;
}

/// Far-field array response along departure angle theta (radians, broadside
/// at 0): entry m is exp(j m 2 pi d_ant sin theta), entry 0 is 1.
inline CVec steering_vector(double theta, int m, double d_ant) {
  if (m < 1) throw std::invalid_argument("steering_vector: m must be >= 1");
  CVec g(m);
  double phase_step = kTwoPi * d_ant * std::sin(theta);
  for (int i = 0; i < m; ++i) g(i) = std::polar(1.0, phase_step * i);
  return g;
}

struct MeanPathGains {
  double beta_ba = 0.0;
  double beta_ac = 0.0;
  double beta_cb = 0.0;
};

inline MeanPathGains mean_path_gains(const ChannelSet& ch) {
  MeanPathGains g;
  g.beta_ba = ch.g_ab.squaredNorm() / static_cast<double>(ch.g_ab.rows() * ch.g_ab.cols());
  g.beta_ac = ch.g_ac.squaredNorm() / static_cast<double>(ch.g_ac.size());
  g.beta_cb = ch.g_cb.squaredNorm() / static_cast<double>(ch.g_cb.size());
  return g;
}

/// Rescales the two backscatter legs to unit mean-square gain, leaving the
/// direct channel untouched. Positive real scaling, so phases survive.
inline ChannelSet normalize_backscatter(const ChannelSet& ch) {
  MeanPathGains g = mean_path_gains(ch);
  if (!(g.beta_ac > 0.0) || !(g.beta_cb > 0.0))
    throw std::invalid_argument("normalize_backscatter: backscatter channel is zero");
  ChannelSet out;
  out.g_ab = ch.g_ab;
  out.g_ac = ch.g_ac / std::sqrt(g.beta_ac);
  out.g_cb = ch.g_cb / std::sqrt(g.beta_cb);
  return out;
}

}  // namespace bibc
