#pragma once

// Reference implementations used as test oracles. They deliberately avoid the
// library's geometry, steering and solver code paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec2 = std::array<double, 2>;

struct Segment {
  Vec2 a;
  Vec2 b;
};

inline double cross(const Vec2& u, const Vec2& v) { return u[0] * v[1] - u[1] * v[0]; }
inline Vec2 sub(const Vec2& u, const Vec2& v) { return {u[0] - v[0], u[1] - v[1]}; }

// Reflection of p across the infinite line through s.
inline Vec2 reflect(const Vec2& p, const Segment& s) {
  const Vec2 d = sub(s.b, s.a);
  const double t = ((p[0] - s.a[0]) * d[0] + (p[1] - s.a[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1]);
  const Vec2 foot{s.a[0] + t * d[0], s.a[1] + t * d[1]};
  return {2.0 * foot[0] - p[0], 2.0 * foot[1] - p[1]};
}

// Parameters (t on p->q, u on s) of the crossing of two non-parallel segments.
inline bool crossing(const Vec2& p, const Vec2& q, const Segment& s, double& t, double& u) {
  const Vec2 r = sub(q, p);
  const Vec2 e = sub(s.b, s.a);
  const double den = cross(r, e);
  if (std::abs(den) < 1e-14) return false;
  const Vec2 w = sub(s.a, p);
  t = cross(w, e) / den;
  u = cross(w, r) / den;
  return true;
}

// Proper crossing: strictly inside both segments.
inline bool blocks(const Vec2& p, const Vec2& q, const Segment& s, double tol = 1e-9) {
  double t = 0.0, u = 0.0;
  if (!crossing(p, q, s, t, u)) return false;
  const double lt = std::hypot(q[0] - p[0], q[1] - p[1]);
  const double lu = std::hypot(s.b[0] - s.a[0], s.b[1] - s.a[1]);
  return t * lt > tol && (1.0 - t) * lt > tol && u * lu > tol && (1.0 - u) * lu > tol;
}

inline bool leg_clear(const Vec2& p, const Vec2& q, const std::vector<Segment>& walls, int skip_a, int skip_b) {
  for (int w = 0; w < static_cast<int>(walls.size()); ++w) {
    if (w == skip_a || w == skip_b) continue;
    if (blocks(p, q, walls[w])) return false;
  }
  return true;
}

// Recomputes the image from the wall chain (first reflection first), then walks
// the specular path back from the probe.
inline bool visible_2d(const Vec2& src, const std::vector<int>& chain, const Vec2& probe,
                       const std::vector<Segment>& walls) {
  std::vector<Vec2> images{src};
  for (int w : chain) images.push_back(reflect(images.back(), walls[w]));
  Vec2 target = probe;
  int on = -1;
  for (auto k = static_cast<int>(chain.size()); k >= 1; --k) {
    const int w = chain[k - 1];
    const Vec2& img = images[k];
    double t = 0.0, u = 0.0;
    if (!crossing(target, img, walls[w], t, u)) return false;
    const double lu = std::hypot(walls[w].b[0] - walls[w].a[0], walls[w].b[1] - walls[w].a[1]);
    if (t <= 0.0 || t >= 1.0 || u * lu < -1e-9 || (1.0 - u) * lu < -1e-9) return false;
    const Vec2 hit{target[0] + t * (img[0] - target[0]), target[1] + t * (img[1] - target[1])};
    if (!leg_clear(target, hit, walls, w, on)) return false;
    target = hit;
    on = w;
  }
  return leg_clear(target, src, walls, on, -1);
}

// Number of lattice images of order <= n in a shoebox of dimension dim. Each
// axis with k > 0 reflections has two states (first bounce low or high).
inline long lattice_count(int dim, int n) {
  auto per_axis = [](int k) { return k == 0 ? 1 : 2; };
  long total = 0;
  for (int x = 0; x <= n; ++x)
    for (int y = 0; x + y <= n; ++y) {
      if (dim == 2) {
        total += per_axis(x) * per_axis(y);
        continue;
      }
      for (int z = 0; x + y + z <= n; ++z) total += per_axis(x) * per_axis(y) * per_axis(z);
    }
  return total;
}

inline double sinc(double t) { return t == 0.0 ? 1.0 : std::sin(std::numbers::pi * t) / (std::numbers::pi * t); }

// One-term RIR evaluated directly at every sample.
inline std::vector<double> single_path_rir(double d, double fs, double c, int tw, std::size_t len) {
  std::vector<double> h(len, 0.0);
  const double delay = fs * d / c;
  for (std::size_t n = 0; n < len; ++n) {
    const double t = static_cast<double>(n) - delay;
    if (std::abs(t) > tw / 2.0) continue;
    h[n] = 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * t / tw)) * sinc(t) / (4.0 * std::numbers::pi * d);
  }
  return h;
}

// Backward-integrated energy decay fitted between hi_db and lo_db, scaled to 60 dB.
inline double schroeder_t60(const std::vector<double>& h, double fs, double hi_db = -5.0, double lo_db = -25.0) {
  std::vector<double> e(h.size() + 1, 0.0);
  for (std::size_t n = h.size(); n-- > 0;) e[n] = e[n + 1] + h[n] * h[n];
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  double k = 0.0;
  for (std::size_t n = 0; n < h.size(); ++n) {
    const double db = 10.0 * std::log10(e[n] / e[0]);
    if (db > hi_db || db < lo_db) continue;
    const double t = static_cast<double>(n) / fs;
    sx += t;
    sy += db;
    sxx += t * t;
    sxy += t * db;
    k += 1.0;
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return -60.0 / slope;
}

// Far-field plane-wave phase for a mic offset r from the centroid and a unit
// vector u toward the source, normalized over m mics.
inline std::complex<double> plane_wave(const Eigen::Vector3d& r, const Eigen::Vector3d& u, double f, double c,
                                       double m) {
  return std::polar(1.0 / std::sqrt(m), 2.0 * std::numbers::pi * f * r.dot(u) / c);
}

inline Eigen::VectorXcd steer(const std::vector<Eigen::Vector3d>& mics, const Eigen::Vector3d& u, double f,
                              double c) {
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : mics) centroid += p;
  centroid /= static_cast<double>(mics.size());
  Eigen::VectorXcd a(static_cast<Eigen::Index>(mics.size()));
  for (std::size_t m = 0; m < mics.size(); ++m)
    a(static_cast<Eigen::Index>(m)) = plane_wave(mics[m] - centroid, u, f, c, static_cast<double>(mics.size()));
  return a;
}

// Regularized least squares (delta I + X^T X) w = X^T d with pre-windowed
// regressors x_n = [x[n], x[n-1], ..., x[n-L+1]].
inline Eigen::VectorXd regularized_ls(const std::vector<double>& x, const std::vector<double>& d, std::size_t len,
                                      double delta) {
  const auto L = static_cast<Eigen::Index>(len);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.size()), L);
  for (std::size_t n = 0; n < x.size(); ++n)
    for (std::size_t k = 0; k < len && k <= n; ++k) X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) = x[n - k];
  Eigen::VectorXd dv = Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
  const Eigen::MatrixXd A = delta * Eigen::MatrixXd::Identity(L, L) + X.transpose() * X;
  return A.fullPivLu().solve(X.transpose() * dv);
}

}  // namespace oracle
