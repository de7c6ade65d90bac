#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "pqcausal/pqform.hpp"

namespace pqcausal {

// Open diamond of signature (p, q) in canonical position: the interior of the
// joint of the unit sphere S- of the temporal block and the unit sphere S+ of
// the spatial block. Membership has the closed form |pt_sp| + |pt_tm| < 1.
// Coordinates follow the standard frame, spatial block first; e1 denotes the
// first temporal axis (index p).
struct FlatDiamond {
  int p = 1;
  int q = 1;

  FlatDiamond(int p_, int q_) : p(p_), q(q_) {
    require(p >= 1 && q >= 1, "FlatDiamond: p and q must be >= 1");
  }

  int dim() const { return p + q; }
  PseudoMetric metric() const { return PseudoMetric::standard(p, q); }
};

inline bool in_flat_diamond(const FlatDiamond& d, const Vec& pt,
                            double tol = 0.0) {
  require(pt.size() == d.dim(), "in_flat_diamond: dimension mismatch");
  require(tol >= 0, "in_flat_diamond: tol must be >= 0");
  return pt.head(d.p).norm() + pt.tail(d.q).norm() < 1.0 - tol;
}

namespace detail {

// Deterministic unit vectors covering S^(q-1). q = 1 is the exact two-point
// sphere; q = 2 uses equal angles, q = 3 a Fibonacci lattice, higher q a
// fixed-seed Gaussian draw.
inline std::vector<Vec> unit_sphere_points(int q, int count) {
  std::vector<Vec> pts;
  if (q == 1) {
    pts.push_back(Vec::Constant(1, 1.0));
    pts.push_back(Vec::Constant(1, -1.0));
    return pts;
  }
  pts.reserve(static_cast<std::size_t>(count));
  if (q == 2) {
    for (int i = 0; i < count; ++i) {
      const double a = 2.0 * std::numbers::pi * i / count;
      Vec v(2);
      v << std::cos(a), std::sin(a);
      pts.push_back(std::move(v));
    }
  } else if (q == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = golden * i;
      Vec v(3);
      v << r * std::cos(a), r * std::sin(a), z;
      pts.push_back(std::move(v));
    }
  } else {
    std::mt19937_64 rng(0x5f3759df);
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (static_cast<int>(pts.size()) < count) {
      Vec v(q);
      for (int i = 0; i < q; ++i) v(i) = gauss(rng);
      const double n = v.norm();
      if (n > 1e-12) pts.push_back(v / n);
    }
  }
  return pts;
}

}  // namespace detail

// Brute-force membership: pt lies in the diamond iff its temporal projection
// lies in the open unit disk and the segment from pt to every point of S- is
// timelike. The sample set is rotated so one sample sits exactly at the
// temporal direction of pt; the nearest sphere point is then among the
// samples and the sampled minimum equals the true minimum, instead of
// overshooting by the sampling resolution.
inline bool diamond_membership_oracle(const FlatDiamond& d, const Vec& pt,
                                      int sphere_samples, double tol = 0.0) {
  require(pt.size() == d.dim(), "diamond_membership_oracle: dimension mismatch");
  require(sphere_samples >= 2 * d.q,
          "diamond_membership_oracle: too few sphere samples");
  const Vec tmp = pt.tail(d.q);
  if (tmp.norm() >= 1.0) return false;

  std::vector<Vec> sphere = detail::unit_sphere_points(d.q, sphere_samples);
  const double tn = tmp.norm();
  if (tn > 0 && d.q > 1) {
    Vec dir = tmp / tn;
    Vec v = sphere.front() - dir;
    const double vn2 = v.squaredNorm();
    if (vn2 > 1e-24) {
      for (Vec& s : sphere) s -= v * (2.0 * s.dot(v) / vn2);
    }
  }

  const PseudoMetric g = d.metric();
  Vec s_full = Vec::Zero(d.dim());
  for (const Vec& s : sphere) {
    s_full.tail(d.q) = s;
    if (classify_segment(g, pt, s_full, tol) != CausalClass::Timelike)
      return false;
  }
  return true;
}

// Open half-cone future of the axis subspace L = span(e2..eq) of the temporal
// block: points whose spatial radius is dominated by the e1 height.
inline bool in_future_of_L(const FlatDiamond& d, const Vec& pt,
                           double tol = 0.0) {
  require(pt.size() == d.dim(), "in_future_of_L: dimension mismatch");
  return pt.head(d.p).norm() < pt(d.p) - tol;
}

// Normalized inversion centered at e1. The raw inversion
//   x |-> -(x - e1) / Q(x - e1)
// sends S- \ {e1} onto the hyperplane <., e1> = -1/2; translating by e1/2 and
// reflecting the e1 coordinate (sigma) lands S- on L itself and the diamond
// interior on the future side. Undefined on the light cone of e1.
inline Vec inversion_phi(const FlatDiamond& d, const Vec& pt) {
  require(pt.size() == d.dim(), "inversion_phi: dimension mismatch");
  const PseudoMetric g = d.metric();
  Vec u = pt;
  u(d.p) -= 1.0;  // pt - e1
  const double qu = g.quad(u);
  require(qu != 0.0, "inversion_phi: point on the light cone of e1");
  Vec w = -u / qu;
  w(d.p) += 0.5;
  w(d.p) = -w(d.p);
  return w;
}

// Inverse of inversion_phi; the raw inversion is an involution around e1, so
// the inverse is the same formula conjugated by the normalization.
inline Vec inversion_phi_inverse(const FlatDiamond& d, const Vec& w) {
  require(w.size() == d.dim(), "inversion_phi_inverse: dimension mismatch");
  const PseudoMetric g = d.metric();
  Vec z = w;
  z(d.p) = -z(d.p);
  z(d.p) -= 0.5;
  const double qz = g.quad(z);
  require(qz != 0.0, "inversion_phi_inverse: point on the light cone");
  Vec pt = -z / qz;
  pt(d.p) += 1.0;
  return pt;
}

// Point of the product model H^p x H^q: x on the unit hyperboloid inside the
// span of the spatial block and e1 (positive sheet, stored as spatial part
// plus e1 height), y in L identified with R^(q-1), and the half-space
// height t > 0.
struct ProductModelPoint {
  Vec x;     // size p+1, (spatial part, e1 height), |spatial|^2 - height^2 = -1
  Vec y;     // size q-1
  double t = 1.0;

  ProductModelPoint(Vec x_, Vec y_, double t_)
      : x(std::move(x_)), y(std::move(y_)), t(t_) {
    require(x.size() >= 2, "ProductModelPoint: x must have size p+1");
    const double h = x(x.size() - 1);
    const double qx = x.head(x.size() - 1).squaredNorm() - h * h;
    require(std::abs(qx + 1.0) <= 1e-12,
            "ProductModelPoint: x must satisfy Q(x) = -1");
    require(h >= 1.0, "ProductModelPoint: x must lie on the positive sheet");
    require(t > 0, "ProductModelPoint: t must be > 0");
  }

  static ProductModelPoint from_chart(const Vec& u, const Vec& y, double t) {
    Vec x(u.size() + 1);
    x.head(u.size()) = u;
    x(u.size()) = std::sqrt(1.0 + u.squaredNorm());
    return ProductModelPoint(std::move(x), y, t);
  }

  int p() const { return static_cast<int>(x.size()) - 1; }
  int q() const { return static_cast<int>(y.size()) + 1; }
};

// The product chart psi(x, y, t) = t*x + y, a diffeomorphism onto the future
// of L.
inline Vec psi_product(const ProductModelPoint& m) {
  const int p = m.p();
  const int q = m.q();
  Vec pt(p + q);
  pt.head(p) = m.t * m.x.head(p);
  pt(p) = m.t * m.x(p);
  pt.tail(q - 1) = m.y;
  return pt;
}

// Chart inverse on the future of L: t is the pseudo-distance to L, x the
// normalized hyperboloid point, y the residual L coordinates.
inline ProductModelPoint psi_chart(const FlatDiamond& d, const Vec& pt) {
  require(pt.size() == d.dim(), "psi_chart: dimension mismatch");
  require(in_future_of_L(d, pt), "psi_chart: point not in the future of L");
  const double s = pt(d.p);
  const double r2 = pt.head(d.p).squaredNorm();
  const double t = std::sqrt(s * s - r2);
  Vec x(d.p + 1);
  x.head(d.p) = pt.head(d.p) / t;
  x(d.p) = s / t;
  return ProductModelPoint(std::move(x), pt.tail(d.q - 1), t);
}

enum class ConformalMap { Phi, Psi };

struct ConformalityResult {
  double factor = 0.0;    // length-scale of the pushforward
  double residual = 0.0;  // relative misfit of J^T G J against the source form
  bool pass = false;      // residual <= tol
};

namespace detail {

inline Mat flat_metric_matrix(int p, int q) {
  Vec diag(p + q);
  diag.head(p).setOnes();
  diag.tail(q).setConstant(-1.0);
  return diag.asDiagonal();
}

inline ConformalityResult best_fit_factor(const Mat& pullback,
                                          const Mat& source, double tol) {
  const double mu =
      (pullback.array() * source.array()).sum() / source.squaredNorm();
  require(mu > 0, "conformality_check: nonpositive conformal fit");
  ConformalityResult res;
  res.factor = 1.0 / std::sqrt(mu);
  res.residual = (pullback - mu * source).norm() / (mu * source.norm());
  res.pass = res.residual <= tol;
  return res;
}

}  // namespace detail

// Measures how close the differential of inversion_phi at pt is to a
// conformal map: finite-difference Jacobian J, then best scalar fit of
// J^T G J against G itself. The reported factor is the length-scale of the
// pushforward, i.e. 1/sqrt of the form fit.
inline ConformalityResult conformality_check_phi(const FlatDiamond& d,
                                                 const Vec& pt, double fd_step,
                                                 double tol = 1e-6) {
  require(fd_step > 0, "conformality_check: fd_step must be > 0");
  const PseudoMetric g = d.metric();
  Vec u = pt;
  u(d.p) -= 1.0;
  require(std::abs(g.quad(u)) >= 10.0 * fd_step,
          "conformality_check: too close to the light cone of e1");

  const int n = d.dim();
  Mat J(n, n);
  for (int j = 0; j < n; ++j) {
    Vec hi = pt, lo = pt;
    hi(j) += fd_step;
    lo(j) -= fd_step;
    J.col(j) = (inversion_phi(d, hi) - inversion_phi(d, lo)) / (2.0 * fd_step);
  }
  const Mat G = detail::flat_metric_matrix(d.p, d.q);
  return detail::best_fit_factor(J.transpose() * G * J, G, tol);
}

// Same check for the product chart psi in chart coordinates (u, y, t). The
// source form is the product metric: hyperboloid block I - u u^T / (1+|u|^2),
// and the half-space block -(|dy|^2 + dt^2) / t^2. For an exact chart the
// factor equals 1/t.
inline ConformalityResult conformality_check_psi(const ProductModelPoint& m,
                                                 double fd_step,
                                                 double tol = 1e-6) {
  require(fd_step > 0, "conformality_check: fd_step must be > 0");
  require(m.t >= 10.0 * fd_step,
          "conformality_check: too close to the t = 0 boundary");
  const int p = m.p();
  const int q = m.q();
  const int n = p + q;

  const Vec u0 = m.x.head(p);
  Vec chart(n);
  chart.head(p) = u0;
  chart.segment(p, q - 1) = m.y;
  chart(n - 1) = m.t;

  auto eval = [&](const Vec& z) {
    return psi_product(ProductModelPoint::from_chart(
        z.head(p), z.segment(p, q - 1), z(n - 1)));
  };

  Mat J(n, n);
  for (int j = 0; j < n; ++j) {
    Vec hi = chart, lo = chart;
    hi(j) += fd_step;
    lo(j) -= fd_step;
    J.col(j) = (eval(hi) - eval(lo)) / (2.0 * fd_step);
  }

  Mat source = Mat::Zero(n, n);
  source.topLeftCorner(p, p) =
      Mat::Identity(p, p) - u0 * u0.transpose() / (1.0 + u0.squaredNorm());
  const double inv_t2 = 1.0 / (m.t * m.t);
  for (int i = p; i < n; ++i) source(i, i) = -inv_t2;

  const Mat G = detail::flat_metric_matrix(p, q);
  return detail::best_fit_factor(J.transpose() * G * J, source, tol);
}

}  // namespace pqcausal
