#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "pqcausal/common.hpp"

namespace pqcausal {

enum class CausalClass { Spacelike, Lightlike, Timelike };

enum class SubspaceClass { Spacelike, Lightlike, Causal, Timelike, Mixed };

inline bool is_causal(CausalClass c) { return c != CausalClass::Spacelike; }

inline const char* to_string(CausalClass c) {
  switch (c) {
    case CausalClass::Spacelike: return "spacelike";
    case CausalClass::Lightlike: return "lightlike";
    case CausalClass::Timelike: return "timelike";
  }
  return "?";
}

inline const char* to_string(SubspaceClass c) {
  switch (c) {
    case SubspaceClass::Spacelike: return "spacelike";
    case SubspaceClass::Lightlike: return "lightlike";
    case SubspaceClass::Causal: return "causal";
    case SubspaceClass::Timelike: return "timelike";
    case SubspaceClass::Mixed: return "mixed";
  }
  return "?";
}

// Diagonal quadratic form of signature (p, q) on R^(p+q):
//
//   Q(v) = sum_i a_i v_i^2 - sum_j b_j v_(p+j)^2,   a_i, b_j > 0.
//
// Coordinates are ordered spatial block first, temporal block last. All
// weights strictly positive; p >= 1 and q >= 1.
struct PseudoMetric {
  int p = 0;
  int q = 0;
  Vec spatial_weights;   // size p, all > 0
  Vec temporal_weights;  // size q, all > 0

  PseudoMetric() = default;

  PseudoMetric(int p_, int q_, Vec spatial, Vec temporal)
      : p(p_), q(q_), spatial_weights(std::move(spatial)),
        temporal_weights(std::move(temporal)) {
    require(p >= 1 && q >= 1, "PseudoMetric: p and q must be >= 1");
    require(spatial_weights.size() == p && temporal_weights.size() == q,
            "PseudoMetric: weight vectors must have sizes p and q");
    require((spatial_weights.array() > 0).all() &&
                (temporal_weights.array() > 0).all(),
            "PseudoMetric: weights must be strictly positive");
  }

  // Unit weights on both blocks.
  static PseudoMetric standard(int p, int q) {
    return PseudoMetric(p, q, Vec::Ones(p), Vec::Ones(q));
  }

  int dim() const { return p + q; }

  double quad(const Vec& v) const {
    require(v.size() == dim(), "quad: dimension mismatch");
    return spatial_weights.dot(v.head(p).cwiseAbs2()) -
           temporal_weights.dot(v.tail(q).cwiseAbs2());
  }

  // Polarization of quad: bilinear(u, v) = (quad(u+v) - quad(u-v)) / 4.
  double bilinear(const Vec& u, const Vec& v) const {
    require(u.size() == dim() && v.size() == dim(),
            "bilinear: dimension mismatch");
    return (spatial_weights.array() * u.head(p).array() * v.head(p).array())
               .sum() -
           (temporal_weights.array() * u.tail(q).array() * v.tail(q).array())
               .sum();
  }

  bool same_signature(const PseudoMetric& o) const {
    return p == o.p && q == o.q;
  }
};

// Sign of Q(v) with a tolerance band scaled by the Euclidean norm of v, so the
// classification is invariant under scaling of v. The zero vector is
// lightlike.
inline CausalClass classify_vector(const PseudoMetric& g, const Vec& v,
                                   double tol = 0.0) {
  require(tol >= 0, "classify_vector: tol must be >= 0");
  const double qv = g.quad(v);
  const double band = tol * v.squaredNorm();
  if (qv < -band) return CausalClass::Timelike;
  if (qv > band) return CausalClass::Spacelike;
  return CausalClass::Lightlike;
}

inline CausalClass classify_segment(const PseudoMetric& g, const Vec& x,
                                    const Vec& y, double tol = 0.0) {
  require(x.size() == g.dim() && y.size() == g.dim(),
          "classify_segment: dimension mismatch");
  return classify_vector(g, y - x, tol);
}

// Classifies span(basis) by the eigenvalue signs of the Gram matrix
// G_ij = bilinear(v_i, v_j). Eigenvalues within +-tol count as zero.
//
//   all negative            -> Timelike
//   all zero                -> Lightlike
//   all <= 0, some negative -> Causal
//   all positive            -> Spacelike
//   otherwise               -> Mixed
inline SubspaceClass classify_subspace(const PseudoMetric& g,
                                       const std::vector<Vec>& basis,
                                       double tol = 0.0) {
  require(!basis.empty(), "classify_subspace: empty basis");
  require(tol >= 0, "classify_subspace: tol must be >= 0");
  const int k = static_cast<int>(basis.size());
  Mat B(g.dim(), k);
  for (int i = 0; i < k; ++i) {
    require(basis[i].size() == g.dim(), "classify_subspace: dimension mismatch");
    B.col(i) = basis[i];
  }

  Eigen::JacobiSVD<Mat> svd(B);
  const double smax = svd.singularValues()(0);
  const double thresh = std::max(tol, 1e-12) * std::max(smax, 1.0);
  require(svd.singularValues()(k - 1) > thresh,
          "classify_subspace: basis is linearly dependent");

  Mat gram(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j)
      gram(i, j) = gram(j, i) = g.bilinear(basis[i], basis[j]);

  Eigen::SelfAdjointEigenSolver<Mat> es(gram);
  const Vec& ev = es.eigenvalues();
  int neg = 0, zero = 0, pos = 0;
  for (int i = 0; i < k; ++i) {
    if (ev(i) < -tol) ++neg;
    else if (ev(i) > tol) ++pos;
    else ++zero;
  }
  if (neg == k) return SubspaceClass::Timelike;
  if (zero == k) return SubspaceClass::Lightlike;
  if (pos == k) return SubspaceClass::Spacelike;
  if (pos == 0) return SubspaceClass::Causal;
  return SubspaceClass::Mixed;
}

// Cone-order comparison: true iff every g2-causal vector is g1-causal, i.e.
// the g2 cone sits inside the g1 cone. For diagonal weights this reduces to
//
//   max_i a1_i / a2_i  <=  min_j b1_j / b2_j.
//
// Proof sketch: the extremal directions concentrate the spatial part on the
// coordinate maximizing a1/a2 and the temporal part on the coordinate
// minimizing b1/b2.
inline bool metric_leq(const PseudoMetric& g1, const PseudoMetric& g2) {
  require(g1.same_signature(g2), "metric_leq: signature mismatch");
  const double worst_spatial =
      (g1.spatial_weights.array() / g2.spatial_weights.array()).maxCoeff();
  const double worst_temporal =
      (g1.temporal_weights.array() / g2.temporal_weights.array()).minCoeff();
  return worst_spatial <= worst_temporal;
}

// Unit directions drawn uniformly on the Euclidean sphere, kept when causal
// for g (rejection sampling). Deterministic for a fixed seed.
inline std::vector<Vec> cone_sample(const PseudoMetric& g, int count,
                                    std::uint64_t rng_seed) {
  require(count >= 0, "cone_sample: count must be >= 0");
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(count));
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  long misses = 0;
  while (static_cast<int>(out.size()) < count) {
    Vec v(g.dim());
    for (int i = 0; i < g.dim(); ++i) v(i) = gauss(rng);
    const double n = v.norm();
    if (n == 0) continue;
    v /= n;
    if (g.quad(v) <= 0) {
      out.push_back(std::move(v));
      misses = 0;
    } else if (++misses > 1000000) {
      throw nonconvergence_error("cone_sample: rejection rate too high");
    }
  }
  return out;
}

}  // namespace pqcausal
