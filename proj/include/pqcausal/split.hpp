#pragma once

#include "pqcausal/cauchy.hpp"

namespace pqcausal {

// Witness to a product structure: the graphs of p0 + W(.) for a fixed
// 1-contracting shift W: R^q -> R^p tile the whole space, one leaf per
// p0 in R^p, and every leaf crosses every Cauchy surface exactly once.
struct FoliationWitness {
  LipMap shift;

  explicit FoliationWitness(LipMap W, double tol = 1e-12) : shift(std::move(W)) {
    require(shift.certified_constant() < 1.0 - tol,
            "FoliationWitness: shift must contract strictly");
  }

  int p() const { return shift.target_dim(); }
  int q() const { return shift.source_dim(); }
};

struct SpeedBound {
  double lhs = 0.0;  // graph-metric speed |v_sp|^2 + |v_tm|^2
  double rhs = 0.0;  // twice the base speed, 2 |v_tm|^2
  bool ok = false;
};

// For a causal vector the Euclidean speed of the graph reading is dominated
// by twice the base speed: |v_sp| <= |v_tm| makes lhs <= 2 |v_tm|^2, with
// equality exactly on the light cone. Unit weights only; the constant 2 is
// tied to them.
inline SpeedBound check_speed_bound(const PseudoMetric& g, const Vec& v,
                                    double tol = 0.0) {
  require((g.spatial_weights.array() == 1.0).all() &&
              (g.temporal_weights.array() == 1.0).all(),
          "check_speed_bound: unit weights required");
  require(classify_vector(g, v) != CausalClass::Spacelike,
          "check_speed_bound: vector must be causal");
  SpeedBound b;
  b.lhs = v.squaredNorm();
  b.rhs = 2.0 * v.tail(g.q).squaredNorm();
  b.ok = b.lhs <= b.rhs + tol;
  return b;
}

// Reads a base path through the section: (section(y), y) per vertex. Chords
// of the lift are causal whenever the section is 1-Lipschitz.
inline std::vector<Vec> lift_path(const LipMap& section,
                                  const std::vector<Vec>& base_path,
                                  double tol = kKirszbraunTol) {
  require(!base_path.empty(), "lift_path: empty path");
  std::vector<Vec> lifted;
  lifted.reserve(base_path.size());
  for (const Vec& y : base_path) {
    require(y.size() == section.source_dim(), "lift_path: dimension mismatch");
    Vec pt(section.target_dim() + section.source_dim());
    pt.head(section.target_dim()) = section.eval(y, tol);
    pt.tail(section.source_dim()) = y;
    lifted.push_back(std::move(pt));
  }
  return lifted;
}

inline Vec leaf_id(const FoliationWitness& fol, const Vec& pt,
                   double tol = kKirszbraunTol) {
  require(pt.size() == fol.p() + fol.q(), "leaf_id: dimension mismatch");
  return pt.head(fol.p()) - fol.shift.eval(pt.tail(fol.q()), tol);
}

struct SplittingResult {
  Vec leaf;           // leaf identifier p0 in R^p
  Vec surface_point;  // where the leaf through pt meets the surface
  Vec time;           // temporal block of pt
  int iterations = 0;
};

// The splitting map pt -> (leaf cap surface, time): identify the leaf through
// pt by its id p0 = pt_sp - W(pt_tm), then intersect that leaf with the
// surface by the contraction fixed point. Together with reconstruct() this is
// the explicit bijection (surface point, time) <-> spacetime point.
inline SplittingResult splitting_map(const FoliationWitness& fol,
                                     const SpacelikeMap& level, const Vec& pt,
                                     double tol = kIntersectTol) {
  require(level.source_dim() == fol.p() && level.target_dim() == fol.q(),
          "splitting_map: surface shape mismatch");
  SplittingResult out;
  out.leaf = leaf_id(fol, pt);
  const LipMap leaf_map = fol.shift.translated(out.leaf);
  IntersectResult hit =
      intersect_fixed_point(leaf_map, level, pt.tail(fol.q()), tol);
  out.surface_point = std::move(hit.point);
  out.time = pt.tail(fol.q());
  out.iterations = hit.iterations;
  return out;
}

inline Vec reconstruct(const FoliationWitness& fol, const Vec& leaf,
                       const Vec& time, double tol = kKirszbraunTol) {
  require(leaf.size() == fol.p() && time.size() == fol.q(),
          "reconstruct: dimension mismatch");
  Vec pt(fol.p() + fol.q());
  pt.head(fol.p()) = leaf + fol.shift.eval(time, tol);
  pt.tail(fol.q()) = time;
  return pt;
}

struct SplittingReport {
  int samples = 0;
  double max_roundtrip_error = 0.0;
  int collisions = 0;  // distinct inputs mapped to the same (leaf, time)
  double tol = 0.0;
  bool pass = false;
};

// Round-trips random points through splitting_map and reconstruct, and scans
// for (leaf, time) collisions between points that are genuinely distinct.
inline SplittingReport verify_splitting_bijectivity(
    const FoliationWitness& fol, const SpacelikeMap& level, int sample_count,
    std::uint64_t rng_seed, double tol = kIntersectTol) {
  require(sample_count > 0, "verify_splitting_bijectivity: need samples");
  std::mt19937_64 rng(rng_seed);
  const int dim = fol.p() + fol.q();

  SplittingReport rep;
  rep.samples = sample_count;
  rep.tol = tol;
  std::vector<Vec> keys;
  std::vector<Vec> inputs;
  keys.reserve(static_cast<std::size_t>(sample_count));
  for (int i = 0; i < sample_count; ++i) {
    const Vec pt = random_vec(rng, dim, 3.0);
    SplittingResult sres = splitting_map(fol, level, pt, tol);
    const Vec id_back = leaf_id(fol, sres.surface_point);
    const Vec rec = reconstruct(fol, id_back, sres.time);
    rep.max_roundtrip_error =
        std::max(rep.max_roundtrip_error, (rec - pt).norm());
    Vec key(fol.p() + fol.q());
    key.head(fol.p()) = id_back;
    key.tail(fol.q()) = sres.time;
    keys.push_back(std::move(key));
    inputs.push_back(pt);
  }
  for (std::size_t i = 0; i < keys.size(); ++i)
    for (std::size_t j = i + 1; j < keys.size(); ++j)
      if ((keys[i] - keys[j]).norm() <= tol &&
          (inputs[i] - inputs[j]).norm() > 10.0 * tol)
        ++rep.collisions;
  rep.pass = rep.max_roundtrip_error <= 10.0 * tol && rep.collisions == 0;
  return rep;
}

}  // namespace pqcausal
