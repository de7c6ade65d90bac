#pragma once

#include "pqcausal/sampling.hpp"

namespace pqcausal {

inline constexpr double kIntersectTol = 1e-10;
inline constexpr int kIntersectMaxIter = 100000;

// Graph of a strictly contracting map w: R^p -> R^q. The strict bound is what
// makes the graph a Cauchy surface: every inextendible causal graph meets it
// exactly once, by the contraction fixed point below. Maps with constant 1
// are rejected; nothing is certified at the boundary.
class SpacelikeMap {
 public:
  explicit SpacelikeMap(LipMap map, double tol = 1e-12) : map_(std::move(map)) {
    require(tol >= 0, "SpacelikeMap: tol must be >= 0");
    require(map_.certified_constant() < 1.0 - tol,
            "SpacelikeMap: constant must be strictly below 1");
  }

  int source_dim() const { return map_.source_dim(); }
  int target_dim() const { return map_.target_dim(); }
  double contraction() const { return map_.certified_constant(); }
  const LipMap& map() const { return map_; }

  Vec eval(const Vec& x, double tol = kKirszbraunTol,
           int max_iter = kKirszbraunMaxIter) const {
    return map_.eval(x, tol, max_iter);
  }

 private:
  LipMap map_;
};

struct IntersectResult {
  Vec x_star;      // fixed point of w o f in R^q
  Vec point;       // (f(x*), x*) in R^(p+q), on both graphs
  int iterations = 0;
};

// Intersects the causal graph {(f(y), y)} with the surface {(x, w(x))} by
// Picard iteration x <- w(f(x)). The composition contracts with factor
// k = contraction(w) * constant(f) < 1, so the fixed point is unique and the
// a-posteriori bound |x* - x_n| <= k/(1-k) |x_n - x_(n-1)| turns the step
// size into a certificate: stopping at tol*(1-k)/k leaves a residual
// |w(f(x*)) - x*| <= tol.
inline IntersectResult intersect_fixed_point(const LipMap& f,
                                             const SpacelikeMap& w,
                                             const Vec& x0,
                                             double tol = kIntersectTol,
                                             int max_iter = kIntersectMaxIter) {
  require(f.source_dim() == w.target_dim() &&
              f.target_dim() == w.source_dim(),
          "intersect_fixed_point: dimension mismatch");
  require(f.certified_constant() <= 1.0 + 1e-9,
          "intersect_fixed_point: f must be causal (constant <= 1)");
  require(x0.size() == f.source_dim(), "intersect_fixed_point: bad start");
  require(tol > 0, "intersect_fixed_point: tol must be > 0");

  const double k =
      std::min(w.contraction() * std::min(1.0, f.certified_constant()),
               w.contraction());
  const double threshold = k > 0 ? tol * (1.0 - k) / k : tol;
  const double eval_tol = std::min(kKirszbraunTol, 0.01 * tol);

  Vec x = x0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    Vec next = w.eval(f.eval(x, eval_tol), eval_tol);
    const double step = (next - x).norm();
    x = std::move(next);
    if (step <= threshold) {
      IntersectResult res;
      res.x_star = x;
      res.iterations = iter;
      Vec y = f.eval(x, eval_tol);
      res.point = Vec(f.target_dim() + f.source_dim());
      res.point.head(f.target_dim()) = y;
      res.point.tail(f.source_dim()) = x;
      return res;
    }
  }
  throw nonconvergence_error("intersect_fixed_point: iteration budget exhausted");
}

struct CauchyReport {
  int trials = 0;
  int converged = 0;
  double max_discrepancy = 0.0;  // worst gap between two starting points
  int max_iterations = 0;
  double tol = 0.0;
  bool pass = false;
};

// Stress test: every random causal graph must cross the surface exactly once.
// Each trial intersects from two starting points and measures how far apart
// the two fixed points land; uniqueness means they coincide up to solver
// tolerance. Trials alternate exact affine maps and Kirszbraun interpolants.
inline CauchyReport verify_cauchy_surface(const SpacelikeMap& w,
                                          int trial_count,
                                          std::uint64_t rng_seed,
                                          double tol = kIntersectTol) {
  require(trial_count > 0, "verify_cauchy_surface: trial_count must be > 0");
  const int p = w.source_dim();
  const int q = w.target_dim();
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unorm(0.6, 1.0);

  CauchyReport rep;
  rep.trials = trial_count;
  rep.tol = tol;
  for (int t = 0; t < trial_count; ++t) {
    LipMap f = (t % 2 == 0)
                   ? random_affine_map(rng, q, p, unorm(rng))
                   : random_interpolant_map(rng, q, p, 8, 1.0);
    const Vec a = Vec::Zero(q);
    const Vec b = random_vec(rng, q, 3.0);
    try {
      IntersectResult ra = intersect_fixed_point(f, w, a, tol);
      IntersectResult rb = intersect_fixed_point(f, w, b, tol);
      ++rep.converged;
      rep.max_discrepancy =
          std::max(rep.max_discrepancy, (ra.x_star - rb.x_star).norm());
      rep.max_iterations =
          std::max({rep.max_iterations, ra.iterations, rb.iterations});
    } catch (const nonconvergence_error&) {
      // counted by the converged/trials gap
    }
  }
  rep.pass = rep.converged == rep.trials && rep.max_discrepancy <= 10.0 * tol;
  return rep;
}

}  // namespace pqcausal
