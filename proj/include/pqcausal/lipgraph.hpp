#pragma once

#include <limits>
#include <utility>
#include <variant>
#include <vector>

#include "pqcausal/pqform.hpp"

namespace pqcausal {

inline constexpr double kKirszbraunTol = 1e-9;
inline constexpr int kKirszbraunMaxIter = 100000;

// Finite sample of a map R^q -> R^p, one sample per row. Sources live in the
// temporal block, targets in the spatial block, so the graph point of sample i
// is (target_i, source_i) in R^(p+q).
struct GraphSamples {
  Mat sources;  // n x q
  Mat targets;  // n x p

  GraphSamples() = default;
  GraphSamples(Mat src, Mat tgt) : sources(std::move(src)), targets(std::move(tgt)) {
    require(sources.rows() == targets.rows() && sources.rows() >= 1,
            "GraphSamples: need matching, nonempty source/target rows");
  }

  Eigen::Index count() const { return sources.rows(); }
  int source_dim() const { return static_cast<int>(sources.cols()); }
  int target_dim() const { return static_cast<int>(targets.cols()); }
};

inline std::vector<Vec> graph_points(const GraphSamples& s) {
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(s.count()));
  for (Eigen::Index i = 0; i < s.count(); ++i) {
    Vec pt(s.target_dim() + s.source_dim());
    pt.head(s.target_dim()) = s.targets.row(i).transpose();
    pt.tail(s.source_dim()) = s.sources.row(i).transpose();
    pts.push_back(std::move(pt));
  }
  return pts;
}

// Largest pairwise ratio |y_i - y_j| / |x_i - x_j|. Zero for a single sample.
// Duplicate sources are rejected: the data would not be the graph of a map.
inline double lipschitz_constant(const GraphSamples& s) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < s.count(); ++i) {
    for (Eigen::Index j = i + 1; j < s.count(); ++j) {
      const double dx = (s.sources.row(i) - s.sources.row(j)).norm();
      require(dx > 0, "lipschitz_constant: duplicate sources");
      const double dy = (s.targets.row(i) - s.targets.row(j)).norm();
      best = std::max(best, dy / dx);
    }
  }
  return best;
}

// True iff every pairwise segment of E is causal (strict = false) or timelike
// (strict = true) for g. Singletons pass trivially.
inline bool is_causal_position(const PseudoMetric& g,
                               const std::vector<Vec>& points, bool strict,
                               double tol = 0.0) {
  require(!points.empty(), "is_causal_position: empty point set");
  for (const Vec& pt : points)
    require(pt.size() == g.dim(), "is_causal_position: dimension mismatch");
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const CausalClass c = classify_segment(g, points[i], points[j], tol);
      if (strict ? (c != CausalClass::Timelike) : !is_causal(c)) return false;
    }
  }
  return true;
}

// Evaluates the Kirszbraun extension of L-Lipschitz data at x: a point y with
// |y - y_i| <= L |x - x_i| for every sample, which exists whenever the data
// itself is L-Lipschitz. Computed by averaged projections onto the balls
// B(y_i, L |x - x_i|), started from the distance-weighted average of the
// targets, until the worst constraint residual drops below tol. The iteration
// is deterministic, so repeated calls agree bitwise.
inline Vec kirszbraun_extend(const GraphSamples& s, double L, const Vec& x,
                             double tol = kKirszbraunTol,
                             int max_iter = kKirszbraunMaxIter) {
  require(L >= 0, "kirszbraun_extend: L must be >= 0");
  require(x.size() == s.source_dim(), "kirszbraun_extend: dimension mismatch");
  require(tol > 0, "kirszbraun_extend: tol must be > 0");
  const Eigen::Index n = s.count();
  {
    const double k = lipschitz_constant(s);
    require(k <= L + tol, "kirszbraun_extend: samples exceed the stated constant");
  }

  Vec radii(n);
  double wsum = 0.0;
  Vec y = Vec::Zero(s.target_dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = (x - s.sources.row(i).transpose()).norm();
    if (d == 0.0) return s.targets.row(i).transpose();
    radii(i) = L * d;
    const double w = 1.0 / d;
    wsum += w;
    y += w * s.targets.row(i).transpose();
  }
  y /= wsum;

  Vec next(s.target_dim());
  for (int iter = 0; iter < max_iter; ++iter) {
    next.setZero();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      Vec diff = y - s.targets.row(i).transpose();
      const double d = diff.norm();
      worst = std::max(worst, d - radii(i));
      if (d > radii(i))
        next += s.targets.row(i).transpose() + diff * (radii(i) / d);
      else
        next += y;
    }
    if (worst <= tol) return y;
    y = next / static_cast<double>(n);
  }
  throw nonconvergence_error(
      "kirszbraun_extend: no feasible point within iteration budget");
}

enum class ExtensionMode { Causal, Timelike };

// Lipschitz map with a certified constant, either exact affine data or a
// Kirszbraun interpolant of finite samples.
class LipMap {
 public:
  struct Affine {
    Mat A;
    Vec b;
  };
  struct Interpolant {
    GraphSamples samples;
    double L = 1.0;
  };

  LipMap(Mat A, Vec b) : rep_(Affine{std::move(A), std::move(b)}) {
    const Affine& a = std::get<Affine>(rep_);
    require(a.A.rows() == a.b.size(), "LipMap: affine shape mismatch");
    certified_ = a.A.size() == 0
                     ? 0.0
                     : Eigen::JacobiSVD<Mat>(a.A).singularValues()(0);
  }

  LipMap(GraphSamples samples, double L)
      : rep_(Interpolant{std::move(samples), L}), certified_(L) {
    const Interpolant& r = std::get<Interpolant>(rep_);
    require(lipschitz_constant(r.samples) <= L + kKirszbraunTol,
            "LipMap: samples exceed the stated constant");
  }

  int source_dim() const {
    if (const Affine* a = std::get_if<Affine>(&rep_))
      return static_cast<int>(a->A.cols());
    return std::get<Interpolant>(rep_).samples.source_dim();
  }

  int target_dim() const {
    if (const Affine* a = std::get_if<Affine>(&rep_))
      return static_cast<int>(a->A.rows());
    return std::get<Interpolant>(rep_).samples.target_dim();
  }

  double certified_constant() const { return certified_; }

  bool is_affine() const { return std::holds_alternative<Affine>(rep_); }

  const Affine& affine() const { return std::get<Affine>(rep_); }
  const Interpolant& interpolant() const { return std::get<Interpolant>(rep_); }

  Vec eval(const Vec& x, double tol = kKirszbraunTol,
           int max_iter = kKirszbraunMaxIter) const {
    if (const Affine* a = std::get_if<Affine>(&rep_)) return a->A * x + a->b;
    const Interpolant& r = std::get<Interpolant>(rep_);
    return kirszbraun_extend(r.samples, r.L, x, tol, max_iter);
  }

  // Same map with a constant added to every value; the constant and the
  // evaluation path are unchanged, translation commutes with both
  // representations.
  LipMap translated(const Vec& offset) const {
    require(offset.size() == target_dim(), "translated: dimension mismatch");
    if (const Affine* a = std::get_if<Affine>(&rep_))
      return LipMap(a->A, a->b + offset);
    const Interpolant& r = std::get<Interpolant>(rep_);
    Mat shifted = r.samples.targets;
    shifted.rowwise() += offset.transpose();
    return LipMap(GraphSamples(r.samples.sources, std::move(shifted)), r.L);
  }

 private:
  std::variant<Affine, Interpolant> rep_;
  double certified_ = 0.0;
};

// Wraps finite samples as an everywhere-defined map whose graph is an
// inextendible causal (constant 1) or timelike (constant < 1) set. Timelike
// mode needs strict room below 1: the extension argument only certifies a
// strictly contracting interpolant when the data constant stays below 1.
inline LipMap build_inextendible(const GraphSamples& samples,
                                 ExtensionMode mode, double tol = 1e-12) {
  const double k = lipschitz_constant(samples);
  if (mode == ExtensionMode::Causal) {
    require(k <= 1.0 + tol, "build_inextendible: data is not 1-Lipschitz");
    return LipMap(samples, 1.0);
  }
  require(k < 1.0 - tol,
          "build_inextendible: timelike mode needs constant strictly below 1");
  return LipMap(samples, k);
}

struct Ball {
  Vec center;
  double radius = 0.0;
};
struct Box {
  Vec lo;
  Vec hi;
};
struct Annulus {
  Vec center;
  double inner = 0.0;
  double outer = 0.0;
};
struct Hull {
  std::vector<Vec> points;
};

using Domain = std::variant<Ball, Box, Annulus, Hull>;

// Convex domains induce the ambient causal order on restricted graphs; the
// annulus is the stock counterexample (paths must detour around the hole).
inline bool same_causality_as_ambient(const Domain& dom) {
  return std::visit(
      [](const auto& d) -> bool {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Ball>) {
          require(d.radius > 0, "Domain: ball radius must be > 0");
          return true;
        } else if constexpr (std::is_same_v<T, Box>) {
          require(d.lo.size() == d.hi.size() && d.lo.size() > 0 &&
                      (d.lo.array() < d.hi.array()).all(),
                  "Domain: box needs lo < hi componentwise");
          return true;
        } else if constexpr (std::is_same_v<T, Annulus>) {
          require(d.inner > 0 && d.outer > d.inner,
                  "Domain: annulus needs 0 < inner < outer");
          return false;
        } else {
          require(!d.points.empty(), "Domain: hull needs at least one point");
          return true;
        }
      },
      dom);
}

}  // namespace pqcausal
