#pragma once

#include <Eigen/Sparse>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <random>
#include <tuple>
#include <vector>

#include "pqcausal/lipgraph.hpp"

namespace pqcausal {

// Uniform lattice over a box or ball in R^q, q in {1, 2}. Cells are indexed by
// their lower corner and carry forward-difference stencils; the neighbor list
// (axis and diagonal pairs, with their base distances) drives the Lipschitz
// projection. Interior nodes always have a full axis stencil, everything else
// is marked boundary.
struct GridBase {
  int q = 1;
  double h = 0.0;
  std::vector<Vec> nodes;
  std::vector<bool> boundary;
  // corner ids (A, A+ex, A+ey, A+ex+ey); for q = 1 the last two are -1
  std::vector<std::array<int, 4>> cells;
  std::vector<std::tuple<int, int, double>> axis_pairs;
  std::vector<std::tuple<int, int, double>> diag_pairs;

  int count() const { return static_cast<int>(nodes.size()); }

  int interior_count() const {
    int n = 0;
    for (bool b : boundary) n += b ? 0 : 1;
    return n;
  }

  std::vector<std::tuple<int, int, double>> neighbor_pairs() const {
    std::vector<std::tuple<int, int, double>> all = axis_pairs;
    all.insert(all.end(), diag_pairs.begin(), diag_pairs.end());
    return all;
  }

  static GridBase box(const Vec& lo, const Vec& hi, int nodes_per_axis);
  static GridBase ball(const Vec& center, double radius, double h);

  bool same_layout(const GridBase& o) const {
    if (q != o.q || h != o.h || nodes.size() != o.nodes.size()) return false;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i] != o.nodes[i] || boundary[i] != o.boundary[i]) return false;
    return true;
  }
};

namespace detail {

struct LatticeBuilder {
  int q;
  double h;
  Vec origin;
  std::vector<int> extent;       // lattice points per axis
  std::vector<int> ids;          // flat lattice index -> node id or -1

  int flat(int i, int j) const { return q == 1 ? i : i * extent[1] + j; }

  int id(int i, int j) const {
    if (i < 0 || i >= extent[0]) return -1;
    if (q == 2 && (j < 0 || j >= extent[1])) return -1;
    return ids[flat(i, j)];
  }

  Vec coords(int i, int j) const {
    Vec x(q);
    x(0) = origin(0) + i * h;
    if (q == 2) x(1) = origin(1) + j * h;
    return x;
  }
};

inline GridBase finish_grid(const LatticeBuilder& lat,
                            const std::vector<bool>& inside) {
  GridBase g;
  g.q = lat.q;
  g.h = lat.h;
  const int ni = lat.extent[0];
  const int nj = lat.q == 2 ? lat.extent[1] : 1;

  std::vector<int> ids(static_cast<std::size_t>(ni) * nj, -1);
  for (int i = 0; i < ni; ++i) {
    for (int j = 0; j < nj; ++j) {
      const int f = lat.q == 1 ? i : i * nj + j;
      if (!inside[f]) continue;
      ids[f] = g.count();
      g.nodes.push_back(lat.coords(i, j));
    }
  }
  LatticeBuilder done = lat;
  done.ids = ids;

  g.boundary.assign(g.nodes.size(), false);
  for (int i = 0; i < ni; ++i) {
    for (int j = 0; j < nj; ++j) {
      const int c = done.id(i, j);
      if (c < 0) continue;
      bool full = done.id(i - 1, j) >= 0 && done.id(i + 1, j) >= 0;
      if (lat.q == 2)
        full = full && done.id(i, j - 1) >= 0 && done.id(i, j + 1) >= 0;
      g.boundary[c] = !full;

      if (done.id(i + 1, j) >= 0)
        g.axis_pairs.emplace_back(c, done.id(i + 1, j), g.h);
      if (lat.q == 2) {
        if (done.id(i, j + 1) >= 0)
          g.axis_pairs.emplace_back(c, done.id(i, j + 1), g.h);
        const double dg = g.h * std::sqrt(2.0);
        if (done.id(i + 1, j + 1) >= 0)
          g.diag_pairs.emplace_back(c, done.id(i + 1, j + 1), dg);
        if (done.id(i + 1, j - 1) >= 0)
          g.diag_pairs.emplace_back(c, done.id(i + 1, j - 1), dg);
      }

      if (lat.q == 1) {
        const int b = done.id(i + 1, j);
        if (b >= 0) g.cells.push_back({c, b, -1, -1});
      } else {
        const int b = done.id(i + 1, j);
        const int cc = done.id(i, j + 1);
        const int dd = done.id(i + 1, j + 1);
        if (b >= 0 && cc >= 0 && dd >= 0) g.cells.push_back({c, b, cc, dd});
      }
    }
  }
  return g;
}

}  // namespace detail

inline GridBase GridBase::box(const Vec& lo, const Vec& hi,
                              int nodes_per_axis) {
  const int q = static_cast<int>(lo.size());
  require(q == 1 || q == 2, "GridBase: q must be 1 or 2");
  require(hi.size() == q && (lo.array() < hi.array()).all(),
          "GridBase: box needs lo < hi");
  require(nodes_per_axis >= 2, "GridBase: need at least 2 nodes per axis");
  const double h0 = (hi(0) - lo(0)) / (nodes_per_axis - 1);
  if (q == 2) {
    const double h1 = (hi(1) - lo(1)) / (nodes_per_axis - 1);
    require(std::abs(h0 - h1) <= 1e-12 * std::max(1.0, std::abs(h0)),
            "GridBase: box must produce square cells");
  }
  detail::LatticeBuilder lat;
  lat.q = q;
  lat.h = h0;
  lat.origin = lo;
  lat.extent = q == 1 ? std::vector<int>{nodes_per_axis}
                      : std::vector<int>{nodes_per_axis, nodes_per_axis};
  const std::size_t total = static_cast<std::size_t>(nodes_per_axis) *
                            (q == 2 ? nodes_per_axis : 1);
  return detail::finish_grid(lat, std::vector<bool>(total, true));
}

inline GridBase GridBase::ball(const Vec& center, double radius, double h) {
  const int q = static_cast<int>(center.size());
  require(q == 1 || q == 2, "GridBase: q must be 1 or 2");
  require(radius > 0 && h > 0, "GridBase: radius and h must be > 0");
  const int half = static_cast<int>(std::floor(radius / h));
  require(half >= 1, "GridBase: ball too small for the spacing");
  detail::LatticeBuilder lat;
  lat.q = q;
  lat.h = h;
  lat.origin = (center.array() - half * h).matrix();
  const int n = 2 * half + 1;
  lat.extent = q == 1 ? std::vector<int>{n} : std::vector<int>{n, n};
  std::vector<bool> inside(static_cast<std::size_t>(n) * (q == 2 ? n : 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < (q == 2 ? n : 1); ++j) {
      const std::size_t f = q == 1 ? i : static_cast<std::size_t>(i) * n + j;
      inside[f] = (lat.coords(i, j) - center).norm() <= radius + 1e-12;
    }
  }
  return detail::finish_grid(lat, inside);
}

// Node values of a section over a grid, one row per node, p columns.
struct GridSection {
  std::shared_ptr<const GridBase> base;
  Mat values;

  GridSection(std::shared_ptr<const GridBase> b, Mat v)
      : base(std::move(b)), values(std::move(v)) {
    require(base != nullptr, "GridSection: null base");
    require(values.rows() == base->count(), "GridSection: value count mismatch");
    require(values.cols() >= 1, "GridSection: need p >= 1 components");
  }

  int p() const { return static_cast<int>(values.cols()); }
};

namespace detail {

// Per-cell first fundamental form M = W_tm - J^T W_sp J of the graph, using
// the forward-difference Jacobian anchored at the cell's lower corner.
inline Mat cell_form(const GridBase& g, const Mat& v, const PseudoMetric& m,
                     std::size_t cell, Mat* J_out) {
  const auto& c = g.cells[cell];
  const int p = static_cast<int>(v.cols());
  Mat J(p, g.q);
  J.col(0) = (v.row(c[1]) - v.row(c[0])).transpose() / g.h;
  if (g.q == 2) J.col(1) = (v.row(c[2]) - v.row(c[0])).transpose() / g.h;
  if (J_out) *J_out = J;
  Mat M = Mat(m.temporal_weights.asDiagonal());
  M -= J.transpose() * m.spatial_weights.asDiagonal() * J;
  return M;
}

struct CellEig {
  double det_clamped = 0.0;  // product of eigenvalues clamped at 0
  double min_eig = 0.0;
};

inline CellEig cell_eig(const Mat& M) {
  CellEig e;
  if (M.rows() == 1) {
    e.min_eig = M(0, 0);
    e.det_clamped = std::max(0.0, M(0, 0));
    return e;
  }
  const double tr = M(0, 0) + M(1, 1);
  const double det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  const double l1 = tr / 2.0 - disc;
  const double l2 = tr / 2.0 + disc;
  e.min_eig = l1;
  e.det_clamped = std::max(0.0, l1) * std::max(0.0, l2);
  return e;
}

}  // namespace detail

// Discrete area of the graph of the section: sum over cells of
// sqrt(det M) h^q, eigenvalues of M clamped at zero so cells on or past the
// light cone contribute nothing negative.
inline double area(const GridSection& s, const PseudoMetric& m) {
  const GridBase& g = *s.base;
  require(m.p == s.p() && m.q == g.q, "area: metric signature mismatch");
  double total = 0.0;
  const double hq = g.q == 1 ? g.h : g.h * g.h;
  for (std::size_t c = 0; c < g.cells.size(); ++c) {
    const Mat M = detail::cell_form(g, s.values, m, c, nullptr);
    total += std::sqrt(detail::cell_eig(M).det_clamped) * hq;
  }
  return total;
}

namespace detail {

// Shared by the public gradient (which rejects degenerate cells) and the
// solver (which skips them: zero is a valid ascent direction for a cell
// pinned to the light cone). Gradient of one cell w.r.t. its Jacobian:
//
//   d sqrt(det M) = -sqrt(det M) * tr(M^-1 J^T W_sp dJ)
//                 = <-sqrt(det M) W_sp J M^-1, dJ>_F,
//
// then the chain rule spreads dJ over the three stencil nodes.
inline double area_gradient_impl(const GridSection& s, const PseudoMetric& m,
                                 double grad_floor, bool skip_degenerate,
                                 Mat* grad_out) {
  const GridBase& g = *s.base;
  require(m.p == s.p() && m.q == g.q, "area_gradient: metric signature mismatch");
  require(grad_floor > 0, "area_gradient: grad_floor must be > 0");
  const double hq = g.q == 1 ? g.h : g.h * g.h;
  Mat grad = Mat::Zero(s.values.rows(), s.values.cols());
  double total = 0.0;
  for (std::size_t c = 0; c < g.cells.size(); ++c) {
    Mat J;
    const Mat M = cell_form(g, s.values, m, c, &J);
    const CellEig e = cell_eig(M);
    if (e.min_eig < grad_floor) {
      if (skip_degenerate) continue;
      throw std::invalid_argument("area_gradient: degenerate cell " +
                                  std::to_string(c));
    }
    const double root = std::sqrt(e.det_clamped);
    total += root * hq;
    const Mat dJ = -hq * root *
                   (m.spatial_weights.asDiagonal() * J * M.inverse());
    const auto& corners = g.cells[c];
    for (int k = 0; k < g.q; ++k) {
      const int node = corners[k + 1];
      if (!g.boundary[node]) grad.row(node) += dJ.col(k).transpose() / g.h;
      if (!g.boundary[corners[0]])
        grad.row(corners[0]) -= dJ.col(k).transpose() / g.h;
    }
  }
  if (grad_out) *grad_out = std::move(grad);
  return total;
}

}  // namespace detail

// Exact gradient of area() w.r.t. interior node values; boundary rows are
// zero. Degenerate cells (min eigenvalue of M below grad_floor) are an error
// here, the form is not differentiable there.
inline Mat area_gradient(const GridSection& s, const PseudoMetric& m,
                         double grad_floor = 1e-8) {
  Mat grad;
  detail::area_gradient_impl(s, m, grad_floor, false, &grad);
  return grad;
}

enum class PairSet { Neighbors, AllPairs };

// Largest excess |v_i - v_j| - d_ij over the pair set, 0 when feasible.
inline double lipschitz_violation(const GridSection& s, PairSet set) {
  const GridBase& g = *s.base;
  double worst = 0.0;
  auto check = [&](int i, int j, double d) {
    worst = std::max(worst, (s.values.row(i) - s.values.row(j)).norm() - d);
  };
  if (set == PairSet::Neighbors) {
    for (const auto& [i, j, d] : g.axis_pairs) check(i, j, d);
    for (const auto& [i, j, d] : g.diag_pairs) check(i, j, d);
  } else {
    for (int i = 0; i < g.count(); ++i)
      for (int j = i + 1; j < g.count(); ++j)
        check(i, j, (g.nodes[i] - g.nodes[j]).norm());
  }
  return worst;
}

// Projects the section toward the discrete 1-Lipschitz set by cyclic
// symmetric pair contractions: a violating pair is pulled together along its
// difference, splitting the excess between both endpoints, or dumping it all
// on the interior one when the other is boundary. Boundary nodes never move,
// so two infeasible boundary nodes are unrepairable and raise an error.
inline GridSection project_lipschitz(const GridSection& s, PairSet set,
                                     double feas_tol = 1e-10,
                                     int max_sweeps = 10000) {
  require(feas_tol > 0, "project_lipschitz: feas_tol must be > 0");
  const GridBase& g = *s.base;
  GridSection out = s;

  std::vector<std::tuple<int, int, double>> pairs;
  if (set == PairSet::Neighbors) {
    pairs = g.neighbor_pairs();
  } else {
    for (int i = 0; i < g.count(); ++i)
      for (int j = i + 1; j < g.count(); ++j)
        pairs.emplace_back(i, j, (g.nodes[i] - g.nodes[j]).norm());
  }

  // Excesses at or below feas_tol are left alone; a sweep that moves nothing
  // certifies every pair, so projecting a feasible section is the identity.
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool moved = false;
    for (const auto& [i, j, d] : pairs) {
      Vec diff = (out.values.row(i) - out.values.row(j)).transpose();
      const double len = diff.norm();
      const double excess = len - d;
      if (excess <= feas_tol) continue;
      const bool bi = g.boundary[i];
      const bool bj = g.boundary[j];
      if (bi && bj)
        throw std::invalid_argument(
            "project_lipschitz: boundary data is not 1-Lipschitz");
      const Vec u = diff / len;
      moved = true;
      if (!bi && !bj) {
        out.values.row(i) -= (excess / 2.0) * u.transpose();
        out.values.row(j) += (excess / 2.0) * u.transpose();
      } else if (bi) {
        out.values.row(j) += excess * u.transpose();
      } else {
        out.values.row(i) -= excess * u.transpose();
      }
    }
    if (!moved) return out;
  }
  throw nonconvergence_error("project_lipschitz: sweep budget exhausted");
}

struct SolverParams {
  double step_init = 1.0;
  double stop_tol = 1e-9;
  int patience = 20;
  int max_iter = 100000;
  double feas_tol = 1e-10;
  int max_sweeps = 10000;
  double grad_floor = 1e-8;
};

struct PlateauProblem {
  std::shared_ptr<const GridBase> base;
  PseudoMetric metric;
  LipMap boundary;  // R^q -> R^p, evaluated at boundary nodes
  SolverParams solver;

  PlateauProblem(std::shared_ptr<const GridBase> b, PseudoMetric m,
                 LipMap boundary_map, SolverParams sp = {})
      : base(std::move(b)), metric(std::move(m)),
        boundary(std::move(boundary_map)), solver(sp) {
    require(base != nullptr, "PlateauProblem: null base");
    require(metric.q == base->q, "PlateauProblem: metric q mismatch");
    require(boundary.source_dim() == base->q &&
                boundary.target_dim() == metric.p,
            "PlateauProblem: boundary map shape mismatch");
  }
};

struct PlateauSolution {
  GridSection section;
  double area = 0.0;
  int iterations = 0;
  std::vector<double> history;  // accepted objective values, nondecreasing
  double feas_residual = 0.0;   // AllPairs violation after the final pass
  bool converged = false;
};

namespace detail {

// Componentwise discrete Laplace interpolation of the boundary values; the
// standard strictly diagonally dominant system, solved sparsely.
inline Mat harmonic_init(const GridBase& g, const Mat& boundary_values) {
  const int n = g.count();
  const int p = static_cast<int>(boundary_values.cols());
  std::vector<int> free_id(n, -1);
  int nf = 0;
  for (int i = 0; i < n; ++i)
    if (!g.boundary[i]) free_id[i] = nf++;

  Mat values = boundary_values;
  if (nf == 0) return values;

  std::vector<Eigen::Triplet<double>> trip;
  Mat rhs = Mat::Zero(nf, p);
  std::vector<double> diag(nf, 0.0);
  auto couple = [&](int a, int b) {
    if (free_id[a] < 0) return;
    diag[free_id[a]] += 1.0;
    if (free_id[b] >= 0)
      trip.emplace_back(free_id[a], free_id[b], -1.0);
    else
      rhs.row(free_id[a]) += boundary_values.row(b);
  };
  for (const auto& [i, j, d] : g.axis_pairs) {
    couple(i, j);
    couple(j, i);
  }
  for (int i = 0; i < nf; ++i) trip.emplace_back(i, i, diag[i]);

  Eigen::SparseMatrix<double> L(nf, nf);
  L.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(L);
  require(solver.info() == Eigen::Success, "harmonic_init: factorization failed");
  Mat x = solver.solve(rhs);
  for (int i = 0; i < n; ++i)
    if (free_id[i] >= 0) values.row(i) = x.row(free_id[i]);
  return values;
}

}  // namespace detail

// Maximizes the discrete area over 1-Lipschitz sections matching the boundary
// data: harmonic initialization, projected gradient ascent with backtracking,
// and a final all-pairs feasibility pass. The returned history is the list of
// accepted objective values and is nondecreasing by construction; the solve
// stops once the relative improvement over the patience window falls below
// stop_tol.
inline PlateauSolution solve_plateau(const PlateauProblem& prob) {
  const GridBase& g = *prob.base;
  const SolverParams& sp = prob.solver;
  const int p = prob.metric.p;

  Mat bvals = Mat::Zero(g.count(), p);
  for (int i = 0; i < g.count(); ++i)
    if (g.boundary[i]) bvals.row(i) = prob.boundary.eval(g.nodes[i]).transpose();

  // Boundary feasibility first: these nodes are immovable, so any violating
  // boundary pair dooms the problem regardless of the interior.
  for (int i = 0; i < g.count(); ++i) {
    if (!g.boundary[i]) continue;
    for (int j = i + 1; j < g.count(); ++j) {
      if (!g.boundary[j]) continue;
      const double d = (g.nodes[i] - g.nodes[j]).norm();
      require((bvals.row(i) - bvals.row(j)).norm() <= d + sp.feas_tol,
              "solve_plateau: boundary data is not 1-Lipschitz on the grid");
    }
  }

  GridSection cur(prob.base, detail::harmonic_init(g, bvals));
  cur = project_lipschitz(cur, PairSet::Neighbors, sp.feas_tol, sp.max_sweeps);

  auto objective = [&](const GridSection& s) {
    return detail::area_gradient_impl(s, prob.metric, sp.grad_floor, true,
                                      nullptr);
  };

  PlateauSolution sol{cur};
  double cur_val = objective(cur);
  sol.history.push_back(cur_val);

  double step = sp.step_init;
  int stale = 0;
  int iter = 0;
  for (; iter < sp.max_iter && stale < sp.patience; ++iter) {
    Mat grad;
    detail::area_gradient_impl(cur, prob.metric, sp.grad_floor, true, &grad);
    const double gnorm = grad.norm();
    if (gnorm == 0.0) {
      ++stale;
      sol.history.push_back(cur_val);
      continue;
    }

    bool accepted = false;
    double alpha = step;
    for (int bt = 0; bt < 40 && !accepted; ++bt, alpha /= 2.0) {
      GridSection cand(prob.base, cur.values + alpha * grad);
      try {
        cand = project_lipschitz(cand, PairSet::Neighbors, sp.feas_tol,
                                 sp.max_sweeps);
      } catch (const nonconvergence_error&) {
        continue;
      }
      const double val = objective(cand);
      if (val > cur_val) {
        const double rel = (val - cur_val) / std::max(1.0, std::abs(val));
        cur = std::move(cand);
        cur_val = val;
        step = alpha * 2.0;
        accepted = true;
        stale = rel <= sp.stop_tol ? stale + 1 : 0;
      }
    }
    if (!accepted) ++stale;
    sol.history.push_back(cur_val);
  }

  double residual = lipschitz_violation(cur, PairSet::AllPairs);
  if (residual > sp.feas_tol) {
    cur = project_lipschitz(cur, PairSet::AllPairs, sp.feas_tol, sp.max_sweeps);
    residual = lipschitz_violation(cur, PairSet::AllPairs);
  }

  sol.section = cur;
  sol.area = area(cur, prob.metric);
  sol.iterations = iter;
  sol.feas_residual = residual;
  sol.converged = iter < sp.max_iter;
  return sol;
}

struct LimitExtraction {
  std::vector<int> indices;  // surviving subsequence, increasing
  GridSection limit;         // componentwise mean of the survivors
};

// Compactness witness: a finite Bolzano-Weierstrass pass. Coordinate by
// coordinate, the surviving subsequence is restricted to the half interval
// holding the most members (ties keep the half with the earliest survivor)
// until the spread is small; a last filter pins mutual sup-norm distances
// below tol. The limit is the mean of the survivors, feasible because the
// constraint set is convex and closed.
inline LimitExtraction extract_limit_section(
    const std::vector<GridSection>& sections, double tol = 1e-6) {
  require(!sections.empty(), "extract_limit_section: empty sequence");
  require(tol > 0, "extract_limit_section: tol must be > 0");
  const GridBase& g = *sections.front().base;
  const int p = sections.front().p();
  for (const GridSection& s : sections) {
    require(s.base->same_layout(g) && s.p() == p,
            "extract_limit_section: mismatched bases");
    for (int i = 0; i < g.count(); ++i)
      if (g.boundary[i])
        require((s.values.row(i) - sections.front().values.row(i)).norm() == 0.0,
                "extract_limit_section: mismatched boundaries");
  }

  std::vector<int> alive(sections.size());
  for (std::size_t i = 0; i < sections.size(); ++i) alive[i] = static_cast<int>(i);

  const double target = tol / (2.0 * std::sqrt(static_cast<double>(p)));
  for (int node = 0; node < g.count(); ++node) {
    if (g.boundary[node]) continue;
    for (int comp = 0; comp < p; ++comp) {
      while (alive.size() > 1) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int k : alive) {
          const double v = sections[k].values(node, comp);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        if (hi - lo <= target) break;
        const double mid = (lo + hi) / 2.0;
        std::vector<int> left, right;
        for (int k : alive)
          (sections[k].values(node, comp) <= mid ? left : right).push_back(k);
        if (left.size() > right.size())
          alive = std::move(left);
        else if (right.size() > left.size())
          alive = std::move(right);
        else
          alive = left.front() < right.front() ? std::move(left)
                                               : std::move(right);
      }
    }
  }

  auto sup_dist = [&](int a, int b) {
    double worst = 0.0;
    for (int i = 0; i < g.count(); ++i)
      worst = std::max(
          worst, (sections[a].values.row(i) - sections[b].values.row(i)).norm());
    return worst;
  };
  std::vector<int> kept;
  for (int k : alive)
    if (sup_dist(k, alive.back()) <= tol / 2.0) kept.push_back(k);

  Mat mean = Mat::Zero(g.count(), p);
  for (int k : kept) mean += sections[k].values;
  mean /= static_cast<double>(kept.size());

  return LimitExtraction{std::move(kept),
                         GridSection(sections.front().base, std::move(mean))};
}

struct SemicontinuityProbe {
  double scale = 0.0;
  int trials = 0;
  double max_improvement = 0.0;  // best perturbed area minus input area
};

// Samples feasible sections near the input and reports the best area gain.
// Near a converged maximizer the gain must shrink with the scale; this is the
// numerical face of upper semicontinuity of the area under uniform limits.
inline SemicontinuityProbe upper_semicontinuity_probe(
    const GridSection& s, const PseudoMetric& m, double perturbation_scale,
    int trials, std::uint64_t rng_seed) {
  require(perturbation_scale >= 0, "semicontinuity: scale must be >= 0");
  require(trials > 0, "semicontinuity: trials must be > 0");
  const GridBase& g = *s.base;
  const double base_area = area(s, m);
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> u(-perturbation_scale,
                                           perturbation_scale);

  SemicontinuityProbe probe{perturbation_scale, trials, 0.0};
  for (int t = 0; t < trials; ++t) {
    GridSection cand = s;
    if (perturbation_scale > 0) {
      for (int i = 0; i < g.count(); ++i) {
        if (g.boundary[i]) continue;
        for (int c = 0; c < s.p(); ++c) cand.values(i, c) += u(rng);
      }
      cand = project_lipschitz(cand, PairSet::Neighbors);
      double sup = 0.0;
      for (int i = 0; i < g.count(); ++i)
        sup = std::max(sup, (cand.values.row(i) - s.values.row(i)).norm());
      if (sup > perturbation_scale) {
        // Convexity: blending feasible sections stays feasible.
        const double lam = perturbation_scale / sup;
        cand.values = (1.0 - lam) * s.values + lam * cand.values;
      }
    }
    probe.max_improvement =
        std::max(probe.max_improvement, area(cand, m) - base_area);
  }
  return probe;
}

}  // namespace pqcausal
