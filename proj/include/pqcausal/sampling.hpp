#pragma once

#include <random>

#include "pqcausal/lipgraph.hpp"

namespace pqcausal {

inline Vec random_vec(std::mt19937_64& rng, int dim, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = u(rng);
  return v;
}

// Affine map with operator norm exactly `norm` (up to rounding).
inline LipMap random_affine_map(std::mt19937_64& rng, int source_dim,
                                int target_dim, double norm) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat A(target_dim, source_dim);
  for (int i = 0; i < target_dim; ++i)
    for (int j = 0; j < source_dim; ++j) A(i, j) = gauss(rng);
  const double s = Eigen::JacobiSVD<Mat>(A).singularValues()(0);
  if (s > 0) A *= norm / s;
  return LipMap(std::move(A), random_vec(rng, target_dim, 1.0));
}

// Interpolant whose data constant lands at or below `constant`, with sources
// kept pairwise separated so the ratios are well conditioned.
inline LipMap random_interpolant_map(std::mt19937_64& rng, int source_dim,
                                     int target_dim, int count,
                                     double constant) {
  require(count >= 1, "random_interpolant_map: count must be >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat sources(count, source_dim);
  int placed = 0;
  while (placed < count) {
    Vec cand = random_vec(rng, source_dim, 2.0);
    bool ok = true;
    for (int i = 0; i < placed && ok; ++i)
      ok = (sources.row(i).transpose() - cand).norm() > 1e-2;
    if (!ok) continue;
    sources.row(placed++) = cand.transpose();
  }
  Mat targets(count, target_dim);
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < target_dim; ++j) targets(i, j) = gauss(rng);

  GraphSamples raw(sources, targets);
  if (count > 1) {
    const double k = lipschitz_constant(raw);
    if (k > 0.95 * constant) {
      const Eigen::RowVectorXd mean = targets.colwise().mean();
      targets.rowwise() -= mean;
      targets *= 0.95 * constant / k;
      targets.rowwise() += mean;
    }
  }
  return LipMap(GraphSamples(std::move(sources), std::move(targets)), constant);
}

}  // namespace pqcausal
