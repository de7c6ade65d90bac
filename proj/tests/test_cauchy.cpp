#include <catch2/catch_amalgamated.hpp>

#include <pqcausal/cauchy.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "helpers.hpp"

using namespace pqcausal;
using testutil::mat;
using testutil::vec;

TEST_CASE("spacelike wrapper demands a strict contraction") {
  CHECK_NOTHROW(SpacelikeMap(LipMap(mat(1, 1, {0.5}), vec({0}))));
  CHECK_THROWS_AS(SpacelikeMap(LipMap(mat(1, 1, {1.0}), vec({0}))),
                  std::invalid_argument);
  CHECK_THROWS_AS(SpacelikeMap(LipMap(mat(1, 1, {1.5}), vec({0}))),
                  std::invalid_argument);

  const GraphSamples s(mat(2, 1, {0, 1}), mat(2, 1, {0, 0.9}));
  const SpacelikeMap w{LipMap(s, 0.9)};
  CHECK(w.contraction() == 0.9);
  CHECK(w.source_dim() == 1);
  CHECK(w.target_dim() == 1);
}

TEST_CASE("fixed point of a known affine pair") {
  // f(x) = x + 1 crossed with the surface {(x, x/2)}: x* solves x = (x+1)/2.
  const LipMap f(mat(1, 1, {1}), vec({1}));
  const SpacelikeMap w(LipMap(mat(1, 1, {0.5}), vec({0})));

  const IntersectResult r = intersect_fixed_point(f, w, vec({0}));
  CHECK(std::abs(r.x_star(0) - 1.0) <= 1e-9);
  REQUIRE(r.point.size() == 2);
  CHECK(std::abs(r.point(0) - 2.0) <= 1e-9);
  CHECK(std::abs(r.point(1) - 1.0) <= 1e-9);
  CHECK(r.iterations > 0);

  // A-posteriori certificate: the reported point is a near-fixed point.
  const double residual = std::abs(w.eval(f.eval(r.x_star))(0) - r.x_star(0));
  CHECK(residual <= 1e-10);
}

TEST_CASE("fixed point is independent of the start") {
  const LipMap f(mat(1, 1, {1}), vec({0}));
  const SpacelikeMap w(LipMap(mat(1, 1, {0.5}), vec({0})));
  for (double start : {-10.0, 0.0, 7.0, 1e4}) {
    const IntersectResult r = intersect_fixed_point(f, w, vec({start}));
    CHECK(std::abs(r.x_star(0)) <= 1e-9);
  }
}

TEST_CASE("intersection validates arguments") {
  const LipMap f(mat(1, 1, {1}), vec({1}));
  const SpacelikeMap w(LipMap(mat(1, 1, {0.5}), vec({0})));
  const LipMap tall(mat(2, 1, {1, 0}), vec({0, 0}));
  const LipMap steep(mat(1, 1, {1.5}), vec({0}));

  CHECK_THROWS_AS(intersect_fixed_point(tall, w, vec({0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(intersect_fixed_point(steep, w, vec({0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(intersect_fixed_point(f, w, vec({0, 0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(intersect_fixed_point(f, w, vec({0}), 0.0),
                  std::invalid_argument);
}

TEST_CASE("iteration budget failures surface as nonconvergence") {
  // Contraction factor 1 - 1e-8 needs ~4e9 steps to shrink the step below
  // the certificate threshold; the default budget gives up honestly.
  const LipMap f(mat(1, 1, {1}), vec({0}));
  const SpacelikeMap w(LipMap(mat(1, 1, {0.99999999}), vec({0})));
  CHECK_THROWS_AS(intersect_fixed_point(f, w, vec({1e6})),
                  nonconvergence_error);
}

TEST_CASE("surface check passes for a contracting affine surface") {
  const SpacelikeMap w(LipMap(mat(1, 1, {0.5}), vec({0.2})));
  const CauchyReport rep = verify_cauchy_surface(w, 50, 3);
  CHECK(rep.trials == 50);
  CHECK(rep.converged == 50);
  CHECK(rep.pass);
  CHECK(rep.max_discrepancy <= 1e-8);
  CHECK(rep.max_iterations > 0);

  CHECK_THROWS_AS(verify_cauchy_surface(w, 0, 3), std::invalid_argument);
}
