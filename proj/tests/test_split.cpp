#include <catch2/catch_amalgamated.hpp>

#include <pqcausal/split.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "helpers.hpp"

using namespace pqcausal;
using testutil::mat;
using testutil::vec;

TEST_CASE("speed bound values on the standard plane") {
  const PseudoMetric g = PseudoMetric::standard(1, 1);

  const SpeedBound light = check_speed_bound(g, vec({1, 1}));
  CHECK(light.lhs == 2.0);
  CHECK(light.rhs == 2.0);
  CHECK(light.ok);

  const SpeedBound timelike = check_speed_bound(g, vec({0.5, 1}));
  CHECK(timelike.lhs == 1.25);
  CHECK(timelike.rhs == 2.0);
  CHECK(timelike.ok);

  CHECK_THROWS_AS(check_speed_bound(g, vec({1, 0.5})), std::invalid_argument);
  CHECK_THROWS_AS(
      check_speed_bound(PseudoMetric(1, 1, vec({2}), vec({1})), vec({0, 1})),
      std::invalid_argument);
}

TEST_CASE("equality in the speed bound happens exactly on the light cone") {
  const PseudoMetric g = PseudoMetric::standard(2, 2);
  for (const Vec& v : cone_sample(g, 500, 11)) {
    const SpeedBound b = check_speed_bound(g, v);
    CHECK(b.ok);
    const bool tight = std::abs(b.lhs - b.rhs) <= 1e-9;
    const bool lightlike = std::abs(g.quad(v)) <= 1e-9;
    CHECK(tight == lightlike);
  }
}

TEST_CASE("lifted paths of a contracting section have timelike chords") {
  const LipMap section(mat(1, 1, {0.9}), vec({0.2}));
  const std::vector<Vec> base = {vec({0}), vec({0.5}), vec({1.2}),
                                 vec({-0.3})};
  const std::vector<Vec> lifted = lift_path(section, base);
  REQUIRE(lifted.size() == base.size());

  const PseudoMetric g = PseudoMetric::standard(1, 1);
  for (std::size_t i = 0; i + 1 < lifted.size(); ++i)
    CHECK(classify_segment(g, lifted[i], lifted[i + 1]) ==
          CausalClass::Timelike);
  CHECK(lifted[0].size() == 2);
  CHECK(std::abs(lifted[0](0) - 0.2) <= 1e-15);
  CHECK(lifted[0](1) == 0.0);

  CHECK_THROWS_AS(lift_path(section, {}), std::invalid_argument);
  CHECK_THROWS_AS(lift_path(section, {vec({0, 0})}), std::invalid_argument);
}

TEST_CASE("foliation witness requires a strict contraction") {
  CHECK_NOTHROW(FoliationWitness(LipMap(mat(1, 1, {0.5}), vec({0}))));
  CHECK_THROWS_AS(FoliationWitness(LipMap(mat(1, 1, {1.0}), vec({0}))),
                  std::invalid_argument);
}

TEST_CASE("leaf id is constant along a leaf and splits known points") {
  // Constant shift W = 0.5: leaves are horizontal lines x = p0 + 0.5.
  const FoliationWitness fol(LipMap(Mat::Zero(1, 1), vec({0.5})));
  CHECK(leaf_id(fol, vec({1, 2}))(0) == 0.5);
  for (double y : {-3.0, 0.0, 1.7})
    CHECK(leaf_id(fol, vec({0.5 + 0.5, y}))(0) == 0.5);
  CHECK_THROWS_AS(leaf_id(fol, vec({1})), std::invalid_argument);

  // Surface {(x, 0.5 x)}: the leaf x = 1 crosses it at (1, 0.5).
  const SpacelikeMap w(LipMap(mat(1, 1, {0.5}), vec({0})));
  const SplittingResult r = splitting_map(fol, w, vec({1, 2}));
  CHECK(std::abs(r.leaf(0) - 0.5) <= 1e-15);
  CHECK((r.surface_point - vec({1.0, 0.5})).norm() <= 1e-9);
  CHECK(r.time(0) == 2.0);

  const Vec back = reconstruct(fol, r.leaf, r.time);
  CHECK((back - vec({1, 2})).norm() <= 1e-12);
}

TEST_CASE("splitting map round-trips a two-by-two affine foliation") {
  const FoliationWitness fol(
      LipMap(mat(2, 2, {0.2, 0.1, 0, 0.3}), vec({0.1, -0.2})));
  const SpacelikeMap w(LipMap(mat(2, 2, {0.4, 0, 0.1, 0.2}), vec({0, 0})));

  const std::vector<Vec> pts = {vec({1, 2, 3, 4}), vec({-0.5, 0.7, 0, 1}),
                                vec({10, -3, 2, 8})};
  for (const Vec& pt : pts) {
    const SplittingResult r = splitting_map(fol, w, pt);
    const Vec back = reconstruct(fol, r.leaf, r.time);
    CHECK((back - pt).norm() <= 1e-10);

    // The surface point lies on both the surface and the leaf through pt.
    const Vec x = r.surface_point.head(2);
    const Vec y = r.surface_point.tail(2);
    CHECK((w.eval(x) - y).norm() <= 1e-9);
    CHECK((leaf_id(fol, r.surface_point) - r.leaf).norm() <= 1e-9);
  }
}

TEST_CASE("bijectivity sweep passes for contracting affine data") {
  const FoliationWitness fol(LipMap(mat(1, 1, {0.3}), vec({0.1})));
  const SpacelikeMap w(LipMap(mat(1, 1, {0.4}), vec({0})));
  const SplittingReport rep = verify_splitting_bijectivity(fol, w, 200, 5);
  CHECK(rep.samples == 200);
  CHECK(rep.collisions == 0);
  CHECK(rep.max_roundtrip_error <= 1e-9);
  CHECK(rep.pass);

  CHECK_THROWS_AS(verify_splitting_bijectivity(fol, w, 0, 5),
                  std::invalid_argument);
}
