#include <catch2/catch_amalgamated.hpp>

#include <pqcausal/diamond.hpp>

#include <cmath>
#include <stdexcept>

#include "helpers.hpp"

using namespace pqcausal;
using testutil::vec;

TEST_CASE("diamond membership in the sum-of-norms frame") {
  const FlatDiamond d(1, 1);
  CHECK(in_flat_diamond(d, vec({0, 0})));
  CHECK(in_flat_diamond(d, vec({0.3, 0.4})));
  CHECK_FALSE(in_flat_diamond(d, vec({0.6, 0.5})));
  // The boundary joint and both unit spheres are excluded.
  CHECK_FALSE(in_flat_diamond(d, vec({0.5, 0.5})));
  CHECK_FALSE(in_flat_diamond(d, vec({1, 0})));
  CHECK_FALSE(in_flat_diamond(d, vec({0, 1})));
  // Shrink tolerance: 0.7 < 1 but not < 1 - 0.31.
  CHECK_FALSE(in_flat_diamond(d, vec({0.3, 0.4}), 0.31));

  CHECK_THROWS_AS(in_flat_diamond(d, vec({0, 0, 0})), std::invalid_argument);
  CHECK_THROWS_AS(in_flat_diamond(d, vec({0, 0}), -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(FlatDiamond(0, 1), std::invalid_argument);
}

TEST_CASE("membership oracle agrees with the closed form") {
  const FlatDiamond d(1, 2);
  CHECK(diamond_membership_oracle(d, vec({0.3, 0.3, 0.4}), 200));
  CHECK_FALSE(diamond_membership_oracle(d, vec({0.6, 0.3, 0.4}), 200));
  CHECK_FALSE(diamond_membership_oracle(d, vec({0, 0, 1.2}), 200));
  CHECK_THROWS_AS(diamond_membership_oracle(d, vec({0, 0, 0}), 3),
                  std::invalid_argument);
}

TEST_CASE("membership oracle resolves points close to the rim") {
  // Temporal part off every sphere-sample axis; alignment of the sample set
  // with the temporal direction keeps the sampled minimum exact, so the
  // oracle stays correct within 1e-4 of the rim.
  const FlatDiamond d(2, 2);
  const double theta = 0.37;
  const double alpha = 0.2;
  Vec inside(4), outside(4);
  for (Vec* pt : {&inside, &outside}) {
    (*pt)(2) = 0.55 * std::cos(theta);
    (*pt)(3) = 0.55 * std::sin(theta);
  }
  inside(0) = (0.45 - 1e-4) * std::cos(alpha);
  inside(1) = (0.45 - 1e-4) * std::sin(alpha);
  outside(0) = (0.45 + 1e-4) * std::cos(alpha);
  outside(1) = (0.45 + 1e-4) * std::sin(alpha);

  CHECK(in_flat_diamond(d, inside));
  CHECK(diamond_membership_oracle(d, inside, 200));
  CHECK_FALSE(in_flat_diamond(d, outside));
  CHECK_FALSE(diamond_membership_oracle(d, outside, 200));
}

TEST_CASE("inversion sends marked points to their known images") {
  const FlatDiamond d(1, 1);
  // Past tip -e1 lands on the origin of L, the center on e1/2.
  CHECK((inversion_phi(d, vec({0, -1})) - vec({0, 0})).norm() <= 1e-15);
  CHECK((inversion_phi(d, vec({0, 0})) - vec({0, 0.5})).norm() <= 1e-15);
  // Q(pt - e1) = -0.27 at (0.3, 0.4); the image is (10/9, 31/18).
  CHECK((inversion_phi(d, vec({0.3, 0.4})) - vec({10.0 / 9.0, 31.0 / 18.0}))
            .norm() <= 1e-12);

  const FlatDiamond d2(1, 2);
  CHECK((inversion_phi(d2, vec({0, 0, 1})) - vec({0, 0, 0.5})).norm() <=
        1e-15);

  CHECK_THROWS_AS(inversion_phi(d, vec({1, 2})), std::invalid_argument);
  CHECK_THROWS_AS(inversion_phi(d, vec({1, 2, 3})), std::invalid_argument);
}

TEST_CASE("inversion round-trips and lands interior points in the future") {
  const FlatDiamond d(2, 2);
  for (const Vec& pt : {vec({0.1, -0.2, 0.3, 0.1}), vec({0, 0, 0, 0}),
                        vec({-0.4, 0.1, -0.2, 0.3})}) {
    REQUIRE(in_flat_diamond(d, pt));
    const Vec w = inversion_phi(d, pt);
    CHECK(in_future_of_L(d, w));
    CHECK((inversion_phi_inverse(d, w) - pt).norm() <= 1e-12);
  }
}

TEST_CASE("future of the axis subspace is the spatial cone condition") {
  const FlatDiamond d(1, 2);
  CHECK(in_future_of_L(d, vec({0.5, 1, 7})));
  CHECK_FALSE(in_future_of_L(d, vec({1.5, 1, 0})));
  CHECK_FALSE(in_future_of_L(d, vec({1, 1, 0})));
  CHECK_THROWS_AS(in_future_of_L(d, vec({0, 0})), std::invalid_argument);
}

TEST_CASE("product model points validate their constraints") {
  CHECK_THROWS_AS(ProductModelPoint(vec({0.5, 1}), vec({0}), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(ProductModelPoint(vec({0, -1}), vec({0}), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(ProductModelPoint(vec({0, 1}), vec({0}), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(ProductModelPoint(vec({1}), vec({0}), 1.0),
                  std::invalid_argument);

  const ProductModelPoint m = ProductModelPoint::from_chart(vec({0.4}),
                                                            vec({1.2}), 2.5);
  CHECK(m.p() == 1);
  CHECK(m.q() == 2);
  CHECK(std::abs(m.x.squaredNorm() - 2.0 * m.x(1) * m.x(1) + 1.0) <= 1e-12);
}

TEST_CASE("product chart round-trips through the half-space map") {
  const FlatDiamond d(1, 2);
  const ProductModelPoint m = ProductModelPoint::from_chart(vec({0}),
                                                            vec({3}), 2.0);
  const Vec pt = psi_product(m);
  CHECK((pt - vec({0, 2, 3})).norm() <= 1e-15);

  const ProductModelPoint back = psi_chart(d, pt);
  CHECK(std::abs(back.t - 2.0) <= 1e-12);
  CHECK((back.x - vec({0, 1})).norm() <= 1e-12);
  CHECK((back.y - vec({3})).norm() <= 1e-12);

  const FlatDiamond d2(2, 2);
  const Vec pt2 = vec({0.3, 0.4, 2, 7});
  const ProductModelPoint m2 = psi_chart(d2, pt2);
  CHECK(std::abs(m2.t - std::sqrt(3.75)) <= 1e-12);
  CHECK((psi_product(m2) - pt2).norm() <= 1e-12);

  CHECK_THROWS_AS(psi_chart(d2, vec({1.5, 0, 1, 0})), std::invalid_argument);
}

TEST_CASE("inversion is conformal with the form value as the length scale") {
  // The pullback fits mu * G with mu = 1 / Q(pt - e1)^2; the reported factor
  // is 1 / sqrt(mu) = |Q(pt - e1)| = 0.27 at this point.
  const FlatDiamond d(1, 1);
  const Vec pt = vec({0.3, 0.4});
  const ConformalityResult r = conformality_check_phi(d, pt, 1e-5);
  CHECK(r.pass);
  CHECK(r.residual <= 1e-6);
  CHECK(std::abs(r.factor - 0.27) <= 1e-5);
}

TEST_CASE("product chart is conformal with factor one over the height") {
  const ProductModelPoint m = ProductModelPoint::from_chart(vec({0.4}),
                                                            vec({1.2}), 2.5);
  const ConformalityResult r = conformality_check_psi(m, 1e-5);
  CHECK(r.pass);
  CHECK(r.residual <= 1e-6);
  CHECK(std::abs(r.factor - 1.0 / 2.5) <= 1e-6);
}
