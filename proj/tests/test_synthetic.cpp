#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "geomatch/curve.hpp"
#include "geomatch/errors.hpp"
#include "geomatch/manifold.hpp"
#include "geomatch/synthetic.hpp"

using namespace geomatch;

namespace {

// Independent recomputation of the generator's clearance promise: distance
// from the origin to the segment between matching SRV vectors.
double origin_segment_distance(const Vec& a, const Vec& b) {
  const Vec d = b - a;
  const double dd = d.squaredNorm();
  const double t = dd == 0.0 ? 0.0 : std::clamp(-a.dot(d) / dd, 0.0, 1.0);
  return (a + t * d).norm();
}

}  // namespace

TEST_CASE("energy study: rigid flat translation is exact at every n") {
  const EnergyStudy st =
      energy_convergence_study(translating_flat_sinusoids(), {8, 16, 32, 64}, 400);
  // Pure translation u = (0.3, 0.5): only the start-point term contributes,
  // E = |u|^2 / 2 at any discretization.
  const double want = 0.5 * (0.3 * 0.3 + 0.5 * 0.5);
  CHECK(st.refEnergy == doctest::Approx(want).epsilon(1e-12));
  for (const EnergyRow& r : st.rows) {
    CHECK(r.error < 1e-10);
    CHECK(r.energy == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("energy study: sphere arc family converges at the expected rate") {
  const EnergyStudy st =
      energy_convergence_study(rotating_sphere_arcs(), {8, 16, 32, 64}, 400);
  CHECK(st.slope > -1.6);
  CHECK(st.slope < -0.7);
  for (std::size_t i = 0; i + 1 < st.rows.size(); ++i)
    CHECK(st.rows[i + 1].error <= 1.10 * st.rows[i].error);
}

TEST_CASE("energy study: half-plane arc family error shrinks monotonically") {
  const EnergyStudy st =
      energy_convergence_study(sliding_h2_arcs(), {8, 16, 32, 64}, 400);
  CHECK(st.slope < 0.0);
  for (std::size_t i = 0; i + 1 < st.rows.size(); ++i)
    CHECK(st.rows[i + 1].error <= 1.10 * st.rows[i].error);
}

TEST_CASE("energy study: input validation") {
  CHECK_THROWS_AS(energy_convergence_study(rotating_sphere_arcs(), {}, 100),
                  DomainError);
  CHECK_THROWS_AS(
      energy_convergence_study(rotating_sphere_arcs(), {16, 8}, 100),
      DomainError);
  CHECK_THROWS_AS(
      energy_convergence_study(rotating_sphere_arcs(), {8, 16}, 0),
      DomainError);
}

TEST_CASE("random flat pairs: clearance holds and draws are reproducible") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const int d = 2 + (rep % 2);
    auto [a, b] = random_flat_pair(rng, 30, d);
    CHECK(a.n() == 30);
    CHECK(b.n() == 30);
    CHECK(a.manifold.tag() == b.manifold.tag());

    const SrvRep qa = srv(a), qb = srv(b);
    for (int k = 0; k < 30; ++k)
      CHECK(origin_segment_distance(qa.qs[k], qb.qs[k]) >=
            0.4 * std::min(qa.qs[k].norm(), qb.qs[k].norm()));
  }

  std::mt19937_64 r1(99), r2(99);
  auto [a1, b1] = random_flat_pair(r1, 12, 2);
  auto [a2, b2] = random_flat_pair(r2, 12, 2);
  for (int k = 0; k <= 12; ++k) {
    CHECK(a1.points[k] == a2.points[k]);
    CHECK(b1.points[k] == b2.points[k]);
  }
}

TEST_CASE("two bundles: seeded, offset, reproducible") {
  const auto curves = two_bundles(5, 12, 7);
  REQUIRE(curves.size() == 10);
  for (const DiscreteCurve& c : curves) CHECK(c.n() == 12);

  // Group bases sit far apart relative to the perturbation scale.
  CHECK(std::abs(curves[0].points[0][0]) < 0.1);
  CHECK(std::abs(curves[5].points[0][0] - 3.0) < 0.1);
  CHECK(std::abs(curves[5].points[0][1] - 1.5) < 0.1);

  const auto again = two_bundles(5, 12, 7);
  for (int i = 0; i < 10; ++i)
    for (int k = 0; k <= 12; ++k)
      CHECK(curves[i].points[k] == again[i].points[k]);

  const auto other = two_bundles(5, 12, 8);
  bool differs = false;
  for (int i = 0; i < 10 && !differs; ++i)
    differs = curves[i].points[5] != other[i].points[5];
  CHECK(differs);

  CHECK_THROWS_AS(two_bundles(0, 12, 7), DomainError);
}

TEST_CASE("shape pairs: manifolds, sizes and basic geometry") {
  const auto [circle, segment] = circle_segment_pair(20);
  CHECK(circle.manifold.tag() == "euclidean:2");
  CHECK(circle.n() == 20);
  CHECK(segment.n() == 20);

  const auto [early, late] = turn_pair_3d(16);
  CHECK(early.manifold.tag() == "euclidean:3");
  bool distinct = false;
  for (int k = 0; k <= 16 && !distinct; ++k)
    distinct = (early.points[k] - late.points[k]).norm() > 1e-6;
  CHECK(distinct);

  const auto [vert, horiz] = h2_segment_pair(15);
  CHECK(vert.manifold.tag() == "hyperbolic2");
  for (int k = 0; k <= 15; ++k) {
    CHECK(vert.points[k][1] > 0.0);
    CHECK(horiz.points[k][1] > 0.0);
    CHECK(vert.points[k][0] == 0.0);
    CHECK(horiz.points[k][1] == 1.0);
  }
  CHECK(vert.points[0][1] == doctest::Approx(1.0));
  CHECK(vert.points[15][1] == doctest::Approx(3.0));

  const Vec u{{0.6, -0.2}};
  const auto [base, moved] = translated_reparameterized_pair(18, u, 0.15);
  for (int k = 0; k <= 18; ++k) CHECK(moved.points[k][1] != base.points[k][1]);
  CHECK((moved.points[0] - base.points[0] - u).norm() < 1e-15);
  CHECK((moved.points[18] - base.points[18] - u).norm() < 1e-15);
  CHECK_THROWS_AS(translated_reparameterized_pair(18, u, 0.4), DomainError);
}
