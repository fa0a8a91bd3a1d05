#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "doctest.h"
#include "geomatch/curve.hpp"
#include "geomatch/errors.hpp"
#include "geomatch/geodesic.hpp"
#include "geomatch/manifold.hpp"
#include "geomatch/statistics.hpp"
#include "oracles.hpp"

using namespace geomatch;

namespace {

DiscreteCurve flat_curve(const std::function<Vec(double)>& f, int n) {
  return discretize(ManifoldSpec::euclidean(2), f, n);
}

DiscreteCurve translated(const DiscreteCurve& alpha, const Vec& u) {
  std::vector<Vec> pts = alpha.points;
  for (Vec& p : pts) p += u;
  return DiscreteCurve(alpha.manifold, std::move(pts), alpha.relaxedEdges);
}

// Piecewise-linear resample of a flat curve at warped parameters: the same
// shape under a different parameterization.
DiscreteCurve reparameterized(const DiscreteCurve& alpha,
                              const std::function<double(double)>& warp) {
  const int n = alpha.n();
  std::vector<Vec> pts(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double t = std::clamp(warp(static_cast<double>(k) / n), 0.0, 1.0);
    const double x = t * n;
    const int c = std::min(static_cast<int>(x), n - 1);
    pts[k] = alpha.points[c] + (x - c) * (alpha.points[c + 1] - alpha.points[c]);
  }
  return DiscreteCurve(alpha.manifold, std::move(pts), alpha.relaxedEdges);
}

double max_point_gap(const DiscreteCurve& a, const DiscreteCurve& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.points.size(); ++k)
    worst = std::max(worst, (a.points[k] - b.points[k]).norm());
  return worst;
}

// Three distinct flat curves around one base sine: two pure translates and a
// translated mild reparameterization. Small enough spread for a single
// Karcher basin.
std::vector<DiscreteCurve> karcher_corpus() {
  const DiscreteCurve base =
      flat_curve([](double t) { return Vec{{t, 0.3 * std::sin(M_PI * t)}}; }, 16);
  std::vector<DiscreteCurve> out;
  out.push_back(translated(base, Vec{{0.2, 0.1}}));
  out.push_back(translated(base, Vec{{-0.3, 0.25}}));
  out.push_back(reparameterized(
      translated(base, Vec{{0.1, -0.35}}),
      [](double t) { return t + 0.08 * std::sin(M_PI * t); }));
  return out;
}

// Two groups of five perturbed flat curves with a large offset between the
// groups; the spread is validated from the computed matrix before use.
std::vector<DiscreteCurve> bundle_curves() {
  std::vector<DiscreteCurve> out;
  for (int g = 0; g < 2; ++g)
    for (int i = 0; i < 5; ++i) {
      const double ox = g * 3.0 + 0.010 * i;
      const double oy = g * 1.5 - 0.008 * i;
      const double amp = 0.30 + 0.012 * i;
      const double rip = 0.006 * i;
      out.push_back(flat_curve(
          [=](double t) {
            return Vec{{ox + t, oy + amp * std::sin(M_PI * t) +
                                    rip * std::sin(2.0 * M_PI * t)}};
          },
          12));
    }
  return out;
}

const DistanceMatrix& bundle_matrix() {
  static const DistanceMatrix mx = distance_matrix(bundle_curves());
  return mx;
}

}  // namespace

TEST_CASE("shape distance: identical curves give exactly zero") {
  const DiscreteCurve alpha =
      flat_curve([](double t) { return Vec{{t, 0.4 * std::sin(2.0 * M_PI * t)}}; }, 14);
  CHECK(shape_distance(alpha, alpha) == 0.0);

  const DiscreteCurve other = translated(alpha, Vec{{0.5, 0.0}});
  CHECK(shape_distance(alpha, other) > 0.0);
}

TEST_CASE("shape distance: flat translation matches the oracle") {
  const DiscreteCurve alpha =
      flat_curve([](double t) { return Vec{{t, 0.3 * std::sin(2.0 * M_PI * t)}}; }, 16);
  const Vec u{{0.7, -0.4}};
  const DiscreteCurve beta = translated(alpha, u);

  const double d = shape_distance(alpha, beta);
  CHECK(d == doctest::Approx(u.norm()).epsilon(1e-9));
  CHECK(d == doctest::Approx(testing::flat_srv_distance(alpha, beta)).epsilon(1e-9));
}

TEST_CASE("shape distance: never above the unmatched geodesic") {
  const DiscreteCurve alpha =
      flat_curve([](double t) { return Vec{{t, 0.45 * std::sin(M_PI * t)}}; }, 16);
  DiscreteCurve beta = reparameterized(
      translated(alpha, Vec{{0.6, -0.3}}),
      [](double t) { return t + 0.12 * std::sin(M_PI * t); });

  const double unmatched = path_length(geodesic_shoot(alpha, beta).path);
  const double d = shape_distance(alpha, beta);
  CHECK(d > 0.0);
  CHECK(d <= unmatched + 1e-9);
}

TEST_CASE("shape distance: approximately symmetric on random flat pairs") {
  // Random related pairs: translate + mild warp + small shape ripple. The
  // one-sided search is only near-symmetric while the optimum stays interior;
  // unrelated shapes can park mass at a degenerate boundary differently per
  // direction.
  std::mt19937_64 rng(411);
  std::uniform_real_distribution<double> coef(-0.35, 0.35);
  std::uniform_real_distribution<double> shift(-0.5, 0.5);
  std::uniform_real_distribution<double> warp(0.05, 0.12);
  std::uniform_real_distribution<double> rip(0.01, 0.04);
  std::uniform_real_distribution<double> ph(0.0, 6.28);
  for (int rep = 0; rep < 5; ++rep) {
    const double a1 = coef(rng), a2 = coef(rng), a3 = coef(rng);
    const double ux = shift(rng), uy = shift(rng);
    const double wv = warp(rng), rv = rip(rng), phv = ph(rng);
    auto base = [=](double s) {
      return Vec{{s + a1 * std::sin(M_PI * s),
                  a2 * std::sin(M_PI * s) + a3 * std::sin(2.0 * M_PI * s)}};
    };
    const DiscreteCurve alpha = flat_curve(base, 16);
    const DiscreteCurve beta = flat_curve(
        [=](double t) {
          const double s = t + wv * std::sin(M_PI * t);
          Vec p = base(s) + Vec{{ux, uy}};
          p[1] += rv * std::sin(2.0 * M_PI * t + phv);
          return p;
        },
        16);
    const double d01 = shape_distance(alpha, beta);
    const double d10 = shape_distance(beta, alpha);
    CHECK(std::abs(d01 - d10) < 0.02 * std::max(d01, d10));
  }
}

TEST_CASE("karcher mean: single curve returned unchanged") {
  const DiscreteCurve alpha =
      flat_curve([](double t) { return Vec{{t, t * (1.0 - t)}}; }, 10);
  const KarcherResult r = karcher_mean({alpha});
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.gradNorm == 0.0);
  REQUIRE(r.mean.points.size() == alpha.points.size());
  for (std::size_t k = 0; k < alpha.points.size(); ++k)
    CHECK(r.mean.points[k] == alpha.points[k]);
}

TEST_CASE("karcher mean: opposite translates center exactly") {
  const DiscreteCurve base =
      flat_curve([](double t) { return Vec{{t, 0.35 * std::sin(M_PI * t)}}; }, 14);
  const Vec u{{0.4, -0.25}};
  const KarcherResult r =
      karcher_mean({translated(base, u), translated(base, -u)});

  CHECK(r.converged);
  CHECK(max_point_gap(r.mean, base) < 1e-4);
  // Round objectives: 0^2 + (2|u|)^2 from the first input, then |u|^2 twice.
  REQUIRE(r.objective.size() >= 2);
  CHECK(r.objective.front() ==
        doctest::Approx(4.0 * u.squaredNorm()).epsilon(1e-6));
  CHECK(r.objective.back() ==
        doctest::Approx(2.0 * u.squaredNorm()).epsilon(1e-6));
}

TEST_CASE("karcher mean: invariant under input permutation") {
  // Same-parameterization inputs: the order selects a different starting
  // estimate, so only a shared parameterization makes agreement pointwise.
  auto mk = [](double ux, double uy, double amp) {
    return flat_curve(
        [=](double t) { return Vec{{t + ux, uy + amp * std::sin(M_PI * t)}}; },
        16);
  };
  const std::vector<DiscreteCurve> curves = {
      mk(0.2, 0.1, 0.30), mk(-0.3, 0.25, 0.34), mk(0.1, -0.35, 0.27)};
  const std::vector<DiscreteCurve> shuffled = {curves[2], curves[0], curves[1]};

  const KarcherResult r0 = karcher_mean(curves);
  const KarcherResult r1 = karcher_mean(shuffled);
  CHECK(r0.converged);
  CHECK(r1.converged);
  CHECK(max_point_gap(r0.mean, r1.mean) < 1e-4);
}

TEST_CASE("karcher mean: objective nonincreasing") {
  const KarcherResult r = karcher_mean(karcher_corpus());
  CHECK(r.converged);
  REQUIRE(!r.objective.empty());
  for (std::size_t i = 0; i + 1 < r.objective.size(); ++i)
    CHECK(r.objective[i + 1] <= r.objective[i] + 1e-6);
}

TEST_CASE("karcher mean: input validation") {
  CHECK_THROWS_AS(karcher_mean({}), DomainError);
  const DiscreteCurve alpha =
      flat_curve([](double t) { return Vec{{t, 0.0}}; }, 4);
  KarcherConfig cfg;
  cfg.maxIterations = 0;
  CHECK_THROWS_AS(karcher_mean({alpha}, cfg), DomainError);
}

TEST_CASE("distance matrix: exact symmetry and zero diagonal") {
  const std::vector<DiscreteCurve> curves = karcher_corpus();
  const DistanceMatrix mx = distance_matrix(curves);

  REQUIRE(mx.size() == 3);
  CHECK(mx.labels == std::vector<std::string>{"0", "1", "2"});
  for (int i = 0; i < 3; ++i) {
    CHECK(mx.values[i][i] == 0.0);
    for (int j = 0; j < 3; ++j) CHECK(mx.values[i][j] == mx.values[j][i]);
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) CHECK(mx.values[i][j] > 0.0);

  CHECK_THROWS_AS(distance_matrix({curves[0]}), DomainError);
  CHECK_THROWS_AS(distance_matrix(curves, {}, {"a", "b"}), DomainError);
}

TEST_CASE("cluster: identical pair merges at height zero") {
  const DiscreteCurve alpha =
      flat_curve([](double t) { return Vec{{t, 0.2 * std::sin(M_PI * t)}}; }, 10);
  const DistanceMatrix mx = distance_matrix({alpha, alpha});

  const ClusterResult one = cluster(mx, 1);
  CHECK(one.assignment == std::vector<int>{0, 0});
  REQUIRE(one.dendrogram.merges.size() == 1);
  CHECK(one.dendrogram.merges[0].a == 0);
  CHECK(one.dendrogram.merges[0].b == 1);
  CHECK(one.dendrogram.merges[0].height == 0.0);

  const ClusterResult two = cluster(mx, 2);
  CHECK(two.assignment == std::vector<int>{0, 1});
}

TEST_CASE("cluster: two bundles split exactly") {
  const DistanceMatrix& mx = bundle_matrix();
  REQUIRE(mx.size() == 10);

  // The construction must really be two tight bundles: min inter-group
  // distance above three times the max intra-group distance.
  double maxIntra = 0.0, minInter = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 10; ++i)
    for (int j = i + 1; j < 10; ++j) {
      if (i / 5 == j / 5)
        maxIntra = std::max(maxIntra, mx.values[i][j]);
      else
        minInter = std::min(minInter, mx.values[i][j]);
    }
  REQUIRE(minInter > 3.0 * maxIntra);

  const std::vector<int> want{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  const ClusterResult avg = cluster(mx, 2, Linkage::Average);
  CHECK(avg.assignment == want);

  const ClusterResult cmp = cluster(mx, 2, Linkage::Complete);
  CHECK(cmp.assignment == want);

  const ClusterResult sgl = cluster(mx, 2, Linkage::Single);
  CHECK(sgl.assignment == want);

  for (std::size_t t = 0; t + 1 < avg.dendrogram.merges.size(); ++t)
    CHECK(avg.dendrogram.merges[t].height <=
          avg.dendrogram.merges[t + 1].height);

  // Cutting between the bundle spread and the gap gives the same partition.
  const ClusterResult cut =
      cluster_at_height(mx, 0.5 * (3.0 * maxIntra + minInter));
  CHECK(cut.assignment == want);
}

TEST_CASE("cluster: deterministic across reruns") {
  const DistanceMatrix& mx = bundle_matrix();
  const ClusterResult a = cluster(mx, 2);
  const ClusterResult b = cluster(mx, 2);
  CHECK(a.assignment == b.assignment);
  REQUIRE(a.dendrogram.merges.size() == b.dendrogram.merges.size());
  for (std::size_t t = 0; t < a.dendrogram.merges.size(); ++t) {
    CHECK(a.dendrogram.merges[t].a == b.dendrogram.merges[t].a);
    CHECK(a.dendrogram.merges[t].b == b.dendrogram.merges[t].b);
    CHECK(a.dendrogram.merges[t].height == b.dendrogram.merges[t].height);
  }
}

TEST_CASE("cluster: input validation") {
  const DistanceMatrix& mx = bundle_matrix();
  CHECK_THROWS_AS(cluster(mx, 0), DomainError);
  CHECK_THROWS_AS(cluster(mx, 11), DomainError);

  DistanceMatrix bad = mx;
  bad.values.back().pop_back();
  CHECK_THROWS_AS(cluster(bad, 2), DomainError);
}
