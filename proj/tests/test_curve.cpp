#include "geomatch/curve.hpp"

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

using namespace geomatch;
using geomatch::testing::random_curve;
using geomatch::testing::random_curve_tangent;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

DiscreteCurve unit_segment() {
  return DiscreteCurve(ManifoldSpec::euclidean(2), {vec2(0, 0), vec2(1, 0)});
}

CurveTangent tangent2(std::initializer_list<Vec> vs) {
  return CurveTangent(std::vector<Vec>(vs));
}

const ManifoldSpec kCurvedSpecs[] = {ManifoldSpec::hyperbolic2(),
                                     ManifoldSpec::sphere2()};
const ManifoldSpec kAllSpecs[] = {ManifoldSpec::euclidean(2),
                                  ManifoldSpec::euclidean(3),
                                  ManifoldSpec::hyperbolic2(),
                                  ManifoldSpec::sphere2()};

}  // namespace

TEST_CASE("edge_frame examples") {
  {
    EdgeFrame F = edge_frame(unit_segment());
    CHECK((F.tau[0] - vec2(1, 0)).norm() == 0.0);
    CHECK((F.v[0] - vec2(1, 0)).norm() == 0.0);
    CHECK((F.q[0] - vec2(1, 0)).norm() < 1e-15);
    CHECK(F.a[0] == doctest::Approx(1.0));
    CHECK(F.b[0] == doctest::Approx(1.0));
  }
  {
    DiscreteCurve c(ManifoldSpec::sphere2(), {vec3(0, 0, 1), vec3(1, 0, 0)});
    EdgeFrame F = edge_frame(c);
    CHECK(F.normTau[0] == doctest::Approx(M_PI / 2).epsilon(1e-14));
    CHECK(F.a[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(F.b[0] == doctest::Approx(2.0 / M_PI).epsilon(1e-14));
  }
  {
    DiscreteCurve c(ManifoldSpec::hyperbolic2(),
                    {vec2(0, 1), vec2(0, std::exp(1.0))});
    EdgeFrame F = edge_frame(c);
    CHECK(F.normTau[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((F.tau[0] - vec2(0, 1)).norm() < 1e-12);
    CHECK(F.a[0] == doctest::Approx(std::cosh(1.0)).epsilon(1e-12));
  }
}

TEST_CASE("edge_frame invariants on random curves") {
  for (const auto& spec : kAllSpecs) {
    Manifold M(spec);
    std::mt19937_64 rng(31);
    DiscreteCurve c = random_curve(M, 8, rng);
    EdgeFrame F = edge_frame(c);
    for (int k = 0; k < F.n(); ++k) {
      CHECK(F.normQ[k] * F.normQ[k] ==
            doctest::Approx(F.n() * F.normTau[k]).epsilon(1e-10));
      CHECK(M.norm(c.points[k], F.v[k]) == doctest::Approx(1.0).epsilon(1e-10));
      // bwd . fwd = identity
      Vec w = F.v[k];
      CHECK((F.bwd(k, F.fwd(k, w)) - w).norm() < 1e-10);
    }
  }
  // Straight flat curve has lambda = 1 everywhere.
  std::vector<Vec> pts;
  for (int k = 0; k <= 4; ++k) pts.push_back(vec2(0.5 * k, 0));
  EdgeFrame S = edge_frame(DiscreteCurve(ManifoldSpec::euclidean(2), pts));
  for (double l : S.lambda) CHECK(l == doctest::Approx(1.0));
}

TEST_CASE("d_tau flat case and zero field") {
  DiscreteCurve c = unit_segment();
  CurveTangent w = tangent2({vec2(0, 0), vec2(0, 1)});
  CurveTangent d = d_tau(c, w);
  CHECK((d[0] - vec2(0, 1)).norm() == 0.0);
  CHECK(d[1].norm() == 0.0);  // zero pad at index n

  for (const auto& spec : kAllSpecs) {
    Manifold M(spec);
    std::mt19937_64 rng(37);
    DiscreteCurve rc = random_curve(M, 6, rng);
    CurveTangent z = CurveTangent::zero(rc);
    CurveTangent dz = d_tau(rc, z);
    for (int k = 0; k <= rc.n(); ++k) CHECK(dz[k].norm() == 0.0);
  }

  // Flat case is exactly w_{k+1} - w_k.
  Manifold M(ManifoldSpec::euclidean(3));
  std::mt19937_64 rng(41);
  DiscreteCurve rc = random_curve(M, 7, rng);
  CurveTangent w3 = random_curve_tangent(M, rc, rng);
  CurveTangent d3 = d_tau(rc, w3);
  for (int k = 0; k < rc.n(); ++k)
    CHECK((d3[k] - (w3[k + 1] - w3[k])).norm() < 1e-15);
}

TEST_CASE("d_tau converges to the transported difference on small edges") {
  // Fixed smooth sphere arc and smooth field; refining the discretization
  // shrinks (D_tau w)_k - (w_{k+1}^par - w_k) at second order in edge length.
  Manifold M(ManifoldSpec::sphere2());
  auto sampler = [](double t) {
    const double th = 0.3 + 1.1 * t, ph = 0.4 * std::sin(2.0 * t);
    return Vec(vec3(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                    std::cos(th)));
  };
  auto field = [&](double t, const Vec& x) {
    Vec raw = vec3(std::cos(3.0 * t), std::sin(2.0 * t), t);
    Manifold S(ManifoldSpec::sphere2());
    return Vec(S.project_tangent(x, raw));
  };
  double prev = -1.0;
  for (int n : {8, 16, 32}) {
    DiscreteCurve c = discretize(M.spec(), sampler, n);
    CurveTangent w;
    for (int k = 0; k <= n; ++k)
      w.vecs.push_back(field(static_cast<double>(k) / n, c.points[k]));
    EdgeFrame F = edge_frame(c);
    CurveTangent d = d_tau(F, w);
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
      Vec plain = F.bwd(k, w[k + 1]) - w[k];
      worst = std::max(worst, (d[k] - plain).norm());
    }
    if (prev >= 0.0) CHECK(worst < 0.5 * prev);
    prev = worst;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("metric_gn examples") {
  DiscreteCurve c = unit_segment();
  CurveTangent normal = tangent2({vec2(0, 0), vec2(0, 1)});
  CurveTangent shift = tangent2({vec2(1, 0), vec2(1, 0)});
  CurveTangent stretch = tangent2({vec2(0, 0), vec2(1, 0)});
  CHECK(metric_gn(c, normal, normal) == doctest::Approx(1.0));
  CHECK(metric_gn(c, shift, shift) == doctest::Approx(1.0));
  CHECK(metric_gn(c, stretch, stretch) == doctest::Approx(0.25));
}

TEST_CASE("metric_gn symmetry and positive definiteness") {
  for (const auto& spec : kAllSpecs) {
    Manifold M(spec);
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 25; ++trial) {
      DiscreteCurve c = random_curve(M, 6, rng);
      EdgeFrame F = edge_frame(c);
      CurveTangent w = random_curve_tangent(M, c, rng);
      CurveTangent z = random_curve_tangent(M, c, rng);
      const double wz = metric_gn(F, w, z);
      const double zw = metric_gn(F, z, w);
      CHECK(std::abs(wz - zw) < 1e-12 * (1.0 + std::abs(wz)));
      CHECK(metric_gn(F, w, w) > 0.0);
    }
  }
}

TEST_CASE("metric matches the SRV finite-difference construction") {
  // Move every point along its tangent, differentiate q_k numerically with
  // transport back to the base, and rebuild G from |w_0|^2 + (1/n)sum|dq|^2.
  const double eps = 1e-5;
  for (const auto& spec : kCurvedSpecs) {
    Manifold M(spec);
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 5; ++trial) {
      DiscreteCurve c = random_curve(M, 5, rng);
      CurveTangent w = random_curve_tangent(M, c, rng, 0.5);
      auto moved = [&](double s) {
        std::vector<Vec> pts;
        for (int k = 0; k <= c.n(); ++k)
          pts.push_back(M.exp(c.points[k], s * w[k]));
        return DiscreteCurve(spec, std::move(pts));
      };
      EdgeFrame plus = edge_frame(moved(eps));
      EdgeFrame minus = edge_frame(moved(-eps));
      double g = M.inner(c.points[0], w[0], w[0]);
      for (int k = 0; k < c.n(); ++k) {
        Vec qp = M.transport(plus.points[k], c.points[k], plus.q[k]);
        Vec qm = M.transport(minus.points[k], c.points[k], minus.q[k]);
        Vec dq = (qp - qm) / (2.0 * eps);
        g += M.inner(c.points[k], dq, dq) / c.n();
      }
      const double closed = metric_gn(c, w, w);
      CHECK(std::abs(g - closed) < 1e-4 * (1.0 + std::abs(closed)));
    }
  }
}

TEST_CASE("flat rigid motions preserve the metric") {
  Manifold M(ManifoldSpec::euclidean(2));
  std::mt19937_64 rng(53);
  const double th = 0.83;
  Mat rot(2, 2);
  rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  const Vec u = vec2(0.7, -1.3);
  for (int trial = 0; trial < 10; ++trial) {
    DiscreteCurve c = random_curve(M, 6, rng);
    CurveTangent w = random_curve_tangent(M, c, rng);
    std::vector<Vec> pts;
    CurveTangent rw;
    for (int k = 0; k <= c.n(); ++k) {
      pts.push_back(rot * c.points[k] + u);
      rw.vecs.push_back(rot * w[k]);
    }
    DiscreteCurve moved(c.manifold, std::move(pts));
    CHECK(std::abs(metric_gn(moved, rw, rw) - metric_gn(c, w, w)) < 1e-10);
  }
}

TEST_CASE("srv examples and roundtrip") {
  {
    SrvRep rep = srv(unit_segment());
    CHECK((rep.x0 - vec2(0, 0)).norm() == 0.0);
    CHECK((rep.qs[0] - vec2(1, 0)).norm() < 1e-15);
  }
  for (const auto& spec : kAllSpecs) {
    Manifold M(spec);
    std::mt19937_64 rng(59);
    DiscreteCurve c = random_curve(M, 9, rng);
    DiscreteCurve back = srv_inverse(srv(c));
    for (int k = 0; k <= c.n(); ++k)
      CHECK((back.points[k] - c.points[k]).norm() < 1e-9);
  }
  {
    // Scaling a flat curve by 4 scales q by 2.
    Manifold M(ManifoldSpec::euclidean(2));
    std::mt19937_64 rng(61);
    DiscreteCurve c = random_curve(M, 5, rng);
    std::vector<Vec> scaled;
    for (const Vec& p : c.points) scaled.push_back(4.0 * p);
    SrvRep a = srv(c);
    SrvRep b = srv(DiscreteCurve(c.manifold, std::move(scaled)));
    for (int k = 0; k < c.n(); ++k)
      CHECK((b.qs[k] - 2.0 * a.qs[k]).norm() < 1e-12);
  }
}

TEST_CASE("path_energy examples") {
  Manifold M(ManifoldSpec::euclidean(2));
  std::mt19937_64 rng(67);
  DiscreteCurve base = random_curve(M, 6, rng);
  {
    CurvePath p{base.manifold, {base, base, base}, {}, CurvePath::Kind::Raw};
    CHECK(path_energy(p) == doctest::Approx(0.0));
    CHECK(path_length(p) == doctest::Approx(0.0));
  }
  {
    // Rigid translation at unit speed: E = 1/2 exactly at any step count.
    const Vec u = vec2(1, 0);
    CurvePath p{base.manifold, {}, {}, CurvePath::Kind::Raw};
    const int m = 7;
    for (int j = 0; j <= m; ++j) {
      std::vector<Vec> pts;
      for (const Vec& x : base.points)
        pts.push_back(x + (static_cast<double>(j) / m) * u);
      p.curves.emplace_back(base.manifold, std::move(pts));
    }
    CHECK(path_energy(p) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(path_length(p) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("flat SRV-linear path has constant energy rate") {
  Manifold M(ManifoldSpec::euclidean(2));
  std::mt19937_64 rng(71);
  DiscreteCurve c0 = random_curve(M, 5, rng);
  DiscreteCurve c1 = random_curve(M, 5, rng);
  SrvRep r0 = srv(c0), r1 = srv(c1);
  auto at = [&](double s) {
    SrvRep rs = r0;
    rs.x0 = (1.0 - s) * r0.x0 + s * r1.x0;
    for (std::size_t k = 0; k < rs.qs.size(); ++k)
      rs.qs[k] = (1.0 - s) * r0.qs[k] + s * r1.qs[k];
    return srv_inverse(rs);
  };
  const int m = 200;
  CurvePath p{c0.manifold, {}, {}, CurvePath::Kind::Raw};
  for (int j = 0; j <= m; ++j) p.curves.push_back(at(static_cast<double>(j) / m));

  // Initial velocity from a pointwise finite difference of the family.
  const double eps = 1e-6;
  DiscreteCurve cp = at(eps);
  CurveTangent w0;
  for (int k = 0; k <= c0.n(); ++k)
    w0.vecs.push_back((cp.points[k] - c0.points[k]) / eps);
  const double rate = metric_gn(c0, w0, w0);

  CHECK(path_energy(p) == doctest::Approx(0.5 * rate).epsilon(2e-2));

  // With exact velocities attached the trapezoid rule nails the constant rate.
  CurvePath pv = p;
  for (int j = 0; j <= m; ++j) {
    const double s = static_cast<double>(j) / m;
    DiscreteCurve a = at(std::min(1.0, std::max(0.0, s - eps)));
    DiscreteCurve b = at(std::min(1.0, std::max(0.0, s + eps)));
    const double span = std::min(1.0, s + eps) - std::max(0.0, s - eps);
    CurveTangent w;
    for (int k = 0; k <= c0.n(); ++k)
      w.vecs.push_back((b.points[k] - a.points[k]) / span);
    pv.velocities.push_back(w);
  }
  CHECK(path_energy(pv) == doctest::Approx(0.5 * rate).epsilon(1e-5));
}

TEST_CASE("discretize examples") {
  {
    DiscreteCurve c = discretize(
        ManifoldSpec::euclidean(2), [](double t) { return Vec(vec2(t, 0)); },
        2);
    CHECK(c.n() == 2);
    CHECK((c.points[1] - vec2(0.5, 0)).norm() == 0.0);
  }
  CHECK_THROWS_AS(discretize(ManifoldSpec::euclidean(2),
                             [](double) { return Vec(vec2(1, 1)); }, 3),
                  DegenerateEdgeError);
  {
    DiscreteCurve c = discretize(
        ManifoldSpec::sphere2(),
        [](double t) {
          return Vec(vec3(std::sin(t * M_PI / 2), 0, std::cos(t * M_PI / 2)));
        },
        4);
    Manifold M(ManifoldSpec::sphere2());
    for (int k = 0; k < 4; ++k)
      CHECK(M.dist(c.points[k], c.points[k + 1]) ==
            doctest::Approx(M_PI / 8).epsilon(1e-12));
  }
}

TEST_CASE("curve construction errors") {
  CHECK_THROWS_AS(DiscreteCurve(ManifoldSpec::euclidean(2), {vec2(0, 0)}),
                  DomainError);
  CHECK_THROWS_AS(
      DiscreteCurve(ManifoldSpec::sphere2(), {vec3(0, 0, 1), vec3(1, 0, 0)},
                    true),
      DomainError);  // relaxed mode is flat-only
  // Relaxed flat curves admit coincident points; q = 0 on that edge.
  DiscreteCurve rc(ManifoldSpec::euclidean(2),
                   {vec2(0, 0), vec2(0, 0), vec2(1, 0)}, true);
  EdgeFrame F = edge_frame(rc);
  CHECK(F.degenerate(0));
  CHECK(F.q[0].norm() == 0.0);
  CHECK_THROWS_AS(metric_gn(rc, CurveTangent::zero(rc), CurveTangent::zero(rc)),
                  DegenerateEdgeError);
  // Roundtrip still works through the SRV chart.
  DiscreteCurve back = srv_inverse(srv(rc));
  for (int k = 0; k <= rc.n(); ++k)
    CHECK((back.points[k] - rc.points[k]).norm() < 1e-12);
}
