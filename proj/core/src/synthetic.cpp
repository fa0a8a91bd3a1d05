#include "geomatch/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geomatch/errors.hpp"
#include "geomatch/manifold.hpp"

namespace geomatch {

namespace {

constexpr double kPi = 3.14159265358979323846;

DiscreteCurve flat(int d, const std::function<Vec(double)>& f, int n) {
  return discretize(ManifoldSpec::euclidean(d), f, n);
}

double logistic(double t, double center, double rate) {
  return 1.0 / (1.0 + std::exp(-rate * (t - center)));
}

// Distance from the origin to the segment [a, b].
double segment_clearance(const Vec& a, const Vec& b) {
  const Vec d = b - a;
  const double dd = d.squaredNorm();
  const double t = dd == 0.0 ? 0.0 : std::clamp(-a.dot(d) / dd, 0.0, 1.0);
  return (a + t * d).norm();
}

}  // namespace

std::pair<DiscreteCurve, DiscreteCurve> circle_segment_pair(int n) {
  auto circle = [](double t) {
    const double th = 1.5 * kPi * t - 0.5 * kPi;
    return Vec{{0.5 * std::cos(th), 0.5 * std::sin(th)}};
  };
  auto segment = [](double t) {
    return Vec{{-0.5 + 1.4 * t, -0.3 + 0.9 * t}};
  };
  return {flat(2, circle, n), flat(2, segment, n)};
}

std::pair<DiscreteCurve, DiscreteCurve> translated_reparameterized_pair(
    int n, const Vec& u, double warp) {
  if (std::abs(warp) * kPi >= 1.0)
    throw DomainError("translated_reparameterized_pair: warp breaks monotonicity");
  auto base = [](double s) {
    return Vec{{s, 0.35 * std::sin(kPi * s) + 0.1 * std::sin(2.0 * kPi * s)}};
  };
  auto moved = [&](double t) {
    const double s = t + warp * std::sin(kPi * t);
    return Vec(base(s) + u);
  };
  return {flat(2, base, n), flat(2, moved, n)};
}

std::pair<DiscreteCurve, DiscreteCurve> turn_pair_3d(int n) {
  auto early = [](double t) {
    return Vec{{t, 0.6 * logistic(t, 0.35, 8.0), 0.25 * std::sin(kPi * t)}};
  };
  auto late = [](double t) {
    return Vec{{t, 0.6 * logistic(t, 0.65, 14.0), 0.25 * std::sin(kPi * t)}};
  };
  return {flat(3, early, n), flat(3, late, n)};
}

std::pair<DiscreteCurve, DiscreteCurve> h2_segment_pair(int n) {
  const ManifoldSpec H = ManifoldSpec::hyperbolic2();
  // Vertical geodesic from (0,1) to (0,3), length-parameterized as
  // y = 3^t; horizontal line y = 1, where arc length is plain x.
  auto vertical = [](double t) { return Vec{{0.0, std::pow(3.0, t)}}; };
  auto horizontal = [](double t) { return Vec{{-1.0 + 2.0 * t, 1.0}}; };
  return {discretize(H, vertical, n), discretize(H, horizontal, n)};
}

std::vector<DiscreteCurve> two_bundles(int perGroup, int n,
                                       std::uint64_t seed) {
  if (perGroup < 1) throw DomainError("two_bundles: perGroup < 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-0.03, 0.03);
  std::uniform_real_distribution<double> rip(0.0, 0.02);
  std::uniform_real_distribution<double> off(-0.02, 0.02);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * kPi);

  std::vector<DiscreteCurve> out;
  out.reserve(2 * perGroup);
  for (int g = 0; g < 2; ++g)
    for (int i = 0; i < perGroup; ++i) {
      const double ox = 3.0 * g + off(rng);
      const double oy = 1.5 * g + off(rng);
      const double a = 0.30 + amp(rng);
      const double r = rip(rng);
      const double p = ph(rng);
      out.push_back(flat(
          2,
          [=](double t) {
            return Vec{{ox + t, oy + a * std::sin(kPi * t) +
                                    r * std::sin(2.0 * kPi * t + p)}};
          },
          n));
    }
  return out;
}

std::pair<DiscreteCurve, DiscreteCurve> random_flat_pair(std::mt19937_64& rng,
                                                         int n, int d) {
  if (d < 2) throw DomainError("random_flat_pair: need d >= 2");
  std::uniform_real_distribution<double> coef(-0.35, 0.35);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> shift(-0.5, 0.5);

  auto draw = [&](bool offset) {
    std::vector<double> a(3 * d), p(3 * d), u(d, 0.0);
    for (double& x : a) x = coef(rng);
    for (double& x : p) x = phase(rng);
    if (offset)
      for (double& x : u) x = shift(rng);
    return flat(
        d,
        [=](double t) {
          Vec v = Vec::Zero(d);
          v[0] = t;
          for (int i = 0; i < d; ++i) {
            for (int h = 1; h <= 3; ++h)
              v[i] += a[3 * i + h - 1] / h * std::sin(kPi * h * t + p[3 * i + h - 1]);
            v[i] += u[i];
          }
          return v;
        },
        n);
  };

  const DiscreteCurve first = draw(false);
  const SrvRep q0 = srv(first);
  for (int attempt = 0; attempt < 200; ++attempt) {
    DiscreteCurve second = draw(true);
    const SrvRep q1 = srv(second);
    bool clear = true;
    for (int k = 0; k < n && clear; ++k)
      clear = segment_clearance(q0.qs[k], q1.qs[k]) >=
              0.4 * std::min(q0.qs[k].norm(), q1.qs[k].norm());
    if (clear) return {first, std::move(second)};
  }
  throw Error("random_flat_pair: no clear pair in 200 draws");
}

SmoothPathFamily translating_flat_sinusoids() {
  return {ManifoldSpec::euclidean(2),
          [](double t, double s) {
            return Vec{{t + 0.3 * s, 0.4 * std::sin(2.0 * kPi * t) + 0.5 * s}};
          },
          "translating-flat-sinusoids"};
}

SmoothPathFamily rotating_sphere_arcs() {
  return {ManifoldSpec::sphere2(),
          [](double t, double s) {
            const double psi = 0.4 + 0.8 * t;   // colatitude sweep
            const double th = 0.8 * s;          // rotation about the pole
            return Vec{{std::sin(psi) * std::cos(th),
                        std::sin(psi) * std::sin(th), std::cos(psi)}};
          },
          "rotating-sphere-arcs"};
}

SmoothPathFamily sliding_h2_arcs() {
  return {ManifoldSpec::hyperbolic2(),
          [](double t, double s) {
            return Vec{{0.6 * t + 0.8 * s,
                        1.0 + 0.4 * t + 0.25 * std::sin(kPi * t)}};
          },
          "sliding-h2-arcs"};
}

EnergyStudy energy_convergence_study(const SmoothPathFamily& family,
                                     const std::vector<int>& nList, int m) {
  if (nList.empty()) throw DomainError("energy_convergence_study: empty nList");
  if (m < 1) throw DomainError("energy_convergence_study: m < 1");
  for (std::size_t i = 0; i < nList.size(); ++i)
    if (nList[i] < 1 || (i > 0 && nList[i] <= nList[i - 1]))
      throw DomainError("energy_convergence_study: nList not ascending");

  auto energy_at = [&](int n) {
    CurvePath p{family.manifold, {}, {}, CurvePath::Kind::Raw};
    p.curves.reserve(m + 1);
    for (int j = 0; j <= m; ++j) {
      const double s = static_cast<double>(j) / m;
      p.curves.push_back(discretize(
          family.manifold, [&](double t) { return family.point(t, s); }, n));
    }
    return path_energy(p);
  };

  EnergyStudy out;
  out.m = m;
  out.refN = 4 * nList.back();
  out.refEnergy = energy_at(out.refN);
  for (int n : nList) {
    const double e = energy_at(n);
    out.rows.push_back({n, e, std::abs(e - out.refEnergy)});
  }

  // Least-squares slope of log error against log n over the usable rows.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (const EnergyRow& r : out.rows) {
    if (r.error <= 0.0) continue;
    const double x = std::log(static_cast<double>(r.n));
    const double y = std::log(r.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2) out.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return out;
}

}  // namespace geomatch
