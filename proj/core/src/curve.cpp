#include "geomatch/curve.hpp"

#include <cmath>
#include <string>

namespace geomatch {
namespace {

constexpr double kDegenerateTol = 1e-14;

void check_based(const DiscreteCurve& alpha, const CurveTangent& w,
                 const char* who) {
  if (w.size() != alpha.n() + 1)
    throw DomainError(std::string(who) + ": tangent has " +
                      std::to_string(w.size()) + " entries for a curve of " +
                      std::to_string(alpha.n() + 1) + " points");
}

}  // namespace

DiscreteCurve::DiscreteCurve(ManifoldSpec m, std::vector<Vec> pts,
                             bool relaxed)
    : manifold(m), points(std::move(pts)), relaxedEdges(relaxed) {
  if (points.size() < 2)
    throw DomainError("discrete curve needs at least 2 points");
  const Manifold M(manifold);
  if (relaxedEdges && !M.flat())
    throw DomainError("relaxed edges are only defined on flat spaces");
  for (auto& p : points) {
    p = M.project_point(p);
    M.validate_point(p);
  }
  if (!relaxedEdges) {
    for (std::size_t k = 0; k + 1 < points.size(); ++k)
      if (M.dist(points[k], points[k + 1]) < kDegenerateTol)
        throw DegenerateEdgeError("curve edge " + std::to_string(k) +
                                  " is degenerate");
  }
}

CurveTangent CurveTangent::zero(const DiscreteCurve& base) {
  CurveTangent w;
  w.vecs.assign(base.points.size(),
                Vec::Zero(base.points.front().size()));
  return w;
}

Vec EdgeFrame::fwd(int k, const Vec& w) const {
  return space_.transport(points[k], points[k + 1], w);
}

Vec EdgeFrame::bwd(int k, const Vec& w) const {
  return space_.transport(points[k + 1], points[k], w);
}

double EdgeFrame::inner(int k, const Vec& u, const Vec& w) const {
  return space_.inner(points[k], u, w);
}

Vec EdgeFrame::tangential(int k, const Vec& w) const {
  if (degenerate(k)) return Vec::Zero(w.size());
  return inner(k, w, v[k]) * v[k];
}

EdgeFrame edge_frame(const DiscreteCurve& alpha) {
  const int n = alpha.n();
  EdgeFrame F;
  F.manifold = alpha.manifold;
  F.points = alpha.points;
  F.space_ = Manifold(alpha.manifold);
  F.tau.resize(n);
  F.normTau.resize(n);
  F.v.resize(n);
  F.q.resize(n);
  F.normQ.resize(n);
  F.a.resize(n);
  F.b.resize(n);
  F.e.resize(n);
  const Manifold& M = F.space_;
  const double dn = static_cast<double>(n);
  for (int k = 0; k < n; ++k) {
    F.tau[k] = M.log(alpha.points[k], alpha.points[k + 1]);
    const double nt = M.norm(alpha.points[k], F.tau[k]);
    if (nt < kDegenerateTol) {
      if (!alpha.relaxedEdges)
        throw DegenerateEdgeError("curve edge " + std::to_string(k) +
                                  " is degenerate");
      F.tau[k].setZero();
      F.normTau[k] = 0.0;
      F.v[k] = Vec::Zero(F.tau[k].size());
      F.q[k] = Vec::Zero(F.tau[k].size());
      F.normQ[k] = 0.0;
      F.a[k] = 1.0;
      F.b[k] = 1.0;
      F.e[k] = 0.0;
      continue;
    }
    F.normTau[k] = nt;
    F.v[k] = F.tau[k] / nt;
    F.q[k] = std::sqrt(dn / nt) * F.tau[k];
    F.normQ[k] = std::sqrt(dn * nt);
    const auto c = jacobi_coefficients(nt, alpha.manifold.curvature(), 1.0);
    F.a[k] = c.a;
    F.b[k] = c.b;
    F.e[k] = c.e;
  }
  F.lambda.assign(std::max(n - 1, 0), 0.0);
  for (int k = 0; k + 1 < n; ++k) {
    if (F.degenerate(k) || F.degenerate(k + 1)) continue;
    F.lambda[k] = F.inner(k, F.bwd(k, F.v[k + 1]), F.v[k]);
  }
  return F;
}

CurveTangent d_tau(const EdgeFrame& frame, const CurveTangent& w) {
  const int n = frame.n();
  if (w.size() != n + 1)
    throw DomainError("d_tau: tangent length does not match the curve");
  CurveTangent out;
  out.vecs.resize(n + 1);
  for (int k = 0; k < n; ++k) {
    if (frame.degenerate(k))
      throw DegenerateEdgeError("d_tau over degenerate edge " +
                                std::to_string(k));
    const Vec wp = frame.bwd(k, w[k + 1]);
    const Vec diffT = frame.tangential(k, wp - w[k]);
    const Vec scaled = wp - frame.a[k] * w[k];
    out[k] = diffT + (scaled - frame.tangential(k, scaled)) / frame.b[k];
  }
  out[n] = Vec::Zero(w[n].size());
  return out;
}

CurveTangent d_tau(const DiscreteCurve& alpha, const CurveTangent& w) {
  check_based(alpha, w, "d_tau");
  return d_tau(edge_frame(alpha), w);
}

double metric_gn(const EdgeFrame& frame, const CurveTangent& w,
                 const CurveTangent& z) {
  const int n = frame.n();
  if (w.size() != n + 1 || z.size() != n + 1)
    throw DomainError("metric_gn: tangent length does not match the curve");
  const CurveTangent dw = d_tau(frame, w);
  const CurveTangent dz = (&w == &z) ? dw : d_tau(frame, z);
  double g = frame.inner(0, w[0], z[0]);
  for (int k = 0; k < n; ++k) {
    const double wT = frame.inner(k, dw[k], frame.v[k]);
    const double zT = frame.inner(k, dz[k], frame.v[k]);
    const double full = frame.inner(k, dw[k], dz[k]);
    g += ((full - wT * zT) + 0.25 * wT * zT) / frame.normTau[k];
  }
  return g;
}

double metric_gn(const DiscreteCurve& alpha, const CurveTangent& w,
                 const CurveTangent& z) {
  check_based(alpha, w, "metric_gn");
  check_based(alpha, z, "metric_gn");
  return metric_gn(edge_frame(alpha), w, z);
}

SrvRep srv(const DiscreteCurve& alpha) {
  const EdgeFrame F = edge_frame(alpha);
  SrvRep rep;
  rep.manifold = alpha.manifold;
  rep.x0 = alpha.points.front();
  rep.qs = F.q;
  rep.relaxedEdges = alpha.relaxedEdges;
  return rep;
}

DiscreteCurve srv_inverse(const SrvRep& rep) {
  const Manifold M(rep.manifold);
  const double dn = static_cast<double>(rep.qs.size());
  std::vector<Vec> pts;
  pts.reserve(rep.qs.size() + 1);
  pts.push_back(rep.x0);
  for (const Vec& q : rep.qs) {
    const Vec& x = pts.back();
    const double nq = M.norm(x, q);
    pts.push_back(M.exp(x, q * (nq / dn)));
  }
  return DiscreteCurve(rep.manifold, std::move(pts), rep.relaxedEdges);
}

Vec srv_variation(const EdgeFrame& frame, const CurveTangent& dW, int k) {
  if (frame.degenerate(k))
    throw DegenerateEdgeError("srv_variation over degenerate edge " +
                              std::to_string(k));
  const double scale = std::sqrt(frame.n() / frame.normTau[k]);
  return scale * (dW[k] - 0.5 * frame.tangential(k, dW[k]));
}

namespace {

// Integrand |x_0'|^2 + (1/n) sum |nabla_w q_k|^2 = G(w, w) at one sample.
double energy_integrand(const EdgeFrame& frame, const CurveTangent& w) {
  const CurveTangent dw = d_tau(frame, w);
  double val = frame.inner(0, w[0], w[0]);
  const double dn = frame.n();
  for (int k = 0; k < frame.n(); ++k) {
    const Vec dq = srv_variation(frame, dw, k);
    val += frame.inner(k, dq, dq) / dn;
  }
  return val;
}

CurveTangent interval_velocity(const Manifold& M, const DiscreteCurve& a,
                               const DiscreteCurve& b, double scale) {
  CurveTangent w;
  w.vecs.resize(a.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i)
    w.vecs[i] = scale * M.log(a.points[i], b.points[i]);
  return w;
}

}  // namespace

double path_energy(const CurvePath& p) {
  if (p.curves.size() < 2) throw DomainError("path_energy needs >= 2 samples");
  const int m = p.m();
  const Manifold M(p.manifold);
  double total = 0.0;
  if (!p.velocities.empty()) {
    if (p.velocities.size() != p.curves.size())
      throw DomainError("path has velocities for some samples only");
    // Trapezoid on the exact integrand.
    for (int j = 0; j <= m; ++j) {
      const double wgt = (j == 0 || j == m) ? 0.5 : 1.0;
      total += wgt * energy_integrand(edge_frame(p.curves[j]),
                                      p.velocities[j]);
    }
    return total / (2.0 * m);
  }
  // Interval differences approximate the midpoint velocity.
  for (int j = 0; j < m; ++j) {
    const CurveTangent w = interval_velocity(M, p.curves[j], p.curves[j + 1],
                                             static_cast<double>(m));
    total += energy_integrand(edge_frame(p.curves[j]), w);
  }
  return total / (2.0 * m);
}

double path_length(const CurvePath& p) {
  if (p.curves.size() < 2) throw DomainError("path_length needs >= 2 samples");
  const int m = p.m();
  const Manifold M(p.manifold);
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    const CurveTangent w = interval_velocity(M, p.curves[j], p.curves[j + 1],
                                             static_cast<double>(m));
    const double g = metric_gn(p.curves[j], w, w);
    total += std::sqrt(std::max(0.0, g)) / m;
  }
  return total;
}

DiscreteCurve discretize(ManifoldSpec m,
                         const std::function<Vec(double)>& sampler, int n,
                         bool relaxed) {
  if (n < 1) throw DomainError("discretize needs n >= 1");
  std::vector<Vec> pts;
  pts.reserve(n + 1);
  for (int k = 0; k <= n; ++k)
    pts.push_back(sampler(static_cast<double>(k) / n));
  return DiscreteCurve(m, std::move(pts), relaxed);
}

CurveTangent pointwise_log(const DiscreteCurve& a, const DiscreteCurve& b) {
  if (a.manifold != b.manifold)
    throw DomainError("pointwise_log: manifolds differ");
  if (a.points.size() != b.points.size())
    throw DomainError("pointwise_log: point counts differ");
  const Manifold M(a.manifold);
  std::vector<Vec> w;
  w.reserve(a.points.size());
  for (std::size_t k = 0; k < a.points.size(); ++k)
    w.push_back(M.log(a.points[k], b.points[k]));
  return CurveTangent(std::move(w));
}

double l2_norm(const DiscreteCurve& base, const CurveTangent& w) {
  if (w.size() != static_cast<int>(base.points.size()))
    throw DomainError("l2_norm: field length mismatch");
  const Manifold M(base.manifold);
  double s = 0.0;
  for (int k = 0; k < w.size(); ++k)
    s += M.inner(base.points[k], w[k], w[k]);
  return std::sqrt(s);
}

}  // namespace geomatch
