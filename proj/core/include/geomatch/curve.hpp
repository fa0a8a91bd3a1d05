#pragma once

#include <functional>
#include <vector>

#include "geomatch/manifold.hpp"

namespace geomatch {

// Discrete curve: n+1 points of one constant-curvature space, n >= 1 edges.
// Strict mode rejects coincident consecutive points; relaxed mode (flat
// spaces only) admits them with q_k = 0.
struct DiscreteCurve {
  ManifoldSpec manifold;
  std::vector<Vec> points;
  bool relaxedEdges = false;

  DiscreteCurve(ManifoldSpec m, std::vector<Vec> pts, bool relaxed = false);

  int n() const { return static_cast<int>(points.size()) - 1; }
};

// Tangent vector of the product manifold: one ambient vector per curve point.
// Operations taking (curve, tangent) pairs check the lengths match.
struct CurveTangent {
  std::vector<Vec> vecs;

  CurveTangent() = default;
  explicit CurveTangent(std::vector<Vec> v) : vecs(std::move(v)) {}
  static CurveTangent zero(const DiscreteCurve& base);

  int size() const { return static_cast<int>(vecs.size()); }
  Vec& operator[](int k) { return vecs[k]; }
  const Vec& operator[](int k) const { return vecs[k]; }
};

// Per-edge cache: logs, SRV vectors, geodesic comparison coefficients and the
// transports between adjacent points. Degenerate edges (relaxed mode) carry
// tau = v = q = 0, a = b = 1, e = 0.
struct EdgeFrame {
  ManifoldSpec manifold;
  std::vector<Vec> points;      // copied base points, n+1
  std::vector<Vec> tau;         // n, log_{x_k} x_{k+1}
  std::vector<double> normTau;  // n, metric norm of tau_k
  std::vector<Vec> v;           // n, unit edge direction
  std::vector<Vec> q;           // n, sqrt(n) tau_k / sqrt(|tau_k|)
  std::vector<double> normQ;    // n, |q_k| = sqrt(n |tau_k|)
  std::vector<double> a, b, e;  // n, comparison coefficients at t = 1
  std::vector<double> lambda;   // n-1, <v_{k+1} transported to x_k, v_k>

  int n() const { return static_cast<int>(tau.size()); }
  bool degenerate(int k) const { return normTau[k] == 0.0; }

  const Manifold& space() const { return space_; }
  // Parallel transport along edge k: fwd x_k -> x_{k+1}, bwd x_{k+1} -> x_k.
  Vec fwd(int k, const Vec& w) const;
  Vec bwd(int k, const Vec& w) const;
  double inner(int k, const Vec& u, const Vec& w) const;  // metric at x_k
  // Tangential part of w at x_k with respect to v_k.
  Vec tangential(int k, const Vec& w) const;

 private:
  friend EdgeFrame edge_frame(const DiscreteCurve&);
  Manifold space_;
};

EdgeFrame edge_frame(const DiscreteCurve& alpha);

// Discrete covariant difference
//   (D_tau w)_k = (w_{k+1}^par - w_k)^T + b_k^{-1} (w_{k+1}^par - a_k w_k)^N
// for k < n; the last slot is a zero pad. Flat case reduces to w_{k+1} - w_k.
CurveTangent d_tau(const EdgeFrame& frame, const CurveTangent& w);
CurveTangent d_tau(const DiscreteCurve& alpha, const CurveTangent& w);

// Elastic metric of the discrete curve manifold,
//   G(w,z) = <w_0,z_0> + sum_k (<Dw_k^N,Dz_k^N> + 1/4 <Dw_k^T,Dz_k^T>)/|tau_k|.
double metric_gn(const EdgeFrame& frame, const CurveTangent& w,
                 const CurveTangent& z);
double metric_gn(const DiscreteCurve& alpha, const CurveTangent& w,
                 const CurveTangent& z);

// SRV representation: start point plus one scaled velocity per edge.
// Reconstruction is sequential: tau_k = q_k |q_k| / n, x_{k+1} = exp(x_k, tau_k).
struct SrvRep {
  ManifoldSpec manifold;
  Vec x0;
  std::vector<Vec> qs;  // qs[k] tangent at the reconstructed x_k
  bool relaxedEdges = false;
};

SrvRep srv(const DiscreteCurve& alpha);
DiscreteCurve srv_inverse(const SrvRep& rep);

// Path of discrete curves sampled at s = j/m. Velocities, when present, hold
// the exact path derivative at each sample and improve quadrature.
struct CurvePath {
  enum class Kind { Geodesic, Horizontal, Raw };

  ManifoldSpec manifold;
  std::vector<DiscreteCurve> curves;       // m+1
  std::vector<CurveTangent> velocities;    // empty or m+1
  Kind kind = Kind::Raw;

  int m() const { return static_cast<int>(curves.size()) - 1; }
  int n() const { return curves.front().n(); }
};

// Energy E = 1/2 int (|x_0'|^2 + (1/n) sum |nabla_s q_k|^2) ds. With stored
// velocities: trapezoid rule on the exact integrand. Without: interval
// differences w_j = m log(curve_j -> curve_{j+1}) as midpoint velocities,
// metric anchored at curve_j.
double path_energy(const CurvePath& p);

// Length int ||alpha'(s)|| ds by the same interval-difference scheme.
double path_length(const CurvePath& p);

// Derivative of q_k under a curve variation with derivative w, given
// dW = d_tau(frame, w):
//   nabla_w q_k = sqrt(n/|tau_k|) (dW_k - 1/2 dW_k^T).
// The metric satisfies G(w,w) = <w_0,w_0> + (1/n) sum |nabla_w q_k|^2.
Vec srv_variation(const EdgeFrame& frame, const CurveTangent& dW, int k);

// Pointwise sampler discretization: points[k] = sampler(k/n).
DiscreteCurve discretize(ManifoldSpec m,
                         const std::function<Vec(double)>& sampler, int n,
                         bool relaxed = false);

// Field of pointwise logs w_k = log_{a_k} b_k. Curves must share manifold
// and point count.
CurveTangent pointwise_log(const DiscreteCurve& a, const DiscreteCurve& b);

// Pointwise L2 norm sqrt(sum_k |w_k|^2) with metric inners at the curve
// points (the shooting gap norm, not the elastic metric).
double l2_norm(const DiscreteCurve& base, const CurveTangent& w);

}  // namespace geomatch
