#include "geomatch/horizontal.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "geomatch/errors.hpp"
#include "geomatch/spline.hpp"
#include "geomatch/tridiagonal.hpp"

namespace geomatch {

namespace {

// Velocity sample at s = j/m: stored when the path carries velocities,
// otherwise the interval difference anchored at sample j (backward at j = m).
CurveTangent velocity_at(const CurvePath& p, int j) {
  if (!p.velocities.empty()) return p.velocities[j];
  const int m = p.m();
  const double scale = static_cast<double>(m);
  CurveTangent w;
  if (j < m) {
    w = pointwise_log(p.curves[j], p.curves[j + 1]);
    for (auto& v : w.vecs) v *= scale;
  } else {
    w = pointwise_log(p.curves[m], p.curves[m - 1]);
    for (auto& v : w.vecs) v *= -scale;
  }
  return w;
}

}  // namespace

VerticalDecomposition decompose_tangent(const EdgeFrame& frame, const CurveTangent& w) {
  const int n = frame.n();
  if (w.size() != n + 1)
    throw DomainError("decompose_tangent: tangent has " + std::to_string(w.size()) +
                      " slots, curve has " + std::to_string(n + 1) + " points");

  for (int k = 0; k < n; ++k)
    if (frame.degenerate(k))
      throw DegenerateEdgeError("decompose_tangent: degenerate edge " +
                                std::to_string(k));

  VerticalDecomposition dec;
  dec.m.assign(n + 1, 0.0);
  if (n >= 2) {
    const CurveTangent dW = d_tau(frame, w);
    std::vector<double> lower(n - 1, 0.0), diag(n - 1), upper(n - 1, 0.0), rhs(n - 1);
    for (int k = 1; k < n; ++k) {
      const double rho = frame.normTau[k] / frame.normTau[k - 1];
      const double lam = frame.lambda[k - 1];
      const double binv = 1.0 / frame.b[k - 1];
      const Vec vkPar = frame.bwd(k - 1, frame.v[k]);
      diag[k - 1] = -1.0 - 4.0 * rho * (binv * binv + lam * lam * (0.25 - binv * binv));
      if (k + 1 < n) upper[k - 1] = frame.lambda[k];
      if (k > 1) lower[k - 1] = rho * lam;
      rhs[k - 1] = frame.inner(k, dW[k], frame.v[k]) -
                   4.0 * rho *
                       (binv * frame.inner(k - 1, dW[k - 1], vkPar) +
                        (0.25 - binv) * lam * frame.inner(k - 1, dW[k - 1], frame.v[k - 1]));
    }
    const std::vector<double> sol = solve_tridiagonal(lower, diag, upper, rhs);
    std::copy(sol.begin(), sol.end(), dec.m.begin() + 1);
  }

  dec.wVer.vecs.reserve(n + 1);
  for (int k = 0; k < n; ++k) dec.wVer.vecs.push_back(dec.m[k] * frame.v[k]);
  dec.wVer.vecs.push_back(Vec::Zero(w[n].size()));
  dec.wHor.vecs.reserve(n + 1);
  for (int k = 0; k <= n; ++k) dec.wHor.vecs.push_back(w[k] - dec.wVer[k]);
  return dec;
}

VerticalDecomposition decompose_tangent(const DiscreteCurve& alpha, const CurveTangent& w) {
  return decompose_tangent(edge_frame(alpha), w);
}

HorizontalPath horizontal_part_of_path(const CurvePath& p, const HorizontalOptions& opt) {
  const int m = p.m();
  if (m < 1) throw DomainError("horizontal_part_of_path: path needs at least one step");
  const int n = p.n();

  HorizontalPath res;
  res.path.manifold = p.manifold;
  res.path.kind = CurvePath::Kind::Horizontal;
  res.path.curves.reserve(m + 1);
  res.path.curves.push_back(p.curves[0]);
  if (n < 2) {
    // No interior point to slide: the path is already horizontal.
    for (int j = 1; j <= m; ++j) res.path.curves.push_back(p.curves[j]);
    res.endParams = {0.0, 1.0};
    return res;
  }

  const int N = (opt.upsample > 0 ? opt.upsample : 10) * n;
  const double minStep = 1e-9;

  std::vector<double> phi(n + 1);
  for (int k = 0; k <= n; ++k) phi[k] = static_cast<double>(k) / n;
  std::vector<double> psi(N + 1);
  std::vector<double> params(n + 1, 0.0);
  double clampedMass = 0.0;

  for (int j = 0; j < m; ++j) {
    const EdgeFrame frame = edge_frame(p.curves[j]);
    const VerticalDecomposition dec = decompose_tangent(frame, velocity_at(p, j));

    // Upwind Euler step of phi_s = m_k / (n |tau_k|) * dphi, switching the
    // one-sided difference on the sign of m_k. Endpoints stay pinned.
    std::vector<double> next(phi);
    for (int k = 1; k < n; ++k) {
      const double mk = dec.m[k];
      const double dphi =
          mk >= 0.0 ? n * (phi[k + 1] - phi[k]) : n * (phi[k] - phi[k - 1]);
      next[k] = phi[k] + mk / (n * frame.normTau[k]) * dphi / m;
    }

    // Monotonicity repair: keep at least minStep per cell, fail when the
    // total correction stops being negligible.
    for (int k = 1; k < n; ++k) {
      const double lo = next[k - 1] + minStep;
      const double hi = 1.0 - (n - k) * minStep;
      const double repaired = std::clamp(next[k], lo, hi);
      clampedMass += std::abs(repaired - next[k]);
      next[k] = repaired;
    }
    if (clampedMass > 0.01)
      throw MonotonicityError(
          "horizontal_part_of_path: reparameterization lost monotonicity at step " +
          std::to_string(j) + "; increase the number of path steps");
    phi = std::move(next);

    // Read the next curve off its shape spline where phi crosses the grid:
    // psi interpolates phi linearly on the fine grid l/N, a forward scan
    // brackets each crossing psi(u) = k/n, and u is recovered by inverting
    // psi inside the bracketed cell. Snapping to the fine sample itself
    // would quantize the output curves and leave the path a spurious
    // vertical length that shrinks with neither m nor N.
    const int U = N / n;  // fine samples per cell; l = k U lands on phi[k] exactly
    for (int l = 0; l <= N; ++l) {
      const int cell = std::min(l / U, n - 1);
      const double u = static_cast<double>(l - cell * U) / U;
      psi[l] = (1.0 - u) * phi[cell] + u * phi[cell + 1];
    }
    int l = 0;
    for (int k = 1; k < n; ++k) {
      const double target = static_cast<double>(k) / n;
      // The scan tolerates integration roundoff so that samples sitting an
      // ulp below a grid value still count as crossings; the clamp below
      // then returns the sample itself.
      while (l < N && psi[l] < target - 1e-12) ++l;
      if (l == 0) {
        params[k] = 0.0;
        continue;
      }
      const double ratio =
          std::clamp((target - psi[l - 1]) / (psi[l] - psi[l - 1]), 0.0, 1.0);
      params[k] = (static_cast<double>(l - 1) + ratio) / N;
    }
    params[0] = 0.0;
    params[n] = 1.0;

    const ShapeSpline X = shape_spline(p.curves[j + 1]);
    std::vector<Vec> pts(n + 1);
    for (int k = 0; k <= n; ++k) pts[k] = X(params[k]);
    res.path.curves.emplace_back(p.manifold, std::move(pts), p.curves[j + 1].relaxedEdges);
  }

  res.endParams = params;
  return res;
}

std::vector<double> verticality_ratio(const CurvePath& p) {
  const int m = p.m();
  std::vector<double> out(m + 1);
  for (int j = 0; j <= m; ++j) {
    const EdgeFrame frame = edge_frame(p.curves[j]);
    const VerticalDecomposition dec = decompose_tangent(frame, velocity_at(p, j));
    const double nv = std::sqrt(std::max(0.0, metric_gn(frame, dec.wVer, dec.wVer)));
    const double nh = std::sqrt(std::max(0.0, metric_gn(frame, dec.wHor, dec.wHor)));
    if (nv == 0.0 && nh == 0.0)
      out[j] = 0.0;
    else if (nh <= 1e-8 * nv)
      out[j] = std::numeric_limits<double>::infinity();
    else
      out[j] = nv / nh;
  }
  return out;
}

}  // namespace geomatch
