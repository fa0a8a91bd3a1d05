#include "geomatch/spline.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "geomatch/errors.hpp"
#include "geomatch/tridiagonal.hpp"

namespace geomatch {

namespace {

// Sphere points are renormalized; half-plane points keep y > 0 even where a
// cubic undershoots between valid knots. Flat points pass through.
Vec to_manifold(const ManifoldSpec& spec, Vec p) {
  switch (spec.kind) {
    case ManifoldKind::Sphere2: {
      const double r = p.norm();
      if (r == 0.0) throw DomainError("spline produced a zero sphere vector");
      return p / r;
    }
    case ManifoldKind::HyperbolicPlane:
      p[1] = std::max(p[1], 1e-12);
      return p;
    case ManifoldKind::Euclidean:
      return p;
  }
  return p;
}

}  // namespace

ShapeSpline::ShapeSpline(ManifoldSpec manifold, std::vector<double> knots,
                         std::vector<Vec> points)
    : manifold_(std::move(manifold)), knots_(std::move(knots)), points_(std::move(points)) {
  const std::size_t n1 = points_.size();
  if (n1 < 2) throw DomainError("ShapeSpline: needs at least two points");
  if (knots_.size() != n1) throw DomainError("ShapeSpline: knot count does not match points");
  if (knots_.front() != 0.0 || knots_.back() != 1.0)
    throw DomainError("ShapeSpline: knots must span [0, 1]");
  for (std::size_t k = 0; k + 1 < n1; ++k)
    if (!(knots_[k] < knots_[k + 1]))
      throw DomainError("ShapeSpline: knots must be strictly increasing (knot " +
                        std::to_string(k + 1) + ")");
  for (const Vec& p : points_)
    if (p.size() != points_.front().size())
      throw DomainError("ShapeSpline: points have mixed dimensions");

  // Natural cubic spline: interior second derivatives solve a tridiagonal
  // system per coordinate; ends are zero.
  second_.assign(n1, Vec::Zero(points_.front().size()));
  if (n1 == 2) return;
  const std::size_t m = n1 - 2;
  std::vector<double> lower(m), diag(m), upper(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double hl = knots_[i + 1] - knots_[i];
    const double hr = knots_[i + 2] - knots_[i + 1];
    lower[i] = hl / 6.0;
    diag[i] = (hl + hr) / 3.0;
    upper[i] = hr / 6.0;
  }
  const int dim = static_cast<int>(points_.front().size());
  for (int c = 0; c < dim; ++c) {
    std::vector<double> rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double hl = knots_[i + 1] - knots_[i];
      const double hr = knots_[i + 2] - knots_[i + 1];
      rhs[i] = (points_[i + 2][c] - points_[i + 1][c]) / hr -
               (points_[i + 1][c] - points_[i][c]) / hl;
    }
    const std::vector<double> sec = solve_tridiagonal(lower, diag, upper, rhs);
    for (std::size_t i = 0; i < m; ++i) second_[i + 1][c] = sec[i];
  }
}

Vec ShapeSpline::operator()(double t) const {
  t = std::clamp(t, 0.0, 1.0);
  const std::size_t hi =
      std::upper_bound(knots_.begin() + 1, knots_.end() - 1, t) - knots_.begin();
  const std::size_t lo = hi - 1;
  const double h = knots_[hi] - knots_[lo];
  const double A = (knots_[hi] - t) / h;
  const double B = (t - knots_[lo]) / h;
  Vec p = A * points_[lo] + B * points_[hi] +
          ((A * A * A - A) * second_[lo] + (B * B * B - B) * second_[hi]) * (h * h / 6.0);
  return to_manifold(manifold_, std::move(p));
}

DiscreteCurve ShapeSpline::resample(const std::vector<double>& ts, bool relaxedEdges) const {
  std::vector<Vec> pts;
  pts.reserve(ts.size());
  for (double t : ts) pts.push_back((*this)(t));
  return DiscreteCurve(manifold_, std::move(pts), relaxedEdges);
}

ShapeSpline shape_spline(const DiscreteCurve& alpha) {
  const int n = alpha.n();
  std::vector<double> knots(n + 1);
  for (int k = 0; k <= n; ++k) knots[k] = static_cast<double>(k) / n;
  return ShapeSpline(alpha.manifold, std::move(knots), alpha.points);
}

ShapeSpline arc_length_spline(const DiscreteCurve& alpha) {
  const Manifold M(alpha.manifold);
  const int n = alpha.n();
  std::vector<double> knots(n + 1, 0.0);
  for (int k = 0; k < n; ++k)
    knots[k + 1] = knots[k] + M.dist(alpha.points[k], alpha.points[k + 1]);
  const double total = knots[n];
  if (total == 0.0) throw DomainError("arc_length_spline: curve has zero length");
  for (int k = 1; k < n; ++k) knots[k] /= total;
  knots[n] = 1.0;
  for (int k = 0; k < n; ++k)
    if (!(knots[k] < knots[k + 1]))
      throw DegenerateEdgeError("arc_length_spline: zero-length edge " + std::to_string(k));
  return ShapeSpline(alpha.manifold, std::move(knots), alpha.points);
}

}  // namespace geomatch
