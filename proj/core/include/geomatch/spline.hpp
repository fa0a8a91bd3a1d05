#pragma once

#include <vector>

#include "geomatch/curve.hpp"

namespace geomatch {

// Natural cubic interpolant through curve points, built per coordinate in
// the model chart. Evaluations are projected back onto the manifold: sphere
// values are renormalized, half-plane values have y clamped positive. Knots
// are strictly increasing with knots.front() = 0 and knots.back() = 1, and
// evaluation clamps its argument to [0, 1].
class ShapeSpline {
 public:
  ShapeSpline(ManifoldSpec manifold, std::vector<double> knots, std::vector<Vec> points);

  Vec operator()(double t) const;
  DiscreteCurve resample(const std::vector<double>& ts, bool relaxedEdges = false) const;

  const ManifoldSpec& manifold() const { return manifold_; }
  const std::vector<double>& knots() const { return knots_; }

 private:
  ManifoldSpec manifold_;
  std::vector<double> knots_;
  std::vector<Vec> points_;
  std::vector<Vec> second_;  // second derivatives at knots, natural ends
};

// Interpolant with index-uniform knots k/n. Grid queries l/N with N a
// multiple of n then land exactly on curve samples, which the matching
// pipeline relies on when it maps reparameterization brackets back to
// points.
ShapeSpline shape_spline(const DiscreteCurve& alpha);

// Interpolant with knots proportional to cumulative edge length: a
// sampling-insensitive shape parameter for resampling utilities.
ShapeSpline arc_length_spline(const DiscreteCurve& alpha);

}  // namespace geomatch
