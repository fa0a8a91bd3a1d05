#pragma once

#include <vector>

#include "geomatch/curve.hpp"

namespace geomatch {

// Orthogonal split of a curve tangent under the elastic metric,
// w = wVer + wHor. The vertical part wVer = m v points along the edge
// directions (a reparameterizing motion, m_0 = m_n = 0); wHor is orthogonal
// to every such field.
struct VerticalDecomposition {
  std::vector<double> m;  // n+1, m[0] = m[n] = 0
  CurveTangent wVer;
  CurveTangent wHor;
};

// Solves the horizontality recurrence
//   A_k m_{k+1} + B_k m_k + C_k m_{k-1} = D_k,  k = 1..n-1,
//   A_k = lambda_k,
//   B_k = -1 - 4 rho_k (b_{k-1}^{-2} + lambda_{k-1}^2 (1/4 - b_{k-1}^{-2})),
//   C_k = rho_k lambda_{k-1},          rho_k = |tau_k|/|tau_{k-1}|,
// where D_k applies the same bracket to w in place of m v. The system is
// close to diagonally dominant; the pivoting tridiagonal solver covers the
// long-edge hyperbolic cases that are not. Curves with n = 1 have no
// vertical directions and every tangent is horizontal.
VerticalDecomposition decompose_tangent(const EdgeFrame& frame, const CurveTangent& w);
VerticalDecomposition decompose_tangent(const DiscreteCurve& alpha, const CurveTangent& w);

struct HorizontalOptions {
  int upsample = 0;  // fine samples per edge; 0 picks 10
};

// Result of straightening a path: the horizontal path plus the parameters
// u_k on the input end curve at which the output end curve samples it,
// out.curves[m][k] = spline(p.curves[m])(u_k). u is strictly increasing with
// u_0 = 0, u_n = 1.
struct HorizontalPath {
  CurvePath path;
  std::vector<double> endParams;
};

// Cancels the vertical part of the path velocity by reparameterization: per
// s-step solve the horizontality system on the current curve, advance the
// cumulative reparameterization phi by upwind differences switched on the
// sign of m_k, then read the next curve off its shape spline where phi
// crosses the grid {k/n}. The start curve is returned unchanged and every
// output curve lies on the interpolated shape of the corresponding input
// curve. The output never gains length beyond resampling error.
HorizontalPath horizontal_part_of_path(const CurvePath& p, const HorizontalOptions& opt = {});

// Per-sample ratio |wVer| / |wHor| of the path velocity in the elastic
// metric; +infinity marks samples whose horizontal part vanishes. Falls back
// to interval-difference velocities when the path stores none.
std::vector<double> verticality_ratio(const CurvePath& p);

}  // namespace geomatch
