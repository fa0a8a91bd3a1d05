#pragma once

#include <vector>

#include "geomatch/curve.hpp"

namespace geomatch {

// Per-sample data of a varying curve alpha(s) with velocity field w = alpha'.
// Vectors indexed by k live in the tangent space at x_k. T[k] is the suffix
// accumulation of transported curvature terms, T[n] = 0, so the nested sums
// of the geodesic equations cost O(n) overall.
struct GeodesicState {
  EdgeFrame frame;
  CurveTangent velocity;

  // First s-derivatives of the frame, per edge.
  std::vector<Vec> dsTau, dsV, dsQ;
  std::vector<double> dsNormTau, dsA, dsB, dsNormQ, ratioQ;
  std::vector<double> cY;  // K(1-a_k)/|tau_k|^2, zero in flat spaces
  std::vector<Vec> Y;      // transport variation vector of edge k

  // Curvature terms and the accelerations the geodesic equations induce.
  std::vector<Vec> R;      // R_k = R(q_k, nabla_s q_k) x_k'
  std::vector<Vec> T;      // T[k] = R_k + f_k^(-)(T[k+1]), size n+1
  Vec accel0;              // nabla_s x_0' = -T[0]/n
  std::vector<Vec> dssQ;   // nabla_s^2 q_k = -g_k^(-)(T[k+1])/n
  CurveTangent accel;      // nabla_s x_k' for every k

  // Second-order data for the Jacobi ODE; see extend_second_order.
  std::vector<double> dssNormTau, dssNormQ, dRatioQ, dssA, dssB, dsCY;
  std::vector<Vec> dssTau, dssV, dsY;
  bool secondOrder = false;

  int n() const { return frame.n(); }
};

// Builds the full first-order state plus geodesic accelerations, treating w
// as the velocity of a geodesic through alpha. Throws DegenerateEdgeError on
// zero-length edges.
GeodesicState geodesic_state(const DiscreteCurve& alpha, const CurveTangent& w);

// Fills the second s-derivatives of the frame scalars, nabla_s^2 tau_k,
// nabla_s^2 v_k and nabla_s Y_k, all of which assume the geodesic
// accelerations of the state.
void extend_second_order(GeodesicState& st);

// First-order data of an independent variation of the same curve (direction
// a), derived from a point field J via dTau = D_tau J. Z is the a-direction
// analogue of Y.
struct EdgeVariation {
  std::vector<Vec> dTau, dV, dQ;
  std::vector<double> dNormTau, dA, dB, ratioQ;
  std::vector<Vec> Z;
};

EdgeVariation edge_variation(const GeodesicState& st, const CurveTangent& J);

// Closed forms of the edge operators
//   f_k(w) = w^T + a_k w^N,   g_k(w) = |q_k| (2 w^T + b_k w^N)
// and their covariant derivatives. A view over a state; the state must
// outlive it. Arguments and results live at x_k; callers transport across
// edges explicitly (the (-) superscripted variants are bwd + apply).
class EdgeMaps {
 public:
  explicit EdgeMaps(const GeodesicState& st) : st_(&st) {}

  Vec f(int k, const Vec& w) const;
  Vec g(int k, const Vec& w) const;
  Vec ginv(int k, const Vec& w) const;

  // Operator derivatives along s (argument held parallel).
  Vec dsF(int k, const Vec& w) const;
  Vec dsG(int k, const Vec& w) const;
  Vec dsGinv(int k, const Vec& w) const;
  Vec dssF(int k, const Vec& w) const;  // requires secondOrder
  Vec dssG(int k, const Vec& w) const;  // requires secondOrder

  // Operator derivatives along an independent variation.
  Vec dirF(int k, const EdgeVariation& var, const Vec& w) const;
  Vec dirG(int k, const EdgeVariation& var, const Vec& w) const;

  const GeodesicState& state() const { return *st_; }

 private:
  const GeodesicState* st_;
};

inline EdgeMaps build_edge_maps(const GeodesicState& st) { return EdgeMaps(st); }

// R_k list of the state (kept as a named entry point).
const std::vector<Vec>& curvature_terms(const GeodesicState& st);

struct GeodesicAccel {
  Vec accel0;
  std::vector<Vec> dssQ;
  CurveTangent accel;
};

GeodesicAccel geodesic_accel(const GeodesicState& st);

// Integrates the discrete geodesic equations from alpha0 with initial
// velocity w over m first-order steps. The SRV coordinates (x_0, q_k) and
// their s-derivatives are the integrated state; points and velocities are
// reconstructed exactly from them at every sample, so flat geodesics are
// exact up to roundoff. Sphere steps that leave the injectivity domain
// rethrow with the step index.
CurvePath exp_map(const DiscreteCurve& alpha0, const CurveTangent& w, int m);

// Jacobi field J along a geodesic path with J(0) = J0, nabla_s J(0) = dJ0.
// Solutions are sampled at every path time; J[j], dJ[j] live on curves[j].
struct JacobiSolution {
  std::vector<CurveTangent> J, dJ;
};

JacobiSolution jacobi_propagate(const CurvePath& geodesic,
                                const CurveTangent& J0,
                                const CurveTangent& dJ0);

// Solves J(1) = jTarget for dJ0 with J(0) = 0 by propagating a per-point
// orthonormal basis of initial slopes and inverting the dense image matrix.
// Throws SingularSystemError near conjugate points (rcond < 1e-14).
CurveTangent jacobi_inverse(const CurvePath& geodesic,
                            const CurveTangent& jTarget);

struct ShootResult {
  CurvePath path;
  CurveTangent w;        // initial velocity of the returned geodesic
  int iterations = 0;    // Newton updates applied
  double residual = 0.0; // terminal gap, L2 over points
  bool converged = false;
  std::vector<double> gapHistory;
};

// Geodesic boundary value problem by shooting: start from the pointwise log,
// correct w with Jacobi inverses of the endpoint gap, damp the step when the
// gap grows, and give up after three consecutive growths (DivergenceError).
// tol <= 0 selects 1e-6 (1 + |log(a0,a1)|_L2). Budget exhaustion is reported
// through converged = false, not thrown.
ShootResult geodesic_shoot(const DiscreteCurve& alpha0,
                           const DiscreteCurve& alpha1, int m = 100,
                           double tol = -1.0, int maxIter = 50);

}  // namespace geomatch
