#pragma once

#include <Eigen/Dense>
#include <string>

#include "geomatch/errors.hpp"

namespace geomatch {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ManifoldKind { Euclidean, HyperbolicPlane, Sphere2 };

// Which constant-curvature space, its coordinate model and curvature sign.
//   Euclidean(d)   : R^d, K = 0
//   HyperbolicPlane: upper half-plane coordinates (u, y), y > 0, K = -1
//   Sphere2        : unit sphere in ambient R^3 coordinates, K = +1
struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::Euclidean;
  int dim = 2;  // coordinate dimension: d, 2, 3

  static ManifoldSpec euclidean(int d);
  static ManifoldSpec hyperbolic2() { return {ManifoldKind::HyperbolicPlane, 2}; }
  static ManifoldSpec sphere2() { return {ManifoldKind::Sphere2, 3}; }

  int curvature() const;  // K in {-1, 0, +1}

  // Serialization tag: "euclidean:<d>" | "hyperbolic2" | "sphere2".
  std::string tag() const;
  static ManifoldSpec from_tag(const std::string& tag);

  bool operator==(const ManifoldSpec& o) const {
    return kind == o.kind && dim == o.dim;
  }
  bool operator!=(const ManifoldSpec& o) const { return !(*this == o); }
};

// Time-scaled geodesic comparison coefficients at parameter t for an edge of
// length normTau:
//   K = -1: a = cosh(|tau| t), b = sinh(|tau| t)/|tau|, e = sinh(|tau| t)
//   K =  0: a = 1,             b = t,                   e = 0
//   K = +1: a = cos(|tau| t),  b = sin(|tau| t)/|tau|,  e = -sin(|tau| t)
// b is evaluated by series for |tau| < 1e-6 to avoid 0/0.
struct JacobiCoefficients {
  double a = 1.0;
  double b = 0.0;
  double e = 0.0;
};
JacobiCoefficients jacobi_coefficients(double normTau, int K, double t);

// Exact geometry of one constant-curvature space. All operations are pure
// functions on coordinate vectors; callers keep track of base points.
class Manifold {
 public:
  Manifold() = default;
  explicit Manifold(ManifoldSpec spec);

  const ManifoldSpec& spec() const { return spec_; }
  ManifoldKind kind() const { return spec_.kind; }
  int dim() const { return spec_.dim; }        // coordinate dimension
  int tangent_dim() const;                     // intrinsic dimension
  double K() const { return static_cast<double>(spec_.curvature()); }
  bool flat() const { return spec_.kind == ManifoldKind::Euclidean; }

  // Riemannian inner product of tangents u, v at x.
  double inner(const Vec& x, const Vec& u, const Vec& v) const;
  double norm(const Vec& x, const Vec& v) const;

  // Endpoint at unit time of the geodesic from x with initial velocity v.
  // Sphere2 requires |v| < pi (injectivity).
  Vec exp(const Vec& x, const Vec& v) const;

  // Inverse of exp; |log_x y| equals the geodesic distance.
  // Sphere2 rejects antipodal pairs (no unique geodesic).
  Vec log(const Vec& x, const Vec& y) const;

  // Parallel transport of v from x to y along the connecting geodesic.
  Vec transport(const Vec& x, const Vec& y, const Vec& v) const;

  double dist(const Vec& x, const Vec& y) const;

  // Curvature operator R(X,Y)Z = K(<Y,Z>X - <X,Z>Y), inner products at x.
  Vec curvature(const Vec& x, const Vec& X, const Vec& Y, const Vec& Z) const;

  // Columns form a basis of T_x M, orthonormal for the metric at x.
  Mat tangent_basis(const Vec& x) const;

  // Model hygiene. project_point renormalizes sphere coordinates and checks
  // the half-plane constraint; project_tangent removes the sphere radial part.
  Vec project_point(const Vec& x) const;
  Vec project_tangent(const Vec& x, const Vec& v) const;
  void validate_point(const Vec& x) const;  // throws DomainError

 private:
  ManifoldSpec spec_;
};

// Spec-facing value types. The engine works on raw coordinate matrices; these
// wrappers carry their base data and validate on construction, and are the
// currency of the kernel entry points below and of file I/O.
struct Point {
  ManifoldSpec manifold;
  Vec coords;

  Point(ManifoldSpec m, Vec c);
};

struct Tangent {
  Point base;
  Vec vec;

  Tangent(Point b, Vec v);
};

// Kernel entry points with full base-point checking.
double riemannian_inner(const Point& x, const Tangent& u, const Tangent& v);
Point exp_point(const Point& x, const Tangent& v);
Tangent log_point(const Point& x, const Point& y);
Tangent parallel_transport(const Point& x, const Point& y, const Tangent& v);
Tangent curvature_op(const Point& x, const Tangent& X, const Tangent& Y,
                     const Tangent& Z);

}  // namespace geomatch
