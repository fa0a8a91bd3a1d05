#include "geomatch/manifold.hpp"

#include <algorithm>
#include <cmath>

namespace geomatch {
namespace {

constexpr double kTaylorTol = 1e-6;   // small-angle series threshold
constexpr double kAntipodalTol = 1e-12;

// Lorentz bilinear form diag(-1, 1, 1) used by the hyperboloid model of H^2.
double lorentz(const Vec& a, const Vec& b) {
  return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// Isometric embedding of the upper half-plane into the hyperboloid sheet
// {<X,X> = -1, X0 > 0}; exp/log/transport have sphere-like closed forms there.
Vec half_plane_to_hyperboloid(const Vec& p) {
  const double u = p[0], y = p[1];
  Vec X(3);
  X << (u * u + y * y + 1.0) / (2.0 * y), (u * u + y * y - 1.0) / (2.0 * y),
      u / y;
  return X;
}

Vec hyperboloid_to_half_plane(const Vec& X) {
  const double D = X[0] - X[1];  // = 1/y > 0 on the upper sheet
  Vec p(2);
  p << X[2] / D, 1.0 / D;
  return p;
}

Vec push_tangent(const Vec& p, const Vec& v) {
  const double u = p[0], y = p[1];
  Vec du(3), dy(3);
  du << u / y, u / y, 1.0 / y;
  dy << (y * y - u * u - 1.0) / (2.0 * y * y),
      (y * y - u * u + 1.0) / (2.0 * y * y), -u / (y * y);
  return v[0] * du + v[1] * dy;
}

Vec pull_tangent(const Vec& X, const Vec& V) {
  const double D = X[0] - X[1];
  const double VD = V[0] - V[1];
  Vec v(2);
  v << V[2] / D - X[2] * VD / (D * D), -VD / (D * D);
  return v;
}

Vec hyperboloid_exp(const Vec& X, const Vec& V) {
  const double theta2 = lorentz(V, V);
  if (theta2 <= 0.0) return X;  // zero vector up to roundoff
  const double theta = std::sqrt(theta2);
  if (theta < kTaylorTol) {
    // cosh t ~ 1 + t^2/2, sinh t / t ~ 1 + t^2/6
    return X * (1.0 + theta2 / 2.0) + V * (1.0 + theta2 / 6.0);
  }
  return X * std::cosh(theta) + V * (std::sinh(theta) / theta);
}

// Geodesic distance from the Lorentz chord; stable near coincident points
// where acosh(-<X,Y>) cancels.
double hyperboloid_dist(const Vec& X, const Vec& Y) {
  const double chord2 = std::max(0.0, lorentz(Y - X, Y - X));
  return 2.0 * std::asinh(0.5 * std::sqrt(chord2));
}

Vec hyperboloid_log(const Vec& X, const Vec& Y) {
  const double theta = hyperboloid_dist(X, Y);
  Vec W = Y - (-lorentz(X, Y)) * X;  // tangent at X, length sinh(theta)
  const double wn2 = lorentz(W, W);
  // Tangent projection of the chord; valid to O(theta^2) near coincidence.
  if (theta < kTaylorTol || wn2 <= 0.0)
    return (Y - X) + lorentz(X, Y - X) * X;
  return W * (theta / std::sqrt(wn2));
}

Vec hyperboloid_transport(const Vec& X, const Vec& Y, const Vec& V) {
  // P(V) = V + <V,Y>/(1 - <X,Y>) (X + Y); fixes the orthogonal complement of
  // span{X,Y} and rotates the geodesic direction, i.e. parallel transport.
  const double denom = 1.0 - lorentz(X, Y);  // = 1 + cosh(theta) >= 2
  return V + (lorentz(V, Y) / denom) * (X + Y);
}

}  // namespace

ManifoldSpec ManifoldSpec::euclidean(int d) {
  if (d < 1) throw DomainError("Euclidean dimension must be >= 1");
  return {ManifoldKind::Euclidean, d};
}

int ManifoldSpec::curvature() const {
  switch (kind) {
    case ManifoldKind::Euclidean:
      return 0;
    case ManifoldKind::HyperbolicPlane:
      return -1;
    case ManifoldKind::Sphere2:
      return 1;
  }
  return 0;
}

std::string ManifoldSpec::tag() const {
  switch (kind) {
    case ManifoldKind::Euclidean:
      return "euclidean:" + std::to_string(dim);
    case ManifoldKind::HyperbolicPlane:
      return "hyperbolic2";
    case ManifoldKind::Sphere2:
      return "sphere2";
  }
  return "";
}

ManifoldSpec ManifoldSpec::from_tag(const std::string& tag) {
  if (tag == "hyperbolic2") return hyperbolic2();
  if (tag == "sphere2") return sphere2();
  const std::string prefix = "euclidean:";
  if (tag.rfind(prefix, 0) == 0) {
    const std::string num = tag.substr(prefix.size());
    try {
      std::size_t used = 0;
      const int d = std::stoi(num, &used);
      if (used == num.size()) return euclidean(d);
    } catch (const std::exception&) {
    }
  }
  throw DomainError("unknown manifold tag '" + tag + "'");
}

JacobiCoefficients jacobi_coefficients(double normTau, int K, double t) {
  if (normTau < 0.0) throw DomainError("normTau must be nonnegative");
  if (K != -1 && K != 0 && K != 1) throw DomainError("curvature must be -1, 0 or +1");
  JacobiCoefficients c;
  if (K == 0) {
    c.a = 1.0;
    c.b = t;
    c.e = 0.0;
    return c;
  }
  const double r = normTau * t;
  if (K == -1) {
    c.a = std::cosh(r);
    c.e = std::sinh(r);
  } else {
    c.a = std::cos(r);
    c.e = -std::sin(r);
  }
  if (normTau < kTaylorTol) {
    c.b = t * (1.0 - K * r * r / 6.0);  // t * (sin|sinh)(r)/r to O(r^4)
  } else {
    c.b = (K == -1 ? std::sinh(r) : std::sin(r)) / normTau;
  }
  return c;
}

Manifold::Manifold(ManifoldSpec spec) : spec_(spec) {
  if (spec_.dim < 1) throw DomainError("manifold dimension must be >= 1");
  if (spec_.kind == ManifoldKind::HyperbolicPlane && spec_.dim != 2)
    throw DomainError("hyperbolic2 uses 2 coordinates");
  if (spec_.kind == ManifoldKind::Sphere2 && spec_.dim != 3)
    throw DomainError("sphere2 uses 3 ambient coordinates");
}

int Manifold::tangent_dim() const {
  return spec_.kind == ManifoldKind::Sphere2 ? 2 : spec_.dim;
}

double Manifold::inner(const Vec& x, const Vec& u, const Vec& v) const {
  switch (spec_.kind) {
    case ManifoldKind::Euclidean:
    case ManifoldKind::Sphere2:
      return u.dot(v);
    case ManifoldKind::HyperbolicPlane:
      return u.dot(v) / (x[1] * x[1]);
  }
  return 0.0;
}

double Manifold::norm(const Vec& x, const Vec& v) const {
  return std::sqrt(std::max(0.0, inner(x, v, v)));
}

Vec Manifold::exp(const Vec& x, const Vec& v) const {
  switch (spec_.kind) {
    case ManifoldKind::Euclidean:
      return x + v;
    case ManifoldKind::HyperbolicPlane: {
      const Vec X = half_plane_to_hyperboloid(x);
      return hyperboloid_to_half_plane(hyperboloid_exp(X, push_tangent(x, v)));
    }
    case ManifoldKind::Sphere2: {
      const double theta = v.norm();
      if (theta >= M_PI)
        throw InjectivityError("sphere exp outside injectivity radius: |v| = " +
                               std::to_string(theta) + " >= pi");
      if (theta < kTaylorTol) {
        Vec y = x * (1.0 - theta * theta / 2.0) +
                v * (1.0 - theta * theta / 6.0);
        return y / y.norm();
      }
      Vec y = x * std::cos(theta) + v * (std::sin(theta) / theta);
      return y / y.norm();
    }
  }
  return x;
}

Vec Manifold::log(const Vec& x, const Vec& y) const {
  switch (spec_.kind) {
    case ManifoldKind::Euclidean:
      return y - x;
    case ManifoldKind::HyperbolicPlane: {
      const Vec X = half_plane_to_hyperboloid(x);
      const Vec Y = half_plane_to_hyperboloid(y);
      return pull_tangent(X, hyperboloid_log(X, Y));
    }
    case ManifoldKind::Sphere2: {
      const double c = std::clamp(x.dot(y), -1.0, 1.0);
      if (1.0 + c < kAntipodalTol)
        throw NonUniqueGeodesicError(
            "sphere log of an antipodal pair has no unique geodesic");
      Vec u = y - c * x;
      const double s = u.norm();  // sin(theta)
      const double theta = std::atan2(s, c);
      if (s < 1e-9) return u;  // theta/s -> 1 at coincident points
      return u * (theta / s);
    }
  }
  return y - x;
}

Vec Manifold::transport(const Vec& x, const Vec& y, const Vec& v) const {
  switch (spec_.kind) {
    case ManifoldKind::Euclidean:
      return v;
    case ManifoldKind::HyperbolicPlane: {
      const Vec X = half_plane_to_hyperboloid(x);
      const Vec Y = half_plane_to_hyperboloid(y);
      return pull_tangent(Y, hyperboloid_transport(X, Y, push_tangent(x, v)));
    }
    case ManifoldKind::Sphere2: {
      const double c = x.dot(y);
      if (1.0 + c < kAntipodalTol)
        throw NonUniqueGeodesicError(
            "sphere transport between antipodal points is not unique");
      return v - (v.dot(y) / (1.0 + c)) * (x + y);
    }
  }
  return v;
}

double Manifold::dist(const Vec& x, const Vec& y) const {
  switch (spec_.kind) {
    case ManifoldKind::Euclidean:
      return (y - x).norm();
    case ManifoldKind::HyperbolicPlane:
      return hyperboloid_dist(half_plane_to_hyperboloid(x),
                              half_plane_to_hyperboloid(y));
    case ManifoldKind::Sphere2: {
      // Stable at both ends of [0, pi].
      const double c = std::clamp(x.dot(y), -1.0, 1.0);
      const double s = (y - c * x).norm();
      return std::atan2(s, c);
    }
  }
  return 0.0;
}

Vec Manifold::curvature(const Vec& x, const Vec& X, const Vec& Y,
                        const Vec& Z) const {
  const double k = K();
  if (k == 0.0) return Vec::Zero(x.size());
  return k * (inner(x, Y, Z) * X - inner(x, X, Z) * Y);
}

Mat Manifold::tangent_basis(const Vec& x) const {
  switch (spec_.kind) {
    case ManifoldKind::Euclidean:
      return Mat::Identity(spec_.dim, spec_.dim);
    case ManifoldKind::HyperbolicPlane: {
      Mat B = Mat::Zero(2, 2);
      B(0, 0) = x[1];
      B(1, 1) = x[1];
      return B;
    }
    case ManifoldKind::Sphere2: {
      // Axis least aligned with x gives a well-conditioned first leg.
      int i = 0;
      if (std::abs(x[1]) < std::abs(x[i])) i = 1;
      if (std::abs(x[2]) < std::abs(x[i])) i = 2;
      Vec e = Vec::Zero(3);
      e[i] = 1.0;
      Vec u = e - e.dot(x) * x;
      u /= u.norm();
      Vec w(3);
      w << x[1] * u[2] - x[2] * u[1], x[2] * u[0] - x[0] * u[2],
          x[0] * u[1] - x[1] * u[0];
      Mat B(3, 2);
      B.col(0) = u;
      B.col(1) = w;
      return B;
    }
  }
  return Mat::Identity(spec_.dim, spec_.dim);
}

Vec Manifold::project_point(const Vec& x) const {
  if (spec_.kind == ManifoldKind::Sphere2) {
    const double n = x.norm();
    if (n == 0.0) throw DomainError("zero vector is not a sphere point");
    return x / n;
  }
  validate_point(x);
  return x;
}

Vec Manifold::project_tangent(const Vec& x, const Vec& v) const {
  if (spec_.kind == ManifoldKind::Sphere2) return v - v.dot(x) * x;
  return v;
}

void Manifold::validate_point(const Vec& x) const {
  if (x.size() != spec_.dim)
    throw DomainError("point has " + std::to_string(x.size()) +
                      " coordinates, manifold expects " +
                      std::to_string(spec_.dim));
  if (spec_.kind == ManifoldKind::HyperbolicPlane && !(x[1] > 0.0))
    throw DomainError("half-plane point needs y > 0");
  if (spec_.kind == ManifoldKind::Sphere2 &&
      std::abs(x.norm() - 1.0) > 1e-9)
    throw DomainError("sphere point is not unit length");
}

Point::Point(ManifoldSpec m, Vec c) : manifold(m), coords(std::move(c)) {
  const Manifold M(manifold);
  coords = M.project_point(coords);
  M.validate_point(coords);
}

Tangent::Tangent(Point b, Vec v) : base(std::move(b)), vec(std::move(v)) {
  if (vec.size() != base.coords.size())
    throw DomainError("tangent dimension does not match its base point");
  vec = Manifold(base.manifold).project_tangent(base.coords, vec);
}

namespace {
void require_same_base(const Point& x, const Tangent& t, const char* who) {
  if (t.base.manifold != x.manifold || t.base.coords != x.coords)
    throw DomainError(std::string(who) + ": tangent based at a different point");
}
}  // namespace

double riemannian_inner(const Point& x, const Tangent& u, const Tangent& v) {
  require_same_base(x, u, "riemannian_inner");
  require_same_base(x, v, "riemannian_inner");
  return Manifold(x.manifold).inner(x.coords, u.vec, v.vec);
}

Point exp_point(const Point& x, const Tangent& v) {
  require_same_base(x, v, "exp_point");
  return Point(x.manifold, Manifold(x.manifold).exp(x.coords, v.vec));
}

Tangent log_point(const Point& x, const Point& y) {
  if (x.manifold != y.manifold)
    throw DomainError("log_point: points live on different manifolds");
  return Tangent(x, Manifold(x.manifold).log(x.coords, y.coords));
}

Tangent parallel_transport(const Point& x, const Point& y, const Tangent& v) {
  require_same_base(x, v, "parallel_transport");
  if (x.manifold != y.manifold)
    throw DomainError("parallel_transport: points live on different manifolds");
  return Tangent(y, Manifold(x.manifold).transport(x.coords, y.coords, v.vec));
}

Tangent curvature_op(const Point& x, const Tangent& X, const Tangent& Y,
                     const Tangent& Z) {
  require_same_base(x, X, "curvature_op");
  require_same_base(x, Y, "curvature_op");
  require_same_base(x, Z, "curvature_op");
  return Tangent(x,
                 Manifold(x.manifold).curvature(x.coords, X.vec, Y.vec, Z.vec));
}

}  // namespace geomatch
