#include "geomatch/geodesic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "geomatch/errors.hpp"

namespace geomatch {

namespace {

// Scalar derivatives of the comparison coefficients a(r), b(r) at t = 1,
// r = |tau|. a' = e, e' = -K a, b' = (a-b)/r, b'' = (e r - 2(a-b))/r^2.
// Series guards keep the cancellation-prone quotients accurate near r = 0;
// with |K| = 1 the K^2 factors are written out for clarity.
double b_prime(double r, double K, double a, double b) {
  if (K == 0.0) return 0.0;
  if (r < 1e-3) return -K * r / 3.0 + K * K * r * r * r / 30.0;
  return (a - b) / r;
}

double b_second(double r, double K, double a, double b, double e) {
  if (K == 0.0) return 0.0;
  if (r < 1e-2) return -K / 3.0 + K * K * r * r / 10.0;
  return (e * r - 2.0 * (a - b)) / (r * r);
}

// cY = K(1-a)/r^2, the normal coefficient of the transport variation vector.
// Flat spaces have a = 1, so the coefficient vanishes identically there.
double cy_coeff(double r, double K, double a) {
  if (K == 0.0) return 0.0;
  if (r < 1e-3) return 0.5 - K * r * r / 24.0 + K * K * r * r * r * r / 720.0;
  return K * (1.0 - a) / (r * r);
}

double cy_prime(double r, double K, double a, double e) {
  if (K == 0.0) return 0.0;
  if (r < 1e-2) return -K * r / 12.0 + K * K * r * r * r / 180.0;
  return K * (-e * r - 2.0 * (1.0 - a)) / (r * r * r);
}

Vec apply_f(const EdgeFrame& fr, int k, const Vec& w) {
  const Vec wT = fr.tangential(k, w);
  return wT + fr.a[k] * (w - wT);
}

Vec apply_g(const EdgeFrame& fr, int k, const Vec& w) {
  const Vec wT = fr.tangential(k, w);
  return fr.normQ[k] * (2.0 * wT + fr.b[k] * (w - wT));
}

Vec apply_ginv(const EdgeFrame& fr, int k, const Vec& w) {
  const Vec wT = fr.tangential(k, w);
  return (0.5 * wT + (w - wT) / fr.b[k]) / fr.normQ[k];
}

// Symmetric product <w, dv> v + <w, v> dv shared by every operator
// derivative (the derivative of the tangential projector).
Vec sym_term(const EdgeFrame& fr, int k, const Vec& dv, const Vec& w) {
  return fr.inner(k, w, dv) * fr.v[k] + fr.inner(k, w, fr.v[k]) * dv;
}

Vec dir_f(const EdgeFrame& fr, int k, double dA, const Vec& dv, const Vec& w) {
  const Vec wT = fr.tangential(k, w);
  return dA * (w - wT) + (1.0 - fr.a[k]) * sym_term(fr, k, dv, w);
}

Vec dir_g(const EdgeFrame& fr, int k, double ratio, double dB, const Vec& dv,
          const Vec& w) {
  const Vec wT = fr.tangential(k, w);
  return ratio * apply_g(fr, k, w) + fr.normQ[k] * dB * (w - wT) +
         fr.normQ[k] * (2.0 - fr.b[k]) * sym_term(fr, k, dv, w);
}

void require_field(const DiscreteCurve& alpha, const CurveTangent& w,
                   const char* who) {
  if (w.size() != alpha.n() + 1)
    throw DomainError(std::string(who) + ": field length " +
                      std::to_string(w.size()) + " does not match n+1 = " +
                      std::to_string(alpha.n() + 1));
}

}  // namespace

GeodesicState geodesic_state(const DiscreteCurve& alpha,
                             const CurveTangent& w) {
  require_field(alpha, w, "geodesic_state");
  GeodesicState st{edge_frame(alpha), w};
  const EdgeFrame& fr = st.frame;
  const Manifold& M = fr.space();
  const int n = fr.n();
  const double K = M.K();
  const CurveTangent dW = d_tau(fr, w);

  st.dsTau.resize(n);
  st.dsV.resize(n);
  st.dsQ.resize(n);
  st.dsNormTau.resize(n);
  st.dsA.resize(n);
  st.dsB.resize(n);
  st.dsNormQ.resize(n);
  st.ratioQ.resize(n);
  st.cY.resize(n);
  st.Y.resize(n);
  for (int k = 0; k < n; ++k) {
    st.dsTau[k] = dW[k];
    st.dsNormTau[k] = fr.inner(k, dW[k], fr.v[k]);
    st.dsV[k] = (dW[k] - st.dsNormTau[k] * fr.v[k]) / fr.normTau[k];
    st.dsQ[k] = srv_variation(fr, dW, k);
    st.dsA[k] = fr.e[k] * st.dsNormTau[k];
    st.dsB[k] =
        b_prime(fr.normTau[k], K, fr.a[k], fr.b[k]) * st.dsNormTau[k];
    st.dsNormQ[k] = n * st.dsNormTau[k] / (2.0 * fr.normQ[k]);
    st.ratioQ[k] = st.dsNormTau[k] / (2.0 * fr.normTau[k]);
    st.cY[k] = cy_coeff(fr.normTau[k], K, fr.a[k]);
    const Vec wT = fr.tangential(k, w[k]);
    const Vec tT = fr.tangential(k, dW[k]);
    st.Y[k] = wT + fr.b[k] * (w[k] - wT) + 0.5 * tT + st.cY[k] * (dW[k] - tT);
  }

  st.R.resize(n);
  st.T.assign(n + 1, Vec::Zero(M.dim()));
  for (int k = 0; k < n; ++k)
    st.R[k] = M.curvature(fr.points[k], fr.q[k], st.dsQ[k], w[k]);
  for (int k = n - 1; k >= 0; --k)
    st.T[k] = st.R[k] + apply_f(fr, k, fr.bwd(k, st.T[k + 1]));

  st.accel0 = -st.T[0] / n;
  st.dssQ.resize(n);
  for (int k = 0; k < n; ++k)
    st.dssQ[k] = -apply_g(fr, k, fr.bwd(k, st.T[k + 1])) / n;

  std::vector<Vec> acc(n + 1);
  acc[0] = st.accel0;
  for (int k = 0; k < n; ++k) {
    Vec term = dir_f(fr, k, st.dsA[k], st.dsV[k], w[k]) +
               apply_f(fr, k, acc[k]) +
               (dir_g(fr, k, st.ratioQ[k], st.dsB[k], st.dsV[k], st.dsQ[k]) +
                apply_g(fr, k, st.dssQ[k])) /
                   n;
    if (K != 0.0)
      term += M.curvature(fr.points[k], fr.tau[k], st.Y[k],
                          fr.bwd(k, w[k + 1]));
    acc[k + 1] = fr.fwd(k, term);
  }
  st.accel = CurveTangent(std::move(acc));
  return st;
}

void extend_second_order(GeodesicState& st) {
  if (st.secondOrder) return;
  const EdgeFrame& fr = st.frame;
  const Manifold& M = fr.space();
  const int n = fr.n();
  const double K = M.K();

  st.dssNormTau.resize(n);
  st.dssNormQ.resize(n);
  st.dRatioQ.resize(n);
  st.dssA.resize(n);
  st.dssB.resize(n);
  st.dsCY.resize(n);
  st.dssTau.resize(n);
  st.dssV.resize(n);
  st.dsY.resize(n);
  for (int k = 0; k < n; ++k) {
    const double r = fr.normTau[k];
    const double nq = fr.normQ[k];
    st.dssNormQ[k] = (fr.inner(k, st.dssQ[k], fr.q[k]) +
                      fr.inner(k, st.dsQ[k], st.dsQ[k]) -
                      st.dsNormQ[k] * st.dsNormQ[k]) /
                     nq;
    st.dRatioQ[k] = st.dssNormQ[k] / nq - st.ratioQ[k] * st.ratioQ[k];
    st.dssNormTau[k] =
        2.0 * (st.dsNormQ[k] * st.dsNormQ[k] + nq * st.dssNormQ[k]) / n;
    st.dssA[k] = -K * fr.a[k] * st.dsNormTau[k] * st.dsNormTau[k] +
                 fr.e[k] * st.dssNormTau[k];
    st.dssB[k] =
        b_second(r, K, fr.a[k], fr.b[k], fr.e[k]) * st.dsNormTau[k] *
            st.dsNormTau[k] +
        b_prime(r, K, fr.a[k], fr.b[k]) * st.dssNormTau[k];
    st.dsCY[k] = cy_prime(r, K, fr.a[k], fr.e[k]) * st.dsNormTau[k];
    st.dssTau[k] = (st.dssNormQ[k] * fr.q[k] + 2.0 * st.dsNormQ[k] * st.dsQ[k] +
                    nq * st.dssQ[k]) /
                   n;
    st.dssV[k] = (st.dssTau[k] - st.dssNormTau[k] * fr.v[k]) / r -
                 2.0 * st.dsV[k] * st.dsNormTau[k] / r;

    const Vec& vel = st.velocity[k];
    const Vec& acc = st.accel[k];
    const Vec aT = fr.tangential(k, acc);
    const Vec velN = vel - fr.tangential(k, vel);
    const Vec t2T = fr.tangential(k, st.dssTau[k]);
    const Vec tN = st.dsTau[k] - fr.tangential(k, st.dsTau[k]);
    st.dsY[k] = aT + fr.b[k] * (acc - aT) + st.dsB[k] * velN +
                (1.0 - fr.b[k]) * sym_term(fr, k, st.dsV[k], vel) +
                0.5 * t2T + st.cY[k] * (st.dssTau[k] - t2T) +
                st.dsCY[k] * tN +
                (0.5 - st.cY[k]) * sym_term(fr, k, st.dsV[k], st.dsTau[k]);
  }
  st.secondOrder = true;
}

EdgeVariation edge_variation(const GeodesicState& st, const CurveTangent& J) {
  const EdgeFrame& fr = st.frame;
  const double K = fr.space().K();
  const int n = fr.n();
  const CurveTangent dJ = d_tau(fr, J);
  EdgeVariation var;
  var.dTau.resize(n);
  var.dV.resize(n);
  var.dQ.resize(n);
  var.dNormTau.resize(n);
  var.dA.resize(n);
  var.dB.resize(n);
  var.ratioQ.resize(n);
  var.Z.resize(n);
  for (int k = 0; k < n; ++k) {
    var.dTau[k] = dJ[k];
    var.dNormTau[k] = fr.inner(k, dJ[k], fr.v[k]);
    var.dV[k] = (dJ[k] - var.dNormTau[k] * fr.v[k]) / fr.normTau[k];
    var.dQ[k] = srv_variation(fr, dJ, k);
    var.dA[k] = fr.e[k] * var.dNormTau[k];
    var.dB[k] = b_prime(fr.normTau[k], K, fr.a[k], fr.b[k]) * var.dNormTau[k];
    var.ratioQ[k] = var.dNormTau[k] / (2.0 * fr.normTau[k]);
    const Vec jT = fr.tangential(k, J[k]);
    const Vec tT = fr.tangential(k, dJ[k]);
    var.Z[k] = jT + fr.b[k] * (J[k] - jT) + 0.5 * tT +
               st.cY[k] * (dJ[k] - tT);
  }
  return var;
}

Vec EdgeMaps::f(int k, const Vec& w) const { return apply_f(st_->frame, k, w); }

Vec EdgeMaps::g(int k, const Vec& w) const { return apply_g(st_->frame, k, w); }

Vec EdgeMaps::ginv(int k, const Vec& w) const {
  return apply_ginv(st_->frame, k, w);
}

Vec EdgeMaps::dsF(int k, const Vec& w) const {
  return dir_f(st_->frame, k, st_->dsA[k], st_->dsV[k], w);
}

Vec EdgeMaps::dsG(int k, const Vec& w) const {
  return dir_g(st_->frame, k, st_->ratioQ[k], st_->dsB[k], st_->dsV[k], w);
}

Vec EdgeMaps::dsGinv(int k, const Vec& w) const {
  const EdgeFrame& fr = st_->frame;
  const Vec wT = fr.tangential(k, w);
  const double b = fr.b[k];
  return -st_->ratioQ[k] * apply_ginv(fr, k, w) +
         (-st_->dsB[k] / (b * b)) * (w - wT) / fr.normQ[k] +
         (0.5 - 1.0 / b) * sym_term(fr, k, st_->dsV[k], w) / fr.normQ[k];
}

Vec EdgeMaps::dssF(int k, const Vec& w) const {
  const EdgeFrame& fr = st_->frame;
  const Vec wT = fr.tangential(k, w);
  const Vec sym2 = fr.inner(k, w, st_->dssV[k]) * fr.v[k] +
                   2.0 * fr.inner(k, w, st_->dsV[k]) * st_->dsV[k] +
                   fr.inner(k, w, fr.v[k]) * st_->dssV[k];
  return st_->dssA[k] * (w - wT) -
         2.0 * st_->dsA[k] * sym_term(fr, k, st_->dsV[k], w) +
         (1.0 - fr.a[k]) * sym2;
}

Vec EdgeMaps::dssG(int k, const Vec& w) const {
  const EdgeFrame& fr = st_->frame;
  const Vec wT = fr.tangential(k, w);
  const double nq = fr.normQ[k];
  const Vec sym2 = fr.inner(k, w, st_->dssV[k]) * fr.v[k] +
                   2.0 * fr.inner(k, w, st_->dsV[k]) * st_->dsV[k] +
                   fr.inner(k, w, fr.v[k]) * st_->dssV[k];
  return st_->dRatioQ[k] * apply_g(fr, k, w) + st_->ratioQ[k] * dsG(k, w) +
         (st_->dsNormQ[k] * st_->dsB[k] + nq * st_->dssB[k]) * (w - wT) +
         (st_->dsNormQ[k] * (2.0 - fr.b[k]) - 2.0 * nq * st_->dsB[k]) *
             sym_term(fr, k, st_->dsV[k], w) +
         nq * (2.0 - fr.b[k]) * sym2;
}

Vec EdgeMaps::dirF(int k, const EdgeVariation& var, const Vec& w) const {
  return dir_f(st_->frame, k, var.dA[k], var.dV[k], w);
}

Vec EdgeMaps::dirG(int k, const EdgeVariation& var, const Vec& w) const {
  return dir_g(st_->frame, k, var.ratioQ[k], var.dB[k], var.dV[k], w);
}

const std::vector<Vec>& curvature_terms(const GeodesicState& st) {
  return st.R;
}

GeodesicAccel geodesic_accel(const GeodesicState& st) {
  return {st.accel0, st.dssQ, st.accel};
}

CurvePath exp_map(const DiscreteCurve& alpha0, const CurveTangent& w, int m) {
  if (m < 1) throw DomainError("exp_map: need m >= 1");
  require_field(alpha0, w, "exp_map");
  const Manifold M(alpha0.manifold);
  const int n = alpha0.n();
  const double eps = 1.0 / m;

  CurvePath path{alpha0.manifold, {}, {}, CurvePath::Kind::Geodesic};
  path.curves.reserve(m + 1);
  path.velocities.reserve(m + 1);
  path.curves.push_back(alpha0);
  path.velocities.push_back(w);

  for (int j = 0; j < m; ++j) {
    const DiscreteCurve& cur = path.curves.back();
    const CurveTangent& vel = path.velocities.back();
    try {
      const GeodesicState st = geodesic_state(cur, vel);
      const EdgeFrame& fr = st.frame;

      std::vector<Vec> pts;
      pts.reserve(n + 1);
      pts.push_back(M.project_point(M.exp(cur.points[0], eps * vel[0])));
      const Vec v0 =
          M.transport(cur.points[0], pts[0], vel[0] + eps * st.accel0);
      std::vector<Vec> dq(n);
      for (int k = 0; k < n; ++k) {
        Vec qn = M.transport(cur.points[k], pts[k],
                             fr.q[k] + eps * st.dsQ[k]);
        dq[k] = M.transport(cur.points[k], pts[k],
                            st.dsQ[k] + eps * st.dssQ[k]);
        const double nq = std::sqrt(M.inner(pts[k], qn, qn));
        pts.push_back(M.project_point(M.exp(pts[k], qn * (nq / n))));
      }
      DiscreteCurve next(alpha0.manifold, std::move(pts), alpha0.relaxedEdges);
      const EdgeFrame nf = edge_frame(next);
      std::vector<Vec> nv(n + 1);
      nv[0] = v0;
      for (int k = 0; k < n; ++k)
        nv[k + 1] =
            nf.fwd(k, apply_f(nf, k, nv[k]) + apply_g(nf, k, dq[k]) / n);
      path.curves.push_back(std::move(next));
      path.velocities.push_back(CurveTangent(std::move(nv)));
    } catch (const InjectivityError& err) {
      throw InjectivityError("exp_map: step " + std::to_string(j) +
                             " left the geodesic domain: " + err.what());
    } catch (const NonUniqueGeodesicError& err) {
      throw NonUniqueGeodesicError("exp_map: step " + std::to_string(j) +
                                   " hit a non-unique geodesic: " +
                                   err.what());
    }
  }
  return path;
}

namespace {

// Right-hand side of the Jacobi ODE: the field ddJ with ddJ_k = nabla_s^2 J_k
// given (J, dJ) on the state's curve. Differentiates the geodesic equations
// along the variation J; the nested sums TA (curvature-term variation) and
// W (operator variation applied to T) keep the cost O(n) per field.
CurveTangent jacobi_rhs(const GeodesicState& st, const EdgeMaps& em,
                        const CurveTangent& J, const CurveTangent& dJ) {
  const EdgeFrame& fr = st.frame;
  const Manifold& M = fr.space();
  const int n = fr.n();
  const bool curved = M.K() != 0.0;
  const Vec zero = Vec::Zero(M.dim());
  const EdgeVariation var = edge_variation(st, J);

  // nabla_s nabla_a q_k from the s-derivative of the velocity identity
  // J_{k+1}^par = f_k(J_k) + g_k(nabla_a q_k)/n.
  std::vector<Vec> dsaQ(n);
  for (int k = 0; k < n; ++k) {
    const Vec bwdJ = fr.bwd(k, J[k + 1]);
    Vec lhs = fr.bwd(k, dJ[k + 1]) - em.dsF(k, J[k]) - em.f(k, dJ[k]);
    if (curved)
      lhs += M.curvature(fr.points[k], st.Y[k], fr.tau[k], bwdJ);
    dsaQ[k] = static_cast<double>(n) *
              (em.ginv(k, lhs) + em.dsGinv(k, bwdJ - em.f(k, J[k])));
  }

  std::vector<Vec> TA, W;
  if (curved) {
    TA.assign(n + 1, zero);
    W.assign(n + 1, zero);
    for (int k = n - 1; k >= 0; --k) {
      const Vec& x = fr.points[k];
      // nabla_a R_k with nabla_a nabla_s q = nabla_s nabla_a q + R(J, x')q.
      const Vec daR =
          M.curvature(x, var.dQ[k], st.dsQ[k], st.velocity[k]) +
          M.curvature(x, fr.q[k],
                      dsaQ[k] + M.curvature(x, J[k], st.velocity[k], fr.q[k]),
                      st.velocity[k]) +
          M.curvature(x, fr.q[k], st.dsQ[k], dJ[k]);
      TA[k] = daR + em.f(k, fr.bwd(k, TA[k + 1]));
      const Vec bt = fr.bwd(k, st.T[k + 1]);
      W[k] = em.dirF(k, var, bt) +
             em.f(k, M.curvature(x, var.Z[k], fr.tau[k], bt)) +
             em.f(k, fr.bwd(k, W[k + 1]));
    }
  }

  std::vector<Vec> out(n + 1);
  out[0] = curved
               ? Vec(M.curvature(fr.points[0], st.velocity[0], J[0],
                                 st.velocity[0]) -
                     (TA[0] + W[0]) / n)
               : zero;
  for (int k = 0; k < n; ++k) {
    const Vec& x = fr.points[k];
    Vec d2aq = zero;
    if (curved) {
      const Vec bt = fr.bwd(k, st.T[k + 1]);
      d2aq = -(em.dirG(k, var, bt) +
               em.g(k, M.curvature(x, var.Z[k], fr.tau[k], bt)) +
               em.g(k, fr.bwd(k, TA[k + 1] + W[k + 1]))) /
                 n +
             M.curvature(x, st.accel[k], J[k], fr.q[k]) +
             M.curvature(x, st.velocity[k], dJ[k], fr.q[k]) +
             2.0 * M.curvature(x, st.velocity[k], J[k], st.dsQ[k]);
    }
    Vec br = em.f(k, out[k]) + 2.0 * em.dsF(k, dJ[k]) + em.dssF(k, J[k]) +
             (em.g(k, d2aq) + 2.0 * em.dsG(k, dsaQ[k]) +
              em.dssG(k, var.dQ[k])) /
                 n;
    if (curved) {
      const Vec JP = fr.bwd(k, J[k + 1]);
      const Vec dJP = fr.bwd(k, dJ[k + 1]);
      br += 2.0 * M.curvature(x, fr.tau[k], st.Y[k], dJP) +
            M.curvature(x, st.dsTau[k], st.Y[k], JP) +
            M.curvature(x, fr.tau[k], st.dsY[k], JP) +
            M.curvature(x, fr.tau[k], st.Y[k],
                        M.curvature(x, st.Y[k], fr.tau[k], JP));
    }
    out[k + 1] = fr.fwd(k, br);
  }
  return CurveTangent(std::move(out));
}

struct JacobiFieldPair {
  CurveTangent J, dJ;
};

void check_jacobi_path(const CurvePath& path, const char* who) {
  if (path.kind == CurvePath::Kind::Raw)
    throw DomainError(std::string(who) + ": path tagged raw, need a geodesic");
  if (path.curves.size() < 2)
    throw DomainError(std::string(who) + ": path needs >= 2 samples");
  if (path.velocities.size() != path.curves.size())
    throw DomainError(std::string(who) +
                      ": path lacks per-sample velocities (not shot by "
                      "exp_map)");
}

// Euler sweep of all fields through the path; per-sample state is shared.
// record, when non-null, receives one solution per field sampled at every
// path time.
void jacobi_sweep(const CurvePath& path, std::vector<JacobiFieldPair>& fields,
                  std::vector<JacobiSolution>* record) {
  const Manifold M(path.manifold);
  const int m = path.m();
  const double eps = 1.0 / m;
  if (record) {
    record->resize(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      (*record)[i].J.push_back(fields[i].J);
      (*record)[i].dJ.push_back(fields[i].dJ);
    }
  }
  for (int j = 0; j < m; ++j) {
    GeodesicState st = geodesic_state(path.curves[j], path.velocities[j]);
    extend_second_order(st);
    const EdgeMaps em(st);
    const auto& cur = path.curves[j].points;
    const auto& nxt = path.curves[j + 1].points;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      CurveTangent ddJ = jacobi_rhs(st, em, fields[i].J, fields[i].dJ);
      for (int k = 0; k <= st.n(); ++k) {
        fields[i].J[k] = M.transport(cur[k], nxt[k],
                                     fields[i].J[k] + eps * fields[i].dJ[k]);
        fields[i].dJ[k] =
            M.transport(cur[k], nxt[k], fields[i].dJ[k] + eps * ddJ[k]);
      }
      if (record) {
        (*record)[i].J.push_back(fields[i].J);
        (*record)[i].dJ.push_back(fields[i].dJ);
      }
    }
  }
}

// Flat geodesics are exact SRV lines: q_k(s) = q_k(0) + s nabla_w q_k(0), so
// the derivative of the endpoint with respect to the initial velocity u is
// the closed-form composition of nabla_u q at s = 0 with the reconstruction
//   delta x_{k+1} = delta x_k + (|q| dq + <q, dq> q/|q|) / n
// at s = 1. Solving that linear system inverts the endpoint map exactly,
// which keeps the shooting iteration a true Newton method.
CurveTangent flat_jacobi_inverse(const CurvePath& geodesic,
                                 const CurveTangent& jTarget) {
  const DiscreteCurve& start = geodesic.curves.front();
  const DiscreteCurve& end = geodesic.curves.back();
  const EdgeFrame fr0 = edge_frame(start);
  const SrvRep rep1 = srv(end);
  const int n = start.n();
  const int d = static_cast<int>(start.points.front().size());
  const int dim = (n + 1) * d;

  auto forward = [&](const CurveTangent& u) {
    const CurveTangent dW = d_tau(fr0, u);
    CurveTangent out = CurveTangent::zero(start);
    out[0] = u[0];
    for (int k = 0; k < n; ++k) {
      const Vec h = srv_variation(fr0, dW, k);
      const Vec& q1 = rep1.qs[k];
      const double nq = q1.norm();
      out[k + 1] = out[k] + (nq * h + (q1.dot(h) / nq) * q1) / n;
    }
    return out;
  };

  Mat A(dim, dim);
  CurveTangent basis = CurveTangent::zero(start);
  for (int k = 0; k <= n; ++k)
    for (int i = 0; i < d; ++i) {
      basis[k] = Vec::Unit(d, i);
      const CurveTangent img = forward(basis);
      for (int l = 0; l <= n; ++l)
        A.block(l * d, k * d + i, d, 1) = img[l];
      basis[k] = Vec::Zero(d);
    }
  Vec rhs(dim);
  for (int l = 0; l <= n; ++l) rhs.segment(l * d, d) = jTarget[l];

  Eigen::PartialPivLU<Mat> lu(A);
  const double rc = lu.rcond();
  if (!(rc > 1e-14))
    throw SingularSystemError(
        "jacobi_inverse: basis-image system is numerically singular "
        "(conjugate-point degeneracy)",
        rc);
  const Vec c = lu.solve(rhs);
  CurveTangent dJ0 = CurveTangent::zero(start);
  for (int k = 0; k <= n; ++k) dJ0[k] = c.segment(k * d, d);
  return dJ0;
}

}  // namespace

JacobiSolution jacobi_propagate(const CurvePath& geodesic,
                                const CurveTangent& J0,
                                const CurveTangent& dJ0) {
  check_jacobi_path(geodesic, "jacobi_propagate");
  require_field(geodesic.curves[0], J0, "jacobi_propagate");
  require_field(geodesic.curves[0], dJ0, "jacobi_propagate");
  std::vector<JacobiFieldPair> fields{{J0, dJ0}};
  std::vector<JacobiSolution> record;
  jacobi_sweep(geodesic, fields, &record);
  return std::move(record[0]);
}

CurveTangent jacobi_inverse(const CurvePath& geodesic,
                            const CurveTangent& jTarget) {
  check_jacobi_path(geodesic, "jacobi_inverse");
  const DiscreteCurve& start = geodesic.curves.front();
  const DiscreteCurve& end = geodesic.curves.back();
  require_field(end, jTarget, "jacobi_inverse");
  const Manifold M(geodesic.manifold);
  if (M.flat()) return flat_jacobi_inverse(geodesic, jTarget);
  const int n = start.n();
  const int td = M.tangent_dim();
  const int dim = (n + 1) * td;

  std::vector<Mat> startBasis(n + 1), endBasis(n + 1);
  for (int k = 0; k <= n; ++k) {
    startBasis[k] = M.tangent_basis(start.points[k]);
    endBasis[k] = M.tangent_basis(end.points[k]);
  }

  std::vector<JacobiFieldPair> fields(dim);
  for (int k = 0; k <= n; ++k)
    for (int i = 0; i < td; ++i) {
      JacobiFieldPair& fp = fields[k * td + i];
      fp.J = CurveTangent::zero(start);
      fp.dJ = CurveTangent::zero(start);
      fp.dJ[k] = startBasis[k].col(i);
    }
  jacobi_sweep(geodesic, fields, nullptr);

  Mat A(dim, dim);
  Vec rhs(dim);
  for (int l = 0; l <= n; ++l)
    for (int jj = 0; jj < td; ++jj) {
      const int row = l * td + jj;
      const Vec bcol = endBasis[l].col(jj);
      for (int c = 0; c < dim; ++c)
        A(row, c) = M.inner(end.points[l], fields[c].J[l], bcol);
      rhs(row) = M.inner(end.points[l], jTarget[l], bcol);
    }

  Eigen::PartialPivLU<Mat> lu(A);
  const double rc = lu.rcond();
  if (!(rc > 1e-14))
    throw SingularSystemError(
        "jacobi_inverse: basis-image system is numerically singular "
        "(conjugate-point degeneracy)",
        rc);
  const Vec c = lu.solve(rhs);

  CurveTangent dJ0 = CurveTangent::zero(start);
  for (int k = 0; k <= n; ++k) {
    Vec acc = Vec::Zero(M.dim());
    for (int i = 0; i < td; ++i) acc += c(k * td + i) * startBasis[k].col(i);
    dJ0[k] = acc;
  }
  return dJ0;
}

ShootResult geodesic_shoot(const DiscreteCurve& alpha0,
                           const DiscreteCurve& alpha1, int m, double tol,
                           int maxIter) {
  if (alpha0.manifold != alpha1.manifold)
    throw DomainError("geodesic_shoot: manifolds differ");
  if (alpha0.n() != alpha1.n())
    throw DomainError("geodesic_shoot: point counts differ");
  if (maxIter < 0) throw DomainError("geodesic_shoot: maxIter < 0");
  const Manifold M(alpha0.manifold);
  const int n = alpha0.n();

  CurveTangent w = pointwise_log(alpha0, alpha1);
  if (tol <= 0.0) tol = 1e-6 * (1.0 + l2_norm(alpha0, w));

  if (l2_norm(alpha0, w) == 0.0) {
    // Coincident endpoints: the constant path is the exact geodesic, with
    // no integration roundoff to report as length.
    ShootResult res;
    res.path = CurvePath{alpha0.manifold,
                         std::vector<DiscreteCurve>(m + 1, alpha0),
                         std::vector<CurveTangent>(m + 1, w),
                         CurvePath::Kind::Geodesic};
    res.w = std::move(w);
    res.converged = true;
    res.gapHistory = {0.0};
    return res;
  }

  ShootResult res;
  CurveTangent acceptedW = w;
  CurveTangent step;
  double acceptedGap = std::numeric_limits<double>::infinity();
  double eta = 1.0;
  int growths = 0;

  for (;;) {
    CurvePath path = exp_map(alpha0, w, m);
    const DiscreteCurve& end = path.curves.back();
    CurveTangent gapField = pointwise_log(end, alpha1);
    const double gap = l2_norm(end, gapField);
    res.gapHistory.push_back(gap);

    if (gap <= tol) {
      res.path = std::move(path);
      res.w = std::move(w);
      res.residual = gap;
      res.converged = true;
      return res;
    }
    if (gap > acceptedGap) {
      // Growth is judged against the previous evaluation so that halving
      // eta, which shrinks the overshoot quadratically, is not misread as
      // divergence while it recovers.
      const std::size_t h = res.gapHistory.size();
      if (h >= 2 && gap > res.gapHistory[h - 2]) {
        if (++growths >= 3)
          throw DivergenceError(
              "geodesic_shoot: endpoint gap grew on 3 consecutive iterations",
              res.gapHistory);
      } else {
        growths = 0;
      }
      if (res.iterations >= maxIter) {
        res.path = std::move(path);
        res.w = std::move(w);
        res.residual = gap;
        res.converged = false;
        return res;
      }
      eta *= 0.5;
      w = acceptedW;
      for (int k = 0; k <= n; ++k) w[k] += eta * step[k];
      ++res.iterations;
      continue;
    }
    growths = 0;
    acceptedGap = gap;
    acceptedW = w;
    if (res.iterations >= maxIter) {
      res.path = std::move(path);
      res.w = std::move(w);
      res.residual = gap;
      res.converged = false;
      return res;
    }
    step = jacobi_inverse(path, gapField);
    for (int k = 0; k <= n; ++k) w[k] += eta * step[k];
    ++res.iterations;
    eta = std::min(1.0, 2.0 * eta);
  }
}

}  // namespace geomatch
