#include "geomatch/matching.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>

#include "geomatch/errors.hpp"
#include "geomatch/geodesic.hpp"
#include "geomatch/spline.hpp"

namespace geomatch {

namespace {

// Piecewise-linear evaluation of node values on the uniform grid {k/n}.
double interp_grid(const std::vector<double>& vals, double t) {
  const int n = static_cast<int>(vals.size()) - 1;
  const double x = std::clamp(t, 0.0, 1.0) * n;
  const int c = std::min(static_cast<int>(x), n - 1);
  const double f = x - c;
  return (1.0 - f) * vals[c] + f * vals[c + 1];
}

DiscreteCurve to_grid(const DiscreteCurve& alpha, int n) {
  if (alpha.n() == n) return alpha;
  const ShapeSpline s = shape_spline(alpha);
  std::vector<double> ts(n + 1);
  for (int k = 0; k <= n; ++k) ts[k] = static_cast<double>(k) / n;
  return s.resample(ts, alpha.relaxedEdges);
}

double max_ratio(const std::vector<double>& r) {
  double worst = 0.0;
  for (double x : r) worst = std::max(worst, x);
  return worst;
}

void check_compatible(const DiscreteCurve& a, const DiscreteCurve& b,
                      const char* who) {
  if (a.manifold.tag() != b.manifold.tag())
    throw DomainError(std::string(who) + ": curves live on " +
                      a.manifold.tag() + " and " + b.manifold.tag());
}

}  // namespace

MatchResult optimal_match(const DiscreteCurve& alpha0,
                          const DiscreteCurve& alpha1,
                          const MatchConfig& cfg) {
  check_compatible(alpha0, alpha1, "optimal_match");
  if (cfg.maxIterations < 1)
    throw DomainError("optimal_match: need maxIterations >= 1");
  const int n = alpha0.n();
  const Manifold M(alpha0.manifold);

  DiscreteCurve target = to_grid(alpha1, n);
  const ShapeSpline targetShape = shape_spline(target);
  std::vector<double> phi(n + 1);
  for (int k = 0; k <= n; ++k) phi[k] = static_cast<double>(k) / n;

  Matching mg{phi, target, 0, {}, {}, {}, false, 0.0};
  std::vector<CurvePath> last;  // holds at most the latest geodesic
  std::vector<CurvePath> prev;  // previous round, for the stall revert
  std::vector<double> prevPhi;
  std::vector<DiscreteCurve> prevTarget;

  for (int it = 1; it <= cfg.maxIterations; ++it) {
    ShootResult shot = geodesic_shoot(alpha0, target, cfg.pathSteps,
                                      cfg.shootTol, cfg.shootMaxIter);
    mg.iterations = it;
    mg.lengthHistory.push_back(path_length(shot.path));
    last.clear();
    last.push_back(std::move(shot.path));

    // Descent stall: the previous round's reparameterization update made the
    // geodesic longer, so the iteration hit the floor of what this
    // discretization resolves. Undo that update and stop there.
    const std::size_t r = mg.lengthHistory.size();
    if (r >= 2 && mg.lengthHistory[r - 1] > mg.lengthHistory[r - 2] + 1e-10) {
      mg.lengthHistory.pop_back();
      mg.iterations = it - 1;
      phi = std::move(prevPhi);
      target = std::move(prevTarget.front());
      last = std::move(prev);
      mg.converged = true;
      break;
    }

    const double vr = max_ratio(verticality_ratio(last.front()));
    mg.maxVerticality.push_back(vr);
    if (!shot.converged) {
      mg.converged = false;  // partial result: budgeted shoot
      break;
    }
    if (vr <= cfg.horizontalityTol) {
      mg.converged = true;
      break;
    }

    const HorizontalPath hor =
        horizontal_part_of_path(last.front(), {cfg.upsample});
    mg.horizontalLengthHistory.push_back(path_length(hor.path));
    prev = last;
    prevPhi = phi;
    prevTarget.clear();
    prevTarget.push_back(target);

    // Accumulate the reparameterization and resample the target through it
    // from the original shape, so iterates never drift off that shape and
    // the fixed endpoints stay exact.
    std::vector<double> next(n + 1);
    next[0] = 0.0;
    next[n] = 1.0;
    for (int k = 1; k < n; ++k) next[k] = interp_grid(phi, hor.endParams[k]);
    std::vector<Vec> pts(n + 1);
    for (int k = 0; k <= n; ++k) pts[k] = targetShape(next[k]);
    DiscreteCurve moved(target.manifold, std::move(pts), target.relaxedEdges);
    double shift = 0.0;
    for (int k = 0; k <= n; ++k)
      shift = std::max(shift, M.dist(moved.points[k], target.points[k]));
    phi = std::move(next);
    target = std::move(moved);
    if (shift < cfg.targetMoveTol) {
      mg.converged = true;
      break;
    }
  }

  mg.phi = std::move(phi);
  mg.matchedCurve = std::move(target);
  mg.length = mg.lengthHistory.back();
  return MatchResult{std::move(last.front()), std::move(mg)};
}

namespace {

struct SubCurveSrv {
  std::vector<Vec> pts;  // a+1 resampled target points
  std::vector<Vec> q;    // a SRV increments in the alpha0 scaling
};

// Target sub-curve from parameter jLow/n1 over b grid cells, resampled to a
// edges. Keyed by (jLow, b, a); independent of the alpha0 row.
const SubCurveSrv& sub_srv(std::unordered_map<std::uint64_t, SubCurveSrv>& memo,
                           const Manifold& M, const ShapeSpline& spline1,
                           int n0, int n1, int square, int jLow, int b,
                           int a) {
  const std::uint64_t key =
      (static_cast<std::uint64_t>(jLow) * square + b) * square + a;
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;

  SubCurveSrv sub;
  sub.pts.resize(a + 1);
  for (int s = 0; s <= a; ++s) {
    const double t = (jLow + static_cast<double>(b * s) / a) / n1;
    sub.pts[s] = spline1(t);
  }
  sub.q.resize(a);
  for (int s = 0; s < a; ++s) {
    const Vec tau = M.log(sub.pts[s], sub.pts[s + 1]);
    const double nt = M.norm(sub.pts[s], tau);
    sub.q[s] = nt == 0.0 ? Vec(Vec::Zero(tau.size()))
                         : Vec(std::sqrt(n0 / nt) * tau);
  }
  return memo.emplace(key, std::move(sub)).first->second;
}

}  // namespace

DpGrid dp_grid(const DiscreteCurve& alpha0, const DiscreteCurve& alpha1,
               int square) {
  check_compatible(alpha0, alpha1, "dp_grid");
  if (square < 2 || square > 64)
    throw DomainError("dp_grid: square must be in [2, 64]");
  const int n0 = alpha0.n(), n1 = alpha1.n();
  const Manifold M(alpha0.manifold);
  const EdgeFrame frame0 = edge_frame(alpha0);
  const ShapeSpline spline1 = shape_spline(alpha1);

  // Coprime offsets, smallest first so exact ties keep the straightest step.
  std::vector<std::pair<int, int>> offsets;
  for (int a = 1; a < square; ++a)
    for (int b = 1; b < square; ++b)
      if (std::gcd(a, b) == 1) offsets.emplace_back(a, b);
  std::sort(offsets.begin(), offsets.end(),
            [](const std::pair<int, int>& l, const std::pair<int, int>& r) {
              return std::make_pair(l.first + l.second, l.first) <
                     std::make_pair(r.first + r.second, r.first);
            });

  DpGrid g;
  g.n0 = n0;
  g.n1 = n1;
  g.square = square;
  const int cols = n1 + 1;
  const double inf = std::numeric_limits<double>::infinity();
  g.cost.assign((n0 + 1) * cols, inf);
  std::vector<std::pair<int, int>> back((n0 + 1) * cols, {0, 0});
  g.cost[0] = M.dist(alpha0.points[0], alpha1.points[0]);
  g.cost[0] *= g.cost[0];

  std::unordered_map<std::uint64_t, SubCurveSrv> memo;
  for (int i = 0; i <= n0; ++i) {
    for (int j = 0; j <= n1; ++j) {
      if (i == 0 && j == 0) continue;
      double& best = g.cost[i * cols + j];
      for (const auto& [a, b] : offsets) {
        if (a > i || b > j) continue;
        const double base = g.cost[(i - a) * cols + (j - b)];
        if (base >= best) continue;  // also skips unreachable predecessors
        const SubCurveSrv& sub =
            sub_srv(memo, M, spline1, n0, n1, square, j - b, b, a);
        double cell = 0.0;
        for (int s = 0; s < a; ++s) {
          const int k = i - a + s;
          const Vec moved =
              M.transport(sub.pts[s], frame0.points[k], sub.q[s]);
          const Vec gap = frame0.q[k] - moved;
          cell += M.inner(frame0.points[k], gap, gap);
        }
        const double total = base + cell / n0;
        if (total < best) {
          best = total;
          back[i * cols + j] = {a, b};
        }
      }
    }
  }

  if (!std::isfinite(g.cost[n0 * cols + n1]))
    throw DomainError("dp_grid: corner unreachable; increase square");
  std::vector<std::pair<int, int>> rev;
  for (int i = n0, j = n1; i != 0 || j != 0;) {
    rev.emplace_back(i, j);
    const auto [a, b] = back[i * cols + j];
    if (a <= 0 || b <= 0)
      throw Error("dp_grid: backtrack left the monotone lattice");
    i -= a;
    j -= b;
  }
  rev.emplace_back(0, 0);
  g.path.assign(rev.rbegin(), rev.rend());
  for (std::size_t t = 1; t < g.path.size(); ++t)
    if (g.path[t].first <= g.path[t - 1].first ||
        g.path[t].second <= g.path[t - 1].second)
      throw Error("dp_grid: recovered path not strictly monotone");
  return g;
}

MatchResult dp_match(const DiscreteCurve& alpha0, const DiscreteCurve& alpha1,
                     int square, const MatchConfig& cfg) {
  const DpGrid g = dp_grid(alpha0, alpha1, square);
  const int n0 = g.n0, n1 = g.n1;
  const ShapeSpline spline1 = shape_spline(alpha1);

  // phi is piecewise linear through the grid nodes of the optimal path.
  std::vector<double> phi(n0 + 1);
  std::size_t seg = 0;
  for (int k = 0; k <= n0; ++k) {
    while (g.path[seg + 1].first < k) ++seg;
    const auto [i0, j0] = g.path[seg];
    const auto [i1, j1] = g.path[seg + 1];
    if (k == i0) {
      phi[k] = static_cast<double>(j0) / n1;
    } else if (k == i1) {
      phi[k] = static_cast<double>(j1) / n1;
    } else {
      const double f = static_cast<double>(k - i0) / (i1 - i0);
      phi[k] = (j0 + f * (j1 - j0)) / n1;
    }
  }
  phi.back() = 1.0;

  std::vector<Vec> pts(n0 + 1);
  for (int k = 0; k <= n0; ++k) pts[k] = spline1(phi[k]);
  DiscreteCurve matched(alpha0.manifold, std::move(pts), alpha1.relaxedEdges);

  ShootResult before = geodesic_shoot(alpha0, to_grid(alpha1, n0),
                                      cfg.pathSteps, cfg.shootTol,
                                      cfg.shootMaxIter);
  ShootResult after = geodesic_shoot(alpha0, matched, cfg.pathSteps,
                                     cfg.shootTol, cfg.shootMaxIter);

  Matching mg{std::move(phi),
              std::move(matched),
              1,
              {path_length(before.path), path_length(after.path)},
              {},
              {max_ratio(verticality_ratio(before.path)),
               max_ratio(verticality_ratio(after.path))},
              before.converged && after.converged,
              0.0};
  mg.length = mg.lengthHistory.back();
  return MatchResult{std::move(after.path), std::move(mg)};
}

}  // namespace geomatch
