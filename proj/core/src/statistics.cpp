#include "geomatch/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "geomatch/errors.hpp"
#include "geomatch/geodesic.hpp"
#include "geomatch/log.hpp"
#include "geomatch/spline.hpp"

namespace geomatch {

namespace {

DiscreteCurve to_grid(const DiscreteCurve& alpha, int n) {
  if (alpha.n() == n) return alpha;
  std::vector<double> ts(n + 1);
  for (int k = 0; k <= n; ++k) ts[k] = static_cast<double>(k) / n;
  return shape_spline(alpha).resample(ts, alpha.relaxedEdges);
}

void check_same_manifold(const std::vector<DiscreteCurve>& curves,
                         const char* where) {
  for (std::size_t i = 1; i < curves.size(); ++i)
    if (curves[i].manifold.tag() != curves.front().manifold.tag())
      throw DomainError(std::string(where) + ": curves on different manifolds");
}

void check_square(const DistanceMatrix& mx, const char* where) {
  const int n = mx.size();
  if (n < 2) throw DomainError(std::string(where) + ": need at least two items");
  for (const auto& row : mx.values)
    if (static_cast<int>(row.size()) != n)
      throw DomainError(std::string(where) + ": matrix is not square");
}

double linkage_dist(const DistanceMatrix& mx, const std::vector<int>& A,
                    const std::vector<int>& B, Linkage lk) {
  double acc = lk == Linkage::Single ? std::numeric_limits<double>::infinity()
               : lk == Linkage::Complete ? -std::numeric_limits<double>::infinity()
                                         : 0.0;
  for (int i : A)
    for (int j : B) {
      const double d = mx.values[i][j];
      switch (lk) {
        case Linkage::Single: acc = std::min(acc, d); break;
        case Linkage::Complete: acc = std::max(acc, d); break;
        case Linkage::Average: acc += d; break;
      }
    }
  if (lk == Linkage::Average) acc /= static_cast<double>(A.size() * B.size());
  return acc;
}

Dendrogram agglomerate(const DistanceMatrix& mx, Linkage lk) {
  const int N = mx.size();
  std::vector<std::vector<int>> members(2 * N - 1);
  for (int i = 0; i < N; ++i) members[i] = {i};
  std::vector<int> act(N);
  std::iota(act.begin(), act.end(), 0);

  Dendrogram dend{N, lk, {}};
  for (int t = 0; t + 1 < N; ++t) {
    // act is ascending, so the scan meets pairs in lexicographic (a, b)
    // order and the strict < keeps the smallest pair on ties.
    int bi = -1, bj = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p + 1 < act.size(); ++p)
      for (std::size_t q = p + 1; q < act.size(); ++q) {
        const double d = linkage_dist(mx, members[act[p]], members[act[q]], lk);
        if (d < bd) {
          bd = d;
          bi = act[p];
          bj = act[q];
        }
      }
    const int id = N + t;
    std::merge(members[bi].begin(), members[bi].end(), members[bj].begin(),
               members[bj].end(), std::back_inserter(members[id]));
    act.erase(std::remove_if(act.begin(), act.end(),
                             [&](int a) { return a == bi || a == bj; }),
              act.end());
    act.push_back(id);
    dend.merges.push_back({bi, bj, bd});
  }
  return dend;
}

// Partition after the first `applied` merges; labels follow the smallest
// member index of each remaining cluster.
std::vector<int> cut_assignment(const Dendrogram& dend, int applied) {
  const int N = dend.leaves;
  std::vector<std::vector<int>> members(N + applied);
  std::vector<char> consumed(N + applied, 0);
  for (int i = 0; i < N; ++i) members[i] = {i};
  for (int t = 0; t < applied; ++t) {
    const Merge& mg = dend.merges[t];
    std::merge(members[mg.a].begin(), members[mg.a].end(),
               members[mg.b].begin(), members[mg.b].end(),
               std::back_inserter(members[N + t]));
    consumed[mg.a] = consumed[mg.b] = 1;
  }
  std::vector<std::pair<int, int>> order;  // (smallest member, cluster id)
  for (int id = 0; id < N + applied; ++id)
    if (!consumed[id]) order.emplace_back(members[id].front(), id);
  std::sort(order.begin(), order.end());

  std::vector<int> assignment(N, -1);
  for (std::size_t rank = 0; rank < order.size(); ++rank)
    for (int leaf : members[order[rank].second])
      assignment[leaf] = static_cast<int>(rank);
  return assignment;
}

DiscreteCurve stepped(const DiscreteCurve& base, const CurveTangent& w,
                      double scale, int m) {
  CurveTangent s = w;
  for (int k = 0; k < s.size(); ++k) s[k] *= scale;
  return exp_map(base, s, m).curves.back();
}

}  // namespace

double shape_distance(const DiscreteCurve& alpha0, const DiscreteCurve& alpha1,
                      const MatchConfig& cfg) {
  return optimal_match(alpha0, alpha1, cfg).matching.length;
}

DistanceMatrix distance_matrix(const std::vector<DiscreteCurve>& curves,
                               const MatchConfig& cfg,
                               std::vector<std::string> labels) {
  const int N = static_cast<int>(curves.size());
  if (N < 2) throw DomainError("distance_matrix: need at least two curves");
  check_same_manifold(curves, "distance_matrix");
  if (labels.empty()) {
    labels.resize(N);
    for (int i = 0; i < N; ++i) labels[i] = std::to_string(i);
  }
  if (static_cast<int>(labels.size()) != N)
    throw DomainError("distance_matrix: label count does not match curves");

  DistanceMatrix mx{std::move(labels),
                    std::vector<std::vector<double>>(
                        N, std::vector<double>(N, 0.0))};
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      const double dij = shape_distance(curves[i], curves[j], cfg);
      const double dji = shape_distance(curves[j], curves[i], cfg);
      mx.values[i][j] = mx.values[j][i] = 0.5 * (dij + dji);
    }
  return mx;
}

ClusterResult cluster(const DistanceMatrix& matrix, int k, Linkage linkage) {
  check_square(matrix, "cluster");
  const int N = matrix.size();
  if (k < 1 || k > N) throw DomainError("cluster: k outside [1, items]");
  Dendrogram dend = agglomerate(matrix, linkage);
  return {cut_assignment(dend, N - k), std::move(dend)};
}

ClusterResult cluster_at_height(const DistanceMatrix& matrix, double height,
                                Linkage linkage) {
  check_square(matrix, "cluster_at_height");
  Dendrogram dend = agglomerate(matrix, linkage);
  int applied = 0;
  while (applied < static_cast<int>(dend.merges.size()) &&
         dend.merges[applied].height <= height)
    ++applied;
  return {cut_assignment(dend, applied), std::move(dend)};
}

KarcherResult karcher_mean(const std::vector<DiscreteCurve>& curves,
                           const KarcherConfig& cfg) {
  const int N = static_cast<int>(curves.size());
  if (N < 1) throw DomainError("karcher_mean: need at least one curve");
  if (cfg.maxIterations < 1 || cfg.initialStep <= 0.0)
    throw DomainError("karcher_mean: nonpositive budget or step");
  check_same_manifold(curves, "karcher_mean");

  KarcherResult out{curves.front()};
  if (N == 1) {
    out.iterations = 1;
    out.converged = true;
    out.objective = {0.0};
    return out;
  }

  double tol = cfg.tol;
  if (tol <= 0.0) {
    // Tolerance scale: mean pairwise geodesic distance of the inputs as
    // parameterized, with a floor so all-identical inputs still converge.
    double sum = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) {
        const DiscreteCurve onGrid = to_grid(curves[j], curves[i].n());
        sum += path_length(geodesic_shoot(curves[i], onGrid,
                                          cfg.match.pathSteps, cfg.match.shootTol,
                                          cfg.match.shootMaxIter)
                               .path);
      }
    tol = std::max(1e-4 * sum / (0.5 * N * (N - 1)), 1e-12);
  }

  std::vector<DiscreteCurve> reps = curves;
  DiscreteCurve mean = curves.front();
  DiscreteCurve prevMean = mean;
  CurveTangent prevW;
  bool havePrev = false;
  double step = cfg.initialStep;

  for (int it = 1; it <= cfg.maxIterations; ++it) {
    out.iterations = it;
    double obj = 0.0;
    CurveTangent wbar = CurveTangent::zero(mean);
    for (int i = 0; i < N; ++i) {
      MatchResult r = optimal_match(mean, reps[i], cfg.match);
      obj += r.matching.length * r.matching.length;
      const CurveTangent& wi = r.path.velocities.front();
      for (int k = 0; k < wbar.size(); ++k) wbar[k] += wi[k] / N;
      reps[i] = r.matching.matchedCurve;
    }
    if (havePrev && obj > out.objective.back() + 1e-6) {
      // The step overshot: retry from the previous estimate at half length.
      // With the budget spent, fall back to that estimate instead; gradNorm
      // and objective still describe it.
      step *= 0.5;
      log_line(LogLevel::Warn,
               "karcher_mean: objective rose to " + std::to_string(obj) +
                   ", halving step to " + std::to_string(step));
      mean = it < cfg.maxIterations
                 ? stepped(prevMean, prevW, step, cfg.match.pathSteps)
                 : prevMean;
      continue;
    }
    out.objective.push_back(obj);
    out.gradNorm = std::sqrt(metric_gn(mean, wbar, wbar));
    if (out.gradNorm < tol) {
      out.converged = true;
      break;
    }
    if (it == cfg.maxIterations) break;  // keep the evaluated estimate
    prevMean = mean;
    prevW = wbar;
    havePrev = true;
    mean = stepped(mean, wbar, step, cfg.match.pathSteps);
  }
  out.mean = std::move(mean);
  if (!out.converged)
    log_line(LogLevel::Info,
             "karcher_mean: budget exhausted, gradient norm " +
                 std::to_string(out.gradNorm));
  return out;
}

}  // namespace geomatch
