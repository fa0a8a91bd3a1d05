#pragma once

#include <string>
#include <vector>

#include "geomatch/curve.hpp"
#include "geomatch/matching.hpp"

namespace geomatch {

// Distance between the shapes of two curves: length of the final geodesic of
// optimal_match, i.e. the distance from alpha0 as parameterized to the best
// reparameterization of alpha1 found. Zero iff that geodesic is degenerate,
// and never above the geodesic length to alpha1 as parameterized. The
// one-sided search makes this only approximately symmetric.
double shape_distance(const DiscreteCurve& alpha0, const DiscreteCurve& alpha1,
                      const MatchConfig& cfg = {});

// Symmetric pairwise distance table: values[i][j] is the mean of the two
// one-sided shape distances, the diagonal is exactly zero.
struct DistanceMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> values;

  int size() const { return static_cast<int>(values.size()); }
};

// Labels default to "0", "1", ... when not supplied.
DistanceMatrix distance_matrix(const std::vector<DiscreteCurve>& curves,
                               const MatchConfig& cfg = {},
                               std::vector<std::string> labels = {});

enum class Linkage { Single, Complete, Average };

// One agglomerative merge. Cluster ids follow the leaves-then-merges
// convention: ids 0..N-1 are the inputs, id N+t is the cluster made by
// merge t.
struct Merge {
  int a = 0, b = 0;     // merged cluster ids, a < b
  double height = 0.0;  // linkage distance at the merge
};

struct Dendrogram {
  int leaves = 0;
  Linkage linkage = Linkage::Average;
  std::vector<Merge> merges;  // leaves-1 entries, heights nondecreasing
};

struct ClusterResult {
  std::vector<int> assignment;  // per-input cluster label
  Dendrogram dendrogram;
};

// Agglomerative clustering of a distance matrix. Distance ties break toward
// the lexicographically smallest (a, b) id pair, so results are fully
// deterministic. Partition labels number clusters by smallest member index.
// cluster stops at k clusters; cluster_at_height applies every merge with
// height <= the cut. Both return the complete dendrogram.
ClusterResult cluster(const DistanceMatrix& matrix, int k,
                      Linkage linkage = Linkage::Average);
ClusterResult cluster_at_height(const DistanceMatrix& matrix, double height,
                                Linkage linkage = Linkage::Average);

// Karcher mean iteration: match the estimate to every sample, average the
// initial velocities of the matched geodesics, step along the mean velocity.
// Samples are replaced by their matched representatives after each round,
// which warm-starts the next one. A step that raises the objective (sum of
// squared distances) beyond 1e-6 is reverted and retried at half length.
struct KarcherConfig {
  MatchConfig match;
  double tol = -1.0;  // <= 0: 1e-4 * mean pairwise geodesic distance, with a
                      // 1e-12 floor for all-identical inputs
  int maxIterations = 30;
  double initialStep = 1.0;
};

struct KarcherResult {
  DiscreteCurve mean;
  int iterations = 0;
  double gradNorm = 0.0;  // elastic norm of the final mean velocity
  bool converged = false;
  std::vector<double> objective;  // accepted objective values per round
};

// A single input is returned unchanged after one trivial round.
KarcherResult karcher_mean(const std::vector<DiscreteCurve>& curves,
                           const KarcherConfig& cfg = {});

}  // namespace geomatch
