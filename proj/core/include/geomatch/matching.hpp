#pragma once

#include <utility>
#include <vector>

#include "geomatch/curve.hpp"
#include "geomatch/horizontal.hpp"

namespace geomatch {

// Iterative matching knobs. Non-positive shootTol / upsample select the
// shooting and straightening defaults.
struct MatchConfig {
  int pathSteps = 100;            // geodesic samples per shoot
  double shootTol = -1.0;         // endpoint gap tolerance for shooting
  int shootMaxIter = 50;          // Newton budget per shoot
  double horizontalityTol = 0.05; // stop: max verticality ratio at or below
  double targetMoveTol = 1e-6;    // stop: max pointwise target displacement
  int maxIterations = 50;         // geodesic/straighten rounds
  int upsample = 0;               // fine samples per edge in straightening
};

// Outcome of a matching run. phi samples the reparameterization on the grid
// {k/n} of the first curve; matchedCurve is the second curve resampled so
// the geodesic toward it is (near-)horizontal. lengthHistory holds one
// geodesic length per round and never increases; maxVerticality mirrors it
// with the worst verticality ratio of each geodesic.
struct Matching {
  std::vector<double> phi;  // n+1, nondecreasing, phi[0] = 0, phi[n] = 1
  DiscreteCurve matchedCurve;
  int iterations = 0;
  std::vector<double> lengthHistory;
  std::vector<double> horizontalLengthHistory;  // straightened-path lengths
  std::vector<double> maxVerticality;
  bool converged = false;
  double length = 0.0;  // last entry of lengthHistory
};

struct MatchResult {
  CurvePath path;  // last computed geodesic
  Matching matching;
};

// Alternates geodesic shooting toward the current target with replacing the
// target by the end curve of the geodesic's horizontal part, accumulating
// the reparameterization; each round resamples the original target shape
// through the accumulated map, so iterates stay on that shape exactly.
// Stops when the geodesic is horizontal within cfg.horizontalityTol, the
// target stops moving, the descent stalls (a round that lengthens the
// geodesic is undone and the run ends at its floor), or the round budget
// runs out (reported through converged = false with the partial result). A
// target with a different sample count is first resampled to alpha0's grid
// through its shape spline. Shooting failures propagate.
MatchResult optimal_match(const DiscreteCurve& alpha0,
                          const DiscreteCurve& alpha1,
                          const MatchConfig& cfg = {});

// Dynamic-programming search over grid-monotone reparameterizations. Node
// (i, j) pairs alpha0 up to sample i with the target shape up to parameter
// j/n1; predecessors range over the bottom-left square of side `square`
// (offsets 1 <= a, b < square with gcd(a, b) = 1).
struct DpGrid {
  int n0 = 0, n1 = 0, square = 0;
  std::vector<double> cost;  // (n0+1)(n1+1) row-major, unreachable = +inf
  std::vector<std::pair<int, int>> path;  // chosen nodes, (0,0) .. (n0,n1)
};

DpGrid dp_grid(const DiscreteCurve& alpha0, const DiscreteCurve& alpha1,
               int square = 7);

// Matches by exhaustive grid search instead of iteration: cell transition
// (i-a, j-b) -> (i, j) costs the squared SRV gap between alpha0's edges and
// the target sub-curve resampled to a edges (transported to alpha0's points
// on curved spaces), so the optimal grid path minimizes the chordal elastic
// distance. Returns the target resampled along the recovered
// reparameterization and the geodesic toward it.
MatchResult dp_match(const DiscreteCurve& alpha0, const DiscreteCurve& alpha1,
                     int square = 7, const MatchConfig& cfg = {});

}  // namespace geomatch
