#pragma once

#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "geomatch/curve.hpp"

namespace geomatch {

// Built-in test shapes. Every generator is deterministic; the seeded ones
// draw from std::mt19937_64 only.

// Flat pair: a three-quarter circle against a straight diagonal segment.
std::pair<DiscreteCurve, DiscreteCurve> circle_segment_pair(int n);

// Flat pair: a sine arc against its translate under u, resampled at the
// warped parameter t + warp * sin(pi t). warp in (-1/pi, 1/pi) keeps the
// reparameterization monotone.
std::pair<DiscreteCurve, DiscreteCurve> translated_reparameterized_pair(
    int n, const Vec& u, double warp);

// Spatial pair: a rising bend against one whose turn happens later and
// sharper, in R^3.
std::pair<DiscreteCurve, DiscreteCurve> turn_pair_3d(int n);

// Half-plane pair: a vertical geodesic segment x = 0 against a horizontal
// segment y = 1, both length-parameterized samplings.
std::pair<DiscreteCurve, DiscreteCurve> h2_segment_pair(int n);

// Two bundles of `perGroup` flat curves each: small seeded shape and offset
// perturbations around two bases far apart, so inter-group distances exceed
// intra-group ones by a wide factor. Curves 0..perGroup-1 form group 0.
std::vector<DiscreteCurve> two_bundles(int perGroup, int n, std::uint64_t seed);

// Random flat pair for shooting studies: smooth trigonometric curves in
// R^d, redrawn until every edge's SRV segment (1-s) q0_k + s q1_k keeps
// distance >= 0.4 min(|q0_k|, |q1_k|) from the origin. Pairs violating that
// clearance have their SRV-linear geodesic leave the open curve manifold
// (an edge degenerates), where shooting legitimately stalls.
std::pair<DiscreteCurve, DiscreteCurve> random_flat_pair(std::mt19937_64& rng,
                                                         int n, int d);

// Analytic family of curves c(t, s): curve parameter t in [0,1], path time
// s in [0,1]. Discretizing t at n and s at m gives the discrete energy E^n.
struct SmoothPathFamily {
  ManifoldSpec manifold;
  std::function<Vec(double t, double s)> point;
  std::string name;
};

SmoothPathFamily translating_flat_sinusoids();  // rigid: E = |u|^2/2 at all n
SmoothPathFamily rotating_sphere_arcs();
SmoothPathFamily sliding_h2_arcs();

struct EnergyRow {
  int n = 0;
  double energy = 0.0;
  double error = 0.0;  // |E^n - E^ref|
};

struct EnergyStudy {
  std::vector<EnergyRow> rows;
  double refEnergy = 0.0;
  int refN = 0;  // 4 * nList.back()
  int m = 0;
  double slope = 0.0;  // log-log slope of error vs n; 0 without 2 usable rows
};

// Discrete energies of the family over nList plus the reference proxy
// E^ref = E^{4 n_max} at the same path sampling m, and the least-squares
// log-log slope of |E^n - E^ref| against n over the rows with positive
// error.
EnergyStudy energy_convergence_study(const SmoothPathFamily& family,
                                     const std::vector<int>& nList, int m);

}  // namespace geomatch
