#pragma once

#include <string>
#include <vector>

#include "geomatch/curve.hpp"

namespace geomatch {

struct NamedCurve {
  std::string name;
  DiscreteCurve curve;
};

// Curve container: a JSON manifest with the manifold tag and named CSV
// coordinate blocks, one comma-separated row per point. Floats are written
// with 17 significant digits, so save/load roundtrips field-for-field.
struct CurveFile {
  int format = 1;
  ManifoldSpec manifold;
  std::vector<NamedCurve> curves;
};

// Loads and validates a curve file. Rows must match the manifold dimension;
// sphere rows within 1e-6 of unit norm are renormalized and worse drift is
// rejected; half-plane rows need y > 0; coincident consecutive points are
// rejected unless relaxedEdges holds on a flat manifold. Row errors carry
// the 1-based row number within the offending curve's block.
CurveFile load_curves(const std::string& path, bool relaxedEdges = false);
void save_curves(const std::string& path, const CurveFile& file);

// Curve path as a curve file with one block per sample, named "s=<value>"
// on the uniform grid. Loading checks the path invariants: one manifold,
// shared point count, strictly increasing s.
void save_curve_path(const std::string& path, const CurvePath& p);
CurvePath load_curve_path(const std::string& path, bool relaxedEdges = false);

// Reparameterization table as two-column CSV "t,phi" on t_k = k/n.
void save_phi_table(const std::string& path, const std::vector<double>& phi);

// 17-significant-digit float form used by every artifact writer.
std::string format_float(double x);

}  // namespace geomatch
