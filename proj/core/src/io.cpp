#include "geomatch/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "geomatch/errors.hpp"
#include "geomatch/manifold.hpp"

namespace geomatch {

namespace {

using json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw Error("write to " + path + " failed");
}

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, const std::string& path,
                    long line) {
  const std::string t = trimmed(field);
  if (t.empty()) throw ParseError("empty coordinate", path, line);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || !std::isfinite(v))
    throw ParseError("malformed coordinate '" + t + "'", path, line);
  return v;
}

// One validated point from a CSV row. `line` is 1-based within the block.
Vec parse_row(const std::string& row, const ManifoldSpec& spec,
              const std::string& path, long line) {
  std::vector<double> vals;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = row.find(',', start);
    vals.push_back(
        parse_number(row.substr(start, comma - start), path, line));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (static_cast<int>(vals.size()) != spec.dim)
    throw ParseError("expected " + std::to_string(spec.dim) +
                         " coordinates, got " + std::to_string(vals.size()),
                     path, line);
  Vec v(spec.dim);
  for (int i = 0; i < spec.dim; ++i) v[i] = vals[i];

  switch (spec.kind) {
    case ManifoldKind::Sphere2: {
      const double norm = v.norm();
      if (std::abs(norm - 1.0) >= 1e-6)
        throw ParseError("sphere row drifts off the unit sphere by " +
                             format_float(std::abs(norm - 1.0)),
                         path, line);
      v /= norm;
      break;
    }
    case ManifoldKind::HyperbolicPlane:
      if (v[1] <= 0.0)
        throw ParseError("half-plane row has y <= 0", path, line);
      break;
    case ManifoldKind::Euclidean:
      break;
  }
  return v;
}

DiscreteCurve parse_block(const std::string& block, const ManifoldSpec& spec,
                          bool relaxedEdges, const std::string& path) {
  std::vector<Vec> pts;
  std::size_t start = 0;
  long line = 0;
  while (start <= block.size()) {
    const std::size_t nl = block.find('\n', start);
    const std::string row =
        block.substr(start, nl == std::string::npos ? nl : nl - start);
    const bool last = nl == std::string::npos;
    if (!(last && trimmed(row).empty())) {
      ++line;
      pts.push_back(parse_row(row, spec, path, line));
    }
    if (last) break;
    start = nl + 1;
  }
  if (pts.size() < 2)
    throw ParseError("curve needs at least two points", path, line);

  const bool allowCoincident =
      relaxedEdges && spec.kind == ManifoldKind::Euclidean;
  if (!allowCoincident)
    for (std::size_t k = 1; k < pts.size(); ++k)
      if (pts[k] == pts[k - 1])
        throw ParseError("degenerate edge: point repeats its predecessor",
                         path, static_cast<long>(k + 1));
  return DiscreteCurve(spec, std::move(pts), allowCoincident);
}

}  // namespace

std::string format_float(double x) {
  // Shortest decimal form that strtod parses back to the identical bits.
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

CurveFile load_curves(const std::string& path, bool relaxedEdges) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), path, 0);
  }
  if (!doc.is_object() || !doc.contains("format") ||
      !doc["format"].is_number_integer())
    throw ParseError("manifest needs an integer 'format'", path, 0);
  const int format = doc["format"].get<int>();
  if (format != 1)
    throw ParseError("unsupported format " + std::to_string(format), path, 0);
  if (!doc.contains("manifold") || !doc["manifold"].is_string())
    throw ParseError("manifest needs a 'manifold' tag", path, 0);

  ManifoldSpec spec;
  try {
    spec = ManifoldSpec::from_tag(doc["manifold"].get<std::string>());
  } catch (const Error& e) {
    throw ParseError(e.what(), path, 0);
  }

  if (!doc.contains("curves") || !doc["curves"].is_array() ||
      doc["curves"].empty())
    throw ParseError("manifest needs a non-empty 'curves' array", path, 0);

  CurveFile out{format, spec, {}};
  for (const json& entry : doc["curves"]) {
    if (!entry.is_object() || !entry.contains("name") ||
        !entry["name"].is_string() || !entry.contains("points") ||
        !entry["points"].is_string())
      throw ParseError("curve entries need string 'name' and 'points'", path,
                       0);
    out.curves.push_back(
        {entry["name"].get<std::string>(),
         parse_block(entry["points"].get<std::string>(), spec, relaxedEdges,
                     path)});
  }
  return out;
}

void save_curves(const std::string& path, const CurveFile& file) {
  json doc;
  doc["format"] = file.format;
  doc["manifold"] = file.manifold.tag();
  doc["curves"] = json::array();
  for (const NamedCurve& nc : file.curves) {
    if (nc.curve.manifold != file.manifold)
      throw DomainError("save_curves: curve '" + nc.name +
                        "' is on a different manifold");
    std::string block;
    for (std::size_t k = 0; k < nc.curve.points.size(); ++k) {
      if (k) block += '\n';
      for (int i = 0; i < file.manifold.dim; ++i) {
        if (i) block += ',';
        block += format_float(nc.curve.points[k][i]);
      }
    }
    doc["curves"].push_back({{"name", nc.name}, {"points", block}});
  }
  write_file(path, doc.dump(2) + "\n");
}

void save_curve_path(const std::string& path, const CurvePath& p) {
  CurveFile file{1, p.manifold, {}};
  const int m = p.m();
  file.curves.reserve(m + 1);
  for (int j = 0; j <= m; ++j)
    file.curves.push_back(
        {"s=" + format_float(static_cast<double>(j) / m), p.curves[j]});
  save_curves(path, file);
}

CurvePath load_curve_path(const std::string& path, bool relaxedEdges) {
  const CurveFile file = load_curves(path, relaxedEdges);
  if (file.curves.size() < 2)
    throw ParseError("path file needs at least two samples", path, 0);

  CurvePath p{file.manifold, {}, {}, CurvePath::Kind::Raw};
  double prev = -1.0;
  for (std::size_t j = 0; j < file.curves.size(); ++j) {
    const std::string& name = file.curves[j].name;
    if (name.rfind("s=", 0) != 0)
      throw ParseError("path sample name '" + name + "' lacks the s= prefix",
                       path, static_cast<long>(j + 1));
    char* end = nullptr;
    const double s = std::strtod(name.c_str() + 2, &end);
    if (end != name.c_str() + name.size() || !std::isfinite(s))
      throw ParseError("path sample name '" + name + "' has no numeric s",
                       path, static_cast<long>(j + 1));
    if (s <= prev)
      throw ParseError("path s grid not strictly increasing", path,
                       static_cast<long>(j + 1));
    prev = s;
    if (file.curves[j].curve.n() != file.curves[0].curve.n())
      throw ParseError("path samples disagree on point count", path,
                       static_cast<long>(j + 1));
    p.curves.push_back(file.curves[j].curve);
  }
  return p;
}

void save_phi_table(const std::string& path, const std::vector<double>& phi) {
  if (phi.size() < 2) throw DomainError("save_phi_table: need >= 2 samples");
  const int n = static_cast<int>(phi.size()) - 1;
  std::string text = "t,phi\n";
  for (int k = 0; k <= n; ++k) {
    text += format_float(static_cast<double>(k) / n);
    text += ',';
    text += format_float(phi[k]);
    text += '\n';
  }
  write_file(path, text);
}

}  // namespace geomatch
