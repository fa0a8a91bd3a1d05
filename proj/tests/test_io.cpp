#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include "doctest.h"
#include "geomatch/curve.hpp"
#include "geomatch/errors.hpp"
#include "geomatch/geodesic.hpp"
#include "geomatch/io.hpp"
#include "geomatch/manifold.hpp"

using namespace geomatch;
namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& name) {
  return (fs::temp_directory_path() / ("geomatch_io_" + name)).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::string s((std::istreambuf_iterator<char>(in)),
                std::istreambuf_iterator<char>());
  return s;
}

std::string manifest(const std::string& tag, const std::string& block) {
  return std::string("{\"format\":1,\"manifold\":\"") + tag +
         "\",\"curves\":[{\"name\":\"c\",\"points\":\"" + block + "\"}]}";
}

DiscreteCurve flat_curve(const std::function<Vec(double)>& f, int n) {
  return discretize(ManifoldSpec::euclidean(2), f, n);
}

}  // namespace

TEST_CASE("curve file: save/load roundtrips field-for-field") {
  CurveFile file{1, ManifoldSpec::euclidean(2), {}};
  file.curves.push_back(
      {"alpha", flat_curve(
                    [](double t) {
                      return Vec{{t / 3.0, 0.37 * std::sin(2.1 * t) - 1e-7}};
                    },
                    9)});
  file.curves.push_back(
      {"beta", flat_curve(
                   [](double t) { return Vec{{-5.0 + t * 1e3, t * t}}; }, 4)});

  const std::string path = temp_path("roundtrip.json");
  save_curves(path, file);
  const CurveFile in = load_curves(path);

  CHECK(in.format == file.format);
  CHECK(in.manifold == file.manifold);
  REQUIRE(in.curves.size() == file.curves.size());
  for (std::size_t c = 0; c < file.curves.size(); ++c) {
    CHECK(in.curves[c].name == file.curves[c].name);
    const auto& a = file.curves[c].curve;
    const auto& b = in.curves[c].curve;
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t k = 0; k < a.points.size(); ++k)
      CHECK(a.points[k] == b.points[k]);
  }

  // Deterministic bytes: saving the loaded file reproduces the file exactly.
  const std::string again = temp_path("roundtrip2.json");
  save_curves(again, in);
  CHECK(read_text(again) == read_text(path));
  fs::remove(path);
  fs::remove(again);
}

TEST_CASE("curve file: three euclidean rows make n = 2") {
  const std::string path = temp_path("tiny.json");
  write_text(path, manifest("euclidean:2", "0,0\\n0.5,0.25\\n1,1"));
  const CurveFile in = load_curves(path);
  REQUIRE(in.curves.size() == 1);
  CHECK(in.curves[0].curve.n() == 2);
  CHECK(in.curves[0].curve.points[1][1] == 0.25);
  fs::remove(path);
}

TEST_CASE("curve file: sphere drift handling") {
  const std::string path = temp_path("sphere.json");
  write_text(path, manifest("sphere2", "1,0,0\\n0,0,1.0000001"));
  const CurveFile in = load_curves(path);
  const Vec& p = in.curves[0].curve.points[1];
  CHECK(std::abs(p.norm() - 1.0) < 1e-15);
  CHECK(p[2] == doctest::Approx(1.0).epsilon(1e-12));
  fs::remove(path);

  write_text(path, manifest("sphere2", "1,0,0\\n0,0,1.001"));
  try {
    load_curves(path);
    FAIL("drifting sphere row must be rejected");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.file() == path);
  }
  fs::remove(path);
}

TEST_CASE("curve file: half-plane constraint carries the line number") {
  const std::string path = temp_path("h2.json");
  write_text(path, manifest("hyperbolic2", "0,1\\n0.5,2\\n1,-1"));
  try {
    load_curves(path);
    FAIL("y <= 0 must be rejected");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  fs::remove(path);
}

TEST_CASE("curve file: malformed rows carry the line number") {
  const std::string path = temp_path("bad.json");

  write_text(path, manifest("euclidean:2", "0,0\\n1"));
  try {
    load_curves(path);
    FAIL("wrong coordinate count must be rejected");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }

  write_text(path, manifest("euclidean:2", "0,0\\n0.3,zebra"));
  try {
    load_curves(path);
    FAIL("non-numeric coordinate must be rejected");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  fs::remove(path);
}

TEST_CASE("curve file: degenerate edges rejected in strict mode only") {
  const std::string path = temp_path("degen.json");
  write_text(path, manifest("euclidean:2", "0,0\\n0.5,0\\n0.5,0\\n1,0"));
  try {
    load_curves(path);
    FAIL("strict mode must reject the repeated point");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  const CurveFile relaxed = load_curves(path, true);
  CHECK(relaxed.curves[0].curve.relaxedEdges);
  CHECK(relaxed.curves[0].curve.n() == 3);

  // Relaxed mode stays strict off the flat spaces.
  write_text(path, manifest("hyperbolic2", "0,1\\n0,1\\n1,2"));
  CHECK_THROWS_AS(load_curves(path, true), ParseError);
  fs::remove(path);
}

TEST_CASE("curve file: manifest validation") {
  const std::string path = temp_path("manifest.json");

  write_text(path, "{\"format\":1,\"manifold\":\"euclidean:2\"}");
  CHECK_THROWS_AS(load_curves(path), ParseError);

  write_text(path, manifest("moebius", "0,0\\n1,1"));
  CHECK_THROWS_AS(load_curves(path), ParseError);

  write_text(path, std::string("{\"format\":7,\"manifold\":\"euclidean:2\",") +
                       "\"curves\":[{\"name\":\"c\",\"points\":\"0,0\\n1,1\"}]}");
  CHECK_THROWS_AS(load_curves(path), ParseError);

  write_text(path, "not json at all");
  CHECK_THROWS_AS(load_curves(path), ParseError);

  CHECK_THROWS_AS(load_curves(temp_path("missing_file.json")), Error);
  fs::remove(path);
}

TEST_CASE("curve path: save/load keeps samples and validates the grid") {
  const DiscreteCurve a =
      flat_curve([](double t) { return Vec{{t, 0.2 * t * (1.0 - t)}}; }, 6);
  const DiscreteCurve b = flat_curve(
      [](double t) { return Vec{{t + 0.4, 0.2 * t * (1.0 - t) - 0.3}}; }, 6);
  const CurvePath path = geodesic_shoot(a, b, 5).path;

  const std::string file = temp_path("path.json");
  save_curve_path(file, path);
  const CurvePath in = load_curve_path(file);
  CHECK(in.m() == path.m());
  CHECK(in.n() == path.n());
  for (int j = 0; j <= path.m(); ++j)
    for (int k = 0; k <= path.n(); ++k)
      CHECK(in.curves[j].points[k] == path.curves[j].points[k]);

  // Breaking the s order must fail the invariant check.
  std::string text = read_text(file);
  const std::size_t a0 = text.find("s=0.2");
  const std::size_t a1 = text.find("s=0.8");
  REQUIRE(a0 != std::string::npos);
  REQUIRE(a1 != std::string::npos);
  text.replace(a1, 5, "s=0.1");
  write_text(file, text);
  CHECK_THROWS_AS(load_curve_path(file), ParseError);
  fs::remove(file);
}

TEST_CASE("phi table: exact two-column bytes") {
  const std::string file = temp_path("phi.csv");
  save_phi_table(file, {0.0, 0.3, 1.0});
  CHECK(read_text(file) == "t,phi\n0,0\n0.5,0.3\n1,1\n");
  save_phi_table(file, {0.0, 0.3, 1.0});
  CHECK(read_text(file) == "t,phi\n0,0\n0.5,0.3\n1,1\n");
  CHECK_THROWS_AS(save_phi_table(file, {1.0}), DomainError);
  fs::remove(file);
}
