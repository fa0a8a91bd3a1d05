#include "cli.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <future>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "geomatch/curve.hpp"
#include "geomatch/errors.hpp"
#include "geomatch/geodesic.hpp"
#include "geomatch/horizontal.hpp"
#include "geomatch/io.hpp"
#include "geomatch/log.hpp"
#include "geomatch/manifold.hpp"
#include "geomatch/matching.hpp"
#include "geomatch/spline.hpp"
#include "geomatch/statistics.hpp"
#include "geomatch/synthetic.hpp"

namespace geomatch::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// Knobs shared by the subcommands; zero maxIterations defers to each
// command's own default (shooting 50, matching rounds 50, mean rounds 30).
struct RunConfig {
  int steps = 100;
  double tol = -1.0;
  int maxIterations = 0;
  int square = 7;
  int upsample = 0;
  bool relaxedEdges = false;
  std::uint64_t seed = 1;
  std::string outDir = ".";
};

void add_common_options(CLI::App& cmd, RunConfig& cfg) {
  cmd.add_option("--steps", cfg.steps, "Geodesic samples m")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--tol", cfg.tol, "Shooting endpoint tolerance")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--max-iter", cfg.maxIterations,
                 "Iteration budget of the top-level algorithm")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--square", cfg.square, "Predecessor square side for dp")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--upsample", cfg.upsample,
                 "Fine samples per edge when straightening")
      ->check(CLI::PositiveNumber);
  cmd.add_flag("--relaxed-edges", cfg.relaxedEdges,
               "Admit repeated consecutive points on flat spaces");
  cmd.add_option("--seed", cfg.seed, "Generator seed");
  cmd.add_option("--out", cfg.outDir, "Output directory");
}

MatchConfig match_config(const RunConfig& cfg) {
  MatchConfig m;
  m.pathSteps = cfg.steps;
  m.shootTol = cfg.tol;
  m.upsample = cfg.upsample;
  if (cfg.maxIterations > 0) m.maxIterations = cfg.maxIterations;
  return m;
}

fs::path out_dir(const RunConfig& cfg) {
  fs::path dir(cfg.outDir);
  fs::create_directories(dir);
  return dir;
}

CurveFile load_file(const std::string& path, const RunConfig& cfg) {
  return load_curves(path, cfg.relaxedEdges);
}

// First curve of a file; the pairwise commands compare file heads.
DiscreteCurve load_head(const std::string& path, const RunConfig& cfg) {
  return load_file(path, cfg).curves.front().curve;
}

// Shooting needs matching grids; a coarser or finer target is resampled
// through its shape spline.
DiscreteCurve to_grid(const DiscreteCurve& curve, int n) {
  if (curve.n() == n) return curve;
  std::vector<double> ts(n + 1);
  for (int k = 0; k <= n; ++k) ts[k] = static_cast<double>(k) / n;
  return shape_spline(curve).resample(ts, curve.relaxedEdges);
}

void write_report(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw Error("write to " + path.string() + " failed");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write to " + path.string() + " failed");
}

void save_pair(const fs::path& path, const ManifoldSpec& spec,
               const DiscreteCurve& a, const DiscreteCurve& b) {
  save_curves(path.string(), CurveFile{1, spec, {{"a", a}, {"b", b}}});
}

json matching_report(const Matching& m) {
  return json{{"length", m.length},
              {"iterations", m.iterations},
              {"converged", m.converged},
              {"lengthHistory", m.lengthHistory},
              {"maxVerticality", m.maxVerticality}};
}

// Artifact bundle of one matching run: final geodesic, phi samples, the
// matched target, and a JSON report under the given stem.
void emit_match(const fs::path& dir, const std::string& stem,
                const MatchResult& r, json report) {
  save_curve_path((dir / (stem + "_path.json")).string(), r.path);
  save_phi_table((dir / (stem + "_phi.csv")).string(), r.matching.phi);
  save_curves((dir / (stem + "_matched.json")).string(),
              CurveFile{1, r.path.manifold,
                        {{"matched", r.matching.matchedCurve}}});
  write_report(dir / (stem + "_report.json"), std::move(report));
}

std::string verticality_csv(const std::vector<const CurvePath*>& paths,
                            const std::vector<std::string>& names) {
  std::string text = "s";
  for (const auto& name : names) text += "," + name;
  text += '\n';
  std::vector<std::vector<double>> cols;
  cols.reserve(paths.size());
  for (const CurvePath* p : paths) cols.push_back(verticality_ratio(*p));
  const std::size_t rows = cols.front().size();
  for (std::size_t j = 0; j < rows; ++j) {
    text += format_float(static_cast<double>(j) / (rows - 1));
    for (const auto& col : cols) {
      text += ',';
      text += j < col.size() ? format_float(col[j]) : "nan";
    }
    text += '\n';
  }
  return text;
}

// Pairwise distances with one async task per unordered pair; entries are
// independent, so the schedule cannot perturb the numbers.
DistanceMatrix distance_matrix_parallel(const std::vector<DiscreteCurve>& curves,
                                        std::vector<std::string> labels,
                                        const MatchConfig& cfg) {
  const int N = static_cast<int>(curves.size());
  if (N < 2) throw DomainError("distance matrix needs >= 2 curves");
  std::vector<std::future<std::pair<double, double>>> tasks;
  tasks.reserve(static_cast<std::size_t>(N) * (N - 1) / 2);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      tasks.push_back(std::async(std::launch::async, [&, i, j] {
        return std::make_pair(shape_distance(curves[i], curves[j], cfg),
                              shape_distance(curves[j], curves[i], cfg));
      }));

  DistanceMatrix out;
  out.labels = std::move(labels);
  out.values.assign(N, std::vector<double>(N, 0.0));
  std::size_t t = 0;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      const auto [dij, dji] = tasks[t++].get();
      out.values[i][j] = out.values[j][i] = 0.5 * (dij + dji);
    }
  return out;
}

std::string matrix_csv(const DistanceMatrix& mx) {
  std::string text = "label";
  for (const auto& l : mx.labels) text += "," + l;
  text += '\n';
  for (int i = 0; i < mx.size(); ++i) {
    text += mx.labels[i];
    for (int j = 0; j < mx.size(); ++j)
      text += "," + format_float(mx.values[i][j]);
    text += '\n';
  }
  return text;
}

DistanceMatrix matrix_from_file(const std::string& input, const RunConfig& cfg,
                                const fs::path& dir) {
  const CurveFile file = load_file(input, cfg);
  std::vector<DiscreteCurve> curves;
  std::vector<std::string> labels;
  for (const auto& nc : file.curves) {
    curves.push_back(nc.curve);
    labels.push_back(nc.name);
  }
  DistanceMatrix mx =
      distance_matrix_parallel(curves, std::move(labels), match_config(cfg));
  write_text(dir / "distance_matrix.csv", matrix_csv(mx));
  return mx;
}

int cmd_geodesic(const std::string& a, const std::string& b,
                 const RunConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const DiscreteCurve alpha0 = load_head(a, cfg);
  const DiscreteCurve alpha1 = to_grid(load_head(b, cfg), alpha0.n());
  const int maxIter = cfg.maxIterations > 0 ? cfg.maxIterations : 50;
  const ShootResult r =
      geodesic_shoot(alpha0, alpha1, cfg.steps, cfg.tol, maxIter);
  save_curve_path((dir / "geodesic_path.json").string(), r.path);
  write_report(dir / "geodesic_report.json",
               json{{"command", "geodesic"},
                    {"length", path_length(r.path)},
                    {"iterations", r.iterations},
                    {"residual", r.residual},
                    {"converged", r.converged}});
  return 0;
}

int cmd_match(const std::string& a, const std::string& b,
              const RunConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const MatchResult r =
      optimal_match(load_head(a, cfg), load_head(b, cfg), match_config(cfg));
  json report = matching_report(r.matching);
  report["command"] = "match";
  emit_match(dir, "match", r, std::move(report));
  write_text(dir / "match_verticality.csv",
             verticality_csv({&r.path}, {"matched"}));
  return 0;
}

int cmd_dp_match(const std::string& a, const std::string& b,
                 const RunConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const MatchResult r = dp_match(load_head(a, cfg), load_head(b, cfg),
                                 cfg.square, match_config(cfg));
  json report = matching_report(r.matching);
  report["command"] = "dp-match";
  report["square"] = cfg.square;
  emit_match(dir, "dp", r, std::move(report));
  return 0;
}

// Unmatched geodesic against both matchers, with the verticality traces of
// the unmatched and optimally matched paths as one plot series.
int cmd_compare(const std::string& a, const std::string& b,
                const RunConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const DiscreteCurve alpha0 = load_head(a, cfg);
  const DiscreteCurve alpha1 = to_grid(load_head(b, cfg), alpha0.n());
  const MatchConfig mcfg = match_config(cfg);

  auto omTask = std::async(std::launch::async,
                           [&] { return optimal_match(alpha0, alpha1, mcfg); });
  auto dpTask = std::async(std::launch::async, [&] {
    return dp_match(alpha0, alpha1, cfg.square, mcfg);
  });
  const ShootResult unmatched =
      geodesic_shoot(alpha0, alpha1, cfg.steps, cfg.tol);
  const MatchResult om = omTask.get();
  const MatchResult dp = dpTask.get();

  const double lu = path_length(unmatched.path);
  const double lo = om.matching.length;
  const double ld = dp.matching.length;
  save_curve_path((dir / "compare_unmatched_path.json").string(),
                  unmatched.path);
  save_curve_path((dir / "compare_matched_path.json").string(), om.path);
  save_phi_table((dir / "compare_phi.csv").string(), om.matching.phi);
  write_text(dir / "compare_verticality.csv",
             verticality_csv({&unmatched.path, &om.path},
                             {"unmatched", "matched"}));
  write_report(dir / "compare_report.json",
               json{{"command", "compare"},
                    {"unmatchedLength", lu},
                    {"matchedLength", lo},
                    {"dpLength", ld},
                    {"relativeGap", std::abs(lo - ld) / ld},
                    {"iterations", om.matching.iterations},
                    {"converged", om.matching.converged}});
  return 0;
}

int cmd_dist(const std::string& input, const RunConfig& cfg) {
  matrix_from_file(input, cfg, out_dir(cfg));
  return 0;
}

int cmd_mean(const std::string& input, const RunConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const CurveFile file = load_file(input, cfg);
  std::vector<DiscreteCurve> curves;
  for (const auto& nc : file.curves) curves.push_back(nc.curve);
  KarcherConfig kcfg;
  kcfg.match = match_config(cfg);
  if (cfg.maxIterations > 0) kcfg.maxIterations = cfg.maxIterations;
  const KarcherResult r = karcher_mean(curves, kcfg);
  save_curves((dir / "mean_curve.json").string(),
              CurveFile{1, file.manifold, {{"mean", r.mean}}});
  write_report(dir / "mean_report.json",
               json{{"command", "mean"},
                    {"iterations", r.iterations},
                    {"converged", r.converged},
                    {"gradNorm", r.gradNorm},
                    {"objective", r.objective}});
  return 0;
}

int cmd_cluster(const std::string& input, int k, const std::string& linkage,
                const RunConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const DistanceMatrix mx = matrix_from_file(input, cfg, dir);
  const Linkage link = linkage == "single"     ? Linkage::Single
                       : linkage == "complete" ? Linkage::Complete
                                               : Linkage::Average;
  const ClusterResult r = cluster(mx, k, link);

  std::string assign = "label,cluster\n";
  for (int i = 0; i < mx.size(); ++i)
    assign += mx.labels[i] + "," + std::to_string(r.assignment[i]) + "\n";
  write_text(dir / "clusters.csv", assign);

  std::string dend = "a,b,height\n";
  for (const Merge& m : r.dendrogram.merges)
    dend += std::to_string(m.a) + "," + std::to_string(m.b) + "," +
            format_float(m.height) + "\n";
  write_text(dir / "dendrogram.csv", dend);
  return 0;
}

struct GenOptions {
  int n = 30;
  int perGroup = 5;
  int dim = 2;
  double warp = 0.15;
};

int cmd_gen(const std::string& family, const GenOptions& opt,
            const RunConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const fs::path path = dir / (family + ".json");
  if (family == "two-bundles") {
    const std::vector<DiscreteCurve> curves =
        two_bundles(opt.perGroup, opt.n > 12 ? 12 : opt.n, cfg.seed);
    CurveFile file{1, curves.front().manifold, {}};
    for (std::size_t i = 0; i < curves.size(); ++i) {
      const std::size_t g = i / opt.perGroup;
      file.curves.push_back({"g" + std::to_string(g) + "_" +
                                 std::to_string(i % opt.perGroup),
                             curves[i]});
    }
    save_curves(path.string(), file);
    return 0;
  }

  std::pair<DiscreteCurve, DiscreteCurve> pair = [&] {
    if (family == "circle-segment") return circle_segment_pair(opt.n);
    if (family == "translated-reparameterized")
      return translated_reparameterized_pair(opt.n, Vec{{0.3, 0.5}}, opt.warp);
    if (family == "turn-3d") return turn_pair_3d(opt.n);
    if (family == "h2-segments") return h2_segment_pair(opt.n);
    if (family == "random-pair") {
      std::mt19937_64 rng(cfg.seed);
      return random_flat_pair(rng, opt.n, opt.dim);
    }
    throw DomainError("unknown family '" + family + "'");
  }();
  save_pair(path, pair.first.manifold, pair.first, pair.second);
  return 0;
}

int cmd_converge(const std::string& family, const RunConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const SmoothPathFamily fam = family == "flat"     ? translating_flat_sinusoids()
                               : family == "sphere" ? rotating_sphere_arcs()
                               : family == "h2"
                                   ? sliding_h2_arcs()
                                   : throw DomainError("unknown family '" +
                                                       family + "'");
  const EnergyStudy study =
      energy_convergence_study(fam, {8, 16, 32, 64}, cfg.steps);

  std::string table = "n,energy,error\n";
  for (const EnergyRow& row : study.rows)
    table += std::to_string(row.n) + "," + format_float(row.energy) + "," +
             format_float(row.error) + "\n";
  write_text(dir / ("convergence_" + family + ".csv"), table);
  write_report(dir / ("convergence_" + family + "_report.json"),
               json{{"command", "converge"},
                    {"family", fam.name},
                    {"m", study.m},
                    {"refN", study.refN},
                    {"refEnergy", study.refEnergy},
                    {"slope", study.slope}});
  return 0;
}

void print_error(const std::string& type, const std::string& message,
                 json extra = json::object()) {
  json rec{{"error", {{"type", type}, {"message", message}}}};
  for (auto& [key, value] : extra.items()) rec["error"][key] = value;
  std::fprintf(stderr, "%s\n", rec.dump().c_str());
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"Elastic geodesics, matchings and means of discrete curves"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string fileA, fileB, input, family;
  int k = 2;
  std::string linkage = "average";
  GenOptions gen;

  auto pair_cmd = [&](const std::string& name, const std::string& desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->add_option("a", fileA, "First curve file")->required();
    cmd->add_option("b", fileB, "Second curve file")->required();
    add_common_options(*cmd, cfg);
    return cmd;
  };
  auto set_cmd = [&](const std::string& name, const std::string& desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->add_option("input", input, "Curve collection file")->required();
    add_common_options(*cmd, cfg);
    return cmd;
  };

  CLI::App* cGeodesic =
      pair_cmd("geodesic", "Shoot the geodesic between two curves");
  CLI::App* cMatch =
      pair_cmd("match", "Optimal matching by horizontal straightening");
  CLI::App* cDp = pair_cmd("dp-match", "Optimal matching by grid search");
  CLI::App* cCompare =
      pair_cmd("compare", "Unmatched vs matched vs dp geodesics");
  CLI::App* cDist = set_cmd("dist", "Pairwise shape distance matrix");
  CLI::App* cMean = set_cmd("mean", "Karcher mean of a curve collection");
  CLI::App* cCluster = set_cmd("cluster", "Agglomerative clustering");
  cCluster->add_option("--k", k, "Cluster count")->check(CLI::PositiveNumber);
  cCluster->add_option("--linkage", linkage, "Linkage rule")
      ->check(CLI::IsMember({"single", "complete", "average"}));

  CLI::App* cGen = app.add_subcommand("gen", "Write a synthetic curve file");
  cGen->add_option("family", family,
                   "circle-segment | translated-reparameterized | turn-3d | "
                   "h2-segments | two-bundles | random-pair")
      ->required();
  cGen->add_option("--n", gen.n, "Edges per curve")->check(CLI::PositiveNumber);
  cGen->add_option("--per-group", gen.perGroup, "Curves per bundle")
      ->check(CLI::PositiveNumber);
  cGen->add_option("--dim", gen.dim, "Ambient dimension of random pairs")
      ->check(CLI::Range(2, 16));
  cGen->add_option("--warp", gen.warp, "Reparameterization strength");
  add_common_options(*cGen, cfg);

  CLI::App* cConverge =
      app.add_subcommand("converge", "Discrete energy convergence study");
  cConverge->add_option("family", family, "flat | sphere | h2")->required();
  add_common_options(*cConverge, cfg);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // help request
    print_error("UsageError", e.what());
    return e.get_exit_code();
  }

  try {
    if (cGeodesic->parsed()) return cmd_geodesic(fileA, fileB, cfg);
    if (cMatch->parsed()) return cmd_match(fileA, fileB, cfg);
    if (cDp->parsed()) return cmd_dp_match(fileA, fileB, cfg);
    if (cCompare->parsed()) return cmd_compare(fileA, fileB, cfg);
    if (cDist->parsed()) return cmd_dist(input, cfg);
    if (cMean->parsed()) return cmd_mean(input, cfg);
    if (cCluster->parsed()) return cmd_cluster(input, k, linkage, cfg);
    if (cGen->parsed()) return cmd_gen(family, gen, cfg);
    if (cConverge->parsed()) return cmd_converge(family, cfg);
  } catch (const ParseError& e) {
    print_error("ParseError", e.what(),
                json{{"file", e.file()}, {"line", e.line()}});
    return 1;
  } catch (const Error& e) {
    print_error("Error", e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("InternalError", e.what());
    return 1;
  }
  return 0;
}

}  // namespace geomatch::cli
