#include <catch2/catch_amalgamated.hpp>

#include <pqcausal/cli.hpp>
#include <pqcausal/io.hpp>
#include <pqcausal/svg.hpp>
#include <pqcausal/verify.hpp>

#include <algorithm>
#include <filesystem>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"

using namespace pqcausal;
using testutil::bitwise_equal;
using testutil::mat;
using testutil::vec;

namespace {

namespace fs = std::filesystem;

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "pqcausal_io_tests";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string stage(const std::string& name, const json& file) {
  const fs::path p = workdir() / name;
  write_text_file(p.string(), file.dump(2) + "\n");
  return p.string();
}

struct CliRun {
  int exit_code = 0;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.exit_code = run_cli(std::move(args), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Wall time is the one legitimately nondeterministic report field.
std::string drop_wall_time(const std::string& text) {
  std::istringstream in(text);
  std::string line, kept;
  while (std::getline(in, line))
    if (line.find("wall_time_s") == std::string::npos) kept += line + "\n";
  return kept;
}

}  // namespace

TEST_CASE("instance envelope round-trips and rejects malformed files") {
  const json file = wrap_instance("metric", json{{"p", 1}});
  CHECK(file.at("version") == 1);
  CHECK(file.at("kind") == "metric");
  CHECK(unwrap_instance(file, "metric") == json{{"p", 1}});

  CHECK_THROWS_AS(unwrap_instance(file, "samples"), file_format_error);
  CHECK_THROWS_AS(unwrap_instance(json::array(), "metric"),
                  file_format_error);
  CHECK_THROWS_AS(unwrap_instance(json{{"version", 2}, {"kind", "metric"},
                                           {"payload", json::object()}},
                                      "metric"),
                  file_format_error);
  CHECK_THROWS_AS(unwrap_instance(json{{"version", 1}, {"kind", "metric"}},
                                      "metric"),
                  file_format_error);
}

TEST_CASE("metric and samples payloads round-trip bitwise") {
  const PseudoMetric g(2, 1, vec({1.25, 0.5}), vec({3}));
  const PseudoMetric g2 = metric_from_json(metric_to_json(g));
  CHECK(g2.p == 2);
  CHECK(g2.q == 1);
  CHECK(bitwise_equal(g2.spatial_weights, g.spatial_weights));
  CHECK(bitwise_equal(g2.temporal_weights, g.temporal_weights));
  CHECK_THROWS_AS(metric_from_json(json{{"p", 1}}), file_format_error);

  const GraphSamples s(mat(2, 1, {0, 1}), mat(2, 2, {0.5, 0, 1, 0.25}));
  const GraphSamples s2 = samples_from_json(samples_to_json(s));
  CHECK(bitwise_equal(s2.sources, s.sources));
  CHECK(bitwise_equal(s2.targets, s.targets));
}

TEST_CASE("map payloads accept three spellings") {
  const json affine = {{"affine", {{"A", json::array({json::array({0.5})})},
                                   {"b", json::array({1.0})}}}};
  const LipMap m1 = map_from_json(affine);
  CHECK(m1.is_affine());
  CHECK(m1.eval(vec({2}))(0) == 2.0);

  const json constant = {{"constant", json::array({1.0, -2.0})},
                         {"source_dim", 3}};
  const LipMap m2 = map_from_json(constant);
  CHECK(m2.certified_constant() == 0.0);
  CHECK(bitwise_equal(m2.eval(vec({5, 6, 7})), vec({1, -2})));

  const json samples = samples_to_json(
      GraphSamples(mat(2, 1, {0, 2}), mat(2, 1, {0, 1})));
  const LipMap m3 = map_from_json(samples);
  CHECK_FALSE(m3.is_affine());
  CHECK(m3.certified_constant() == 0.5);  // inferred from the data

  json pinned = samples;
  pinned["lipschitz"] = 0.8;
  CHECK(map_from_json(pinned).certified_constant() == 0.8);

  // Serialization inverts evaluation for both representations.
  const LipMap m1b = map_from_json(map_to_json(m1));
  CHECK(bitwise_equal(m1b.eval(vec({2})), m1.eval(vec({2}))));
  const LipMap m3b = map_from_json(map_to_json(m3));
  CHECK(bitwise_equal(m3b.eval(vec({1.3})), m3.eval(vec({1.3}))));

  CHECK_THROWS_AS(map_from_json(json{{"affine", {{"A", 3}}}}),
                  file_format_error);
}

TEST_CASE("grid, problem, and solution payloads round-trip") {
  const json box_spec = {{"shape", "box"},
                         {"lo", json::array({0.0, 0.0})},
                         {"hi", json::array({1.0, 1.0})},
                         {"nodes_per_axis", 3}};
  const GridBase g = grid_from_json(box_spec);
  CHECK(g.count() == 9);
  CHECK(g.same_layout(*std::make_shared<GridBase>(
      GridBase::box(vec({0, 0}), vec({1, 1}), 3))));

  const json ball_spec = {{"shape", "ball"},
                          {"center", json::array({0.0, 0.0})},
                          {"radius", 1.0},
                          {"h", 0.45}};
  CHECK(grid_from_json(ball_spec).count() == 13);
  CHECK_THROWS_AS(grid_from_json(json{{"shape", "torus"}}),
                  file_format_error);

  const json problem = {
      {"base", box_spec},
      {"metric", metric_to_json(PseudoMetric::standard(1, 2))},
      {"boundary", map_to_json(LipMap(mat(1, 2, {0.5, 0}), vec({0})))},
      {"solver", {{"stop_tol", 1e-8}, {"patience", 7}}}};
  const ProblemFile pf = problem_from_json(problem);
  CHECK(pf.problem.solver.stop_tol == 1e-8);
  CHECK(pf.problem.solver.patience == 7);
  CHECK(pf.problem.solver.max_iter == SolverParams{}.max_iter);

  const PlateauSolution sol = solve_plateau(pf.problem);
  const json sol_payload = solution_to_json(pf.base_spec, sol);
  const SurfaceFile sf = surface_from_json(sol_payload);
  CHECK(sf.section.base->same_layout(*pf.problem.base));
  CHECK(bitwise_equal(sf.section.values, sol.section.values));
}

TEST_CASE("file reading failures raise format errors") {
  CHECK_THROWS_AS(read_json_file((workdir() / "missing.json").string()),
                  file_format_error);
  const fs::path bad = workdir() / "bad.json";
  write_text_file(bad.string(), "{not json");
  CHECK_THROWS_AS(read_json_file(bad.string()), file_format_error);
}

TEST_CASE("rendering is deterministic and row-exact") {
  const FlatDiamond d(1, 1);
  const std::string svg1 = svg_diamond_slice(d, 0, 0, vec({0, 0}), 16);
  const std::string svg2 = svg_diamond_slice(d, 0, 0, vec({0, 0}), 16);
  CHECK(svg1 == svg2);
  CHECK(svg1.find("<svg") != std::string::npos);
  CHECK(svg1.find("</svg>") != std::string::npos);
  CHECK(svg1.find("<polyline") != std::string::npos);

  const std::string csv = csv_diamond_slice(d, 0, 0, vec({0, 0}), 16);
  CHECK(static_cast<int>(std::count(csv.begin(), csv.end(), '\n')) ==
        1 + 16 * 16);
  CHECK(csv.rfind("x_plus,x_minus,member\n", 0) == 0);

  auto base = std::make_shared<GridBase>(
      GridBase::box(vec({0, 0}), vec({1, 1}), 3));
  const GridSection flat(base, Mat::Constant(9, 1, 0.25));
  CHECK(svg_section_heightfield(flat).find("<rect") != std::string::npos);

  auto line = std::make_shared<GridBase>(GridBase::box(vec({0}), vec({1}), 5));
  const GridSection ramp(line, mat(5, 1, {0, 0.1, 0.2, 0.3, 0.4}));
  CHECK(svg_section_heightfield(ramp).find("<polyline") != std::string::npos);
}

TEST_CASE("cli classifies with inline metrics and exits zero") {
  const CliRun r =
      cli({"classify", "--p", "1", "--q", "1", "--vector", "0.5,1"});
  CHECK(r.exit_code == kExitOk);
  CHECK(r.out.find("timelike") != std::string::npos);

  const CliRun seg = cli({"classify", "--p", "1", "--q", "1", "--from", "0,0",
                          "--to", "2,1"});
  CHECK(seg.exit_code == kExitOk);
  CHECK(seg.out.find("spacelike") != std::string::npos);

  const CliRun sub = cli({"classify", "--p", "2", "--q", "2", "--basis",
                          "1,0,0,0", "--basis", "0,0,1,0"});
  CHECK(sub.exit_code == kExitOk);
  CHECK(sub.out.find("mixed") != std::string::npos);
}

TEST_CASE("cli reads metric files and reports exit codes by failure class") {
  const std::string metric = stage(
      "metric.json",
      wrap_instance("metric",
                        metric_to_json(PseudoMetric::standard(1, 1))));
  CHECK(cli({"classify", "--metric", metric, "--vector", "1,1"}).exit_code ==
        kExitOk);

  // Usage errors: no subcommand, an unknown one, and unknown flags.
  CHECK(cli({}).exit_code == kExitUsage);
  CHECK(cli({"frobnicate"}).exit_code == kExitUsage);
  CHECK(cli({"classify", "--bogus", "1"}).exit_code == kExitUsage);

  // Help is not an error.
  CHECK(cli({"--help"}).exit_code == kExitOk);
  CHECK(cli({"classify", "--help"}).exit_code == kExitOk);

  // Invalid values in an otherwise well-formed invocation.
  CHECK(cli({"classify", "--p", "1", "--q", "1", "--vector", "1,x"})
            .exit_code == kExitInvalid);
  CHECK(cli({"classify", "--p", "1", "--q", "1", "--vector", "1,2,3"})
            .exit_code == kExitInvalid);

  // File problems: missing, wrong envelope version, wrong kind.
  CHECK(cli({"classify", "--metric", (workdir() / "nope.json").string(),
             "--vector", "1,1"})
            .exit_code == kExitFileFormat);
  json wrong_version =
      wrap_instance("metric",
                        metric_to_json(PseudoMetric::standard(1, 1)));
  wrong_version["version"] = 99;
  CHECK(cli({"classify", "--metric", stage("wrongver.json", wrong_version),
             "--vector", "1,1"})
            .exit_code == kExitFileFormat);
  const std::string samples_file = stage(
      "samples.json",
      wrap_instance("samples",
                        samples_to_json(GraphSamples(mat(2, 1, {0, 1}),
                                                         mat(2, 1, {0, 1})))));
  CHECK(cli({"classify", "--metric", samples_file, "--vector", "1,1"})
            .exit_code == kExitFileFormat);
}

TEST_CASE("cli extend evaluates and respects the mode contract") {
  const std::string samples_file = stage(
      "extend_in.json",
      wrap_instance("samples",
                        samples_to_json(GraphSamples(mat(2, 1, {0, 2}),
                                                         mat(2, 1, {0, 1})))));
  const CliRun ok =
      cli({"extend", "--in", samples_file, "--mode", "timelike", "--at", "1"});
  CHECK(ok.exit_code == kExitOk);
  CHECK(ok.out.find("0.5") != std::string::npos);

  const std::string unit_file = stage(
      "extend_unit.json",
      wrap_instance("samples",
                        samples_to_json(GraphSamples(mat(2, 1, {0, 1}),
                                                         mat(2, 1, {0, 1})))));
  CHECK(cli({"extend", "--in", unit_file, "--mode", "timelike", "--at", "0.5"})
            .exit_code == kExitInvalid);
}

TEST_CASE("cli option aliases and the explicit constant are accepted") {
  const std::string samples_file = stage(
      "extend_alias.json",
      wrap_instance("samples",
                        samples_to_json(GraphSamples(mat(2, 1, {0, 2}),
                                                         mat(2, 1, {0, 1})))));
  const CliRun lip = cli({"extend", "--samples", samples_file, "--query", "1",
                          "--lipschitz", "0.5"});
  CHECK(lip.exit_code == kExitOk);
  CHECK(lip.out.find("0.5") != std::string::npos);
  // A prescribed constant below the data constant is rejected up front.
  CHECK(cli({"extend", "--samples", samples_file, "--lipschitz", "0.1"})
            .exit_code == kExitInvalid);

  const std::string graph_file = stage(
      "alias_graph.json",
      wrap_instance("map", map_to_json(LipMap(mat(1, 1, {1.0}), vec({1.0})))));
  const std::string surface_file = stage(
      "alias_surface.json",
      wrap_instance("map", map_to_json(LipMap(mat(1, 1, {0.5}), vec({0.0})))));
  CHECK(cli({"intersect", "--causal", graph_file, "--surface", surface_file})
            .exit_code == kExitOk);

  const json problem = {
      {"base",
       {{"shape", "box"}, {"lo", {0.0}}, {"hi", {1.0}}, {"nodes_per_axis", 3}}},
      {"metric",
       {{"p", 1},
        {"q", 1},
        {"spatial_weights", {1.0}},
        {"temporal_weights", {1.0}}}},
      {"boundary", {{"affine", {{"A", {{0.5}}}, {"b", {0.0}}}}}}};
  const std::string problem_file =
      stage("alias_problem.json", wrap_instance("problem", problem));
  CHECK(cli({"plateau", "--problem", problem_file}).exit_code == kExitOk);

  const std::string svg_path = (workdir() / "alias_slice.svg").string();
  CHECK(cli({"diamond", "--p", "1", "--q", "1", "--out", svg_path})
            .exit_code == kExitOk);
}

TEST_CASE("cli intersect reports nonconvergence distinctly") {
  const std::string graph = stage(
      "graph_id.json",
      wrap_instance("map", map_to_json(LipMap(mat(1, 1, {1}),
                                                      vec({0})))));
  const std::string slow = stage(
      "surface_slow.json",
      wrap_instance("map", map_to_json(LipMap(mat(1, 1, {0.99999999}),
                                                      vec({0})))));
  CHECK(cli({"intersect", "--graph", graph, "--surface", slow, "--start",
             "1000000"})
            .exit_code == kExitNonconvergence);

  const std::string fast = stage(
      "surface_fast.json",
      wrap_instance("map", map_to_json(LipMap(mat(1, 1, {0.5}),
                                                      vec({0})))));
  const CliRun ok = cli({"intersect", "--graph", graph, "--surface", fast});
  CHECK(ok.exit_code == kExitOk);
}

TEST_CASE("cli verify-all is deterministic given the seed") {
  const CliRun a = cli({"verify-all", "--seed", "9"});
  const CliRun b = cli({"verify-all", "--seed", "9"});
  CHECK(a.exit_code == kExitOk);
  CHECK(drop_wall_time(a.out) == drop_wall_time(b.out));
  CHECK(a.out.find("\"result\"") != std::string::npos);
}

TEST_CASE("in-process verify suites are deterministic given the seed") {
  const std::vector<SuiteReport> r1 = verify_all(4);
  const std::vector<SuiteReport> r2 = verify_all(4);
  REQUIRE(r1.size() == r2.size());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].module == r2[i].module);
    REQUIRE(r1[i].checks.size() == r2[i].checks.size());
    for (std::size_t j = 0; j < r1[i].checks.size(); ++j) {
      CHECK(r1[i].checks[j].name == r2[i].checks[j].name);
      CHECK(r1[i].checks[j].pass == r2[i].checks[j].pass);
      CHECK(r1[i].checks[j].detail == r2[i].checks[j].detail);
      CHECK(r1[i].checks[j].pass);
    }
  }
}
