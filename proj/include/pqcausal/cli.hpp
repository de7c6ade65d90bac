#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pqcausal/io.hpp"
#include "pqcausal/verify.hpp"

namespace pqcausal {

// Exit codes: 0 success, 1 verification failed, 2 invalid input values,
// 3 nonconvergence, 64 usage error, 65 malformed file.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNonconvergence = 3;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitFileFormat = 65;

namespace detail {

inline Vec parse_csv_vec(const std::string& text) {
  std::vector<double> vals;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = std::min(text.find(',', pos), text.size());
    const std::string tok = text.substr(pos, next - pos);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("not a number list: '" + text + "'");
    }
    while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used])))
      ++used;
    if (used != tok.size())
      throw std::invalid_argument("not a number list: '" + text + "'");
    vals.push_back(v);
    pos = next + 1;
  }
  Vec v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = vals[i];
  return v;
}

inline LipMap read_map_file(const std::string& path, const std::string& kind) {
  return map_from_json(unwrap_instance(read_json_file(path), kind));
}

inline json checks_to_json(const std::vector<SuiteReport>& suites) {
  json arr = json::array();
  for (const SuiteReport& s : suites)
    for (const Check& c : s.checks)
      arr.push_back(json{{"name", s.module + "/" + c.name},
                         {"pass", c.pass},
                         {"detail", c.detail}});
  return arr;
}

}  // namespace detail

// Runs one toolkit command; everything the command prints goes through the
// given streams, so the dispatcher is directly testable. Every successful
// run prints one JSON run report to `out`.
inline int run_cli(std::vector<std::string> args, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"signature (p,q) causal geometry toolkit"};
  app.require_subcommand(1);

  // classify
  std::string cl_metric, cl_vector, cl_from, cl_to;
  std::vector<std::string> cl_basis;
  int cl_p = 0, cl_q = 0;
  double cl_tol = 0.0;
  CLI::App* classify = app.add_subcommand(
      "classify", "Classify a vector, segment, or spanned subspace");
  classify->add_option("--metric", cl_metric, "metric instance file");
  classify->add_option("--p", cl_p, "spatial dimension (standard metric)");
  classify->add_option("--q", cl_q, "temporal dimension (standard metric)");
  classify->add_option("--vector", cl_vector, "comma-separated coordinates");
  classify->add_option("--from", cl_from, "segment start");
  classify->add_option("--to", cl_to, "segment end");
  classify->add_option("--basis", cl_basis,
                       "basis vector, repeat for a subspace");
  classify->add_option("--tol", cl_tol, "classification tolerance");

  // extend
  std::string ex_in, ex_out, ex_mode = "causal";
  std::vector<std::string> ex_at;
  double ex_tol = kKirszbraunTol, ex_lip = 0.0;
  CLI::App* extend = app.add_subcommand(
      "extend", "Extend finite Lipschitz samples and evaluate the extension");
  extend->add_option("--in,--samples", ex_in, "samples instance file")
      ->required();
  extend->add_option("--mode", ex_mode, "causal or timelike")
      ->check(CLI::IsMember({"causal", "timelike"}));
  extend->add_option("--at,--query", ex_at, "query point, repeatable");
  extend->add_option("--tol", ex_tol, "evaluation tolerance");
  CLI::Option* ex_lip_opt = extend->add_option(
      "--lipschitz", ex_lip, "prescribed constant (default: set by mode)");
  extend->add_option("--out", ex_out, "write the extension as a map instance");

  // intersect
  std::string in_graph, in_surface, in_start;
  double in_tol = kIntersectTol;
  CLI::App* intersect = app.add_subcommand(
      "intersect", "Intersect a causal graph with a Cauchy surface");
  intersect
      ->add_option("--graph,--causal", in_graph,
                   "map instance file (the graph)")
      ->required();
  intersect
      ->add_option("--surface", in_surface, "map instance file (contracting)")
      ->required();
  intersect->add_option("--start", in_start, "iteration start, default zeros");
  intersect->add_option("--tol", in_tol, "certificate tolerance");

  // diamond
  int di_p = 0, di_q = 0, di_res = 64, di_oracle = 0;
  int di_sp_axis = 0, di_tm_axis = 0;
  std::string di_point, di_base, di_svg, di_csv;
  CLI::App* diamond = app.add_subcommand(
      "diamond", "Flat diamond membership and slice rendering");
  diamond->add_option("--p", di_p, "spatial dimension")->required();
  diamond->add_option("--q", di_q, "temporal dimension")->required();
  diamond->add_option("--point", di_point, "membership query point");
  diamond->add_option("--oracle-samples", di_oracle,
                      "cross-check membership against the sampled oracle");
  diamond->add_option("--svg,--out", di_svg, "write a slice rendering");
  diamond->add_option("--csv", di_csv, "write the slice sample table");
  diamond->add_option("--spatial-axis", di_sp_axis, "slice spatial axis");
  diamond->add_option("--temporal-axis", di_tm_axis, "slice temporal axis");
  diamond->add_option("--base", di_base, "slice base point, default zeros");
  diamond->add_option("--resolution", di_res, "slice grid resolution");

  // plateau
  std::string pl_in, pl_out, pl_svg;
  CLI::App* plateau = app.add_subcommand(
      "plateau", "Maximize discrete area over constrained sections");
  plateau->add_option("--in,--problem", pl_in, "problem instance file")
      ->required();
  plateau->add_option("--out", pl_out, "write the solution surface instance");
  plateau->add_option("--svg", pl_svg, "write a solution heightfield");

  // split
  std::string sp_fol, sp_surface, sp_point;
  double sp_tol = kIntersectTol;
  CLI::App* split = app.add_subcommand(
      "split", "Apply the splitting map to a point");
  split->add_option("--foliation", sp_fol, "foliation instance file")
      ->required();
  split->add_option("--surface", sp_surface, "map instance file (contracting)")
      ->required();
  split->add_option("--point", sp_point, "point to split")->required();
  split->add_option("--tol", sp_tol, "intersection tolerance");

  // verify-split
  std::string vs_fol, vs_surface;
  int vs_samples = 300;
  double vs_tol = kIntersectTol;
  std::uint64_t vs_seed = 0;
  CLI::App* vsplit = app.add_subcommand(
      "verify-split", "Round-trip and collision checks for the splitting map");
  vsplit->add_option("--foliation", vs_fol,
                     "foliation instance file, default synthetic");
  vsplit->add_option("--surface", vs_surface,
                     "map instance file, default synthetic");
  vsplit->add_option("--samples", vs_samples, "number of round-trip samples");
  vsplit->add_option("--tol", vs_tol, "intersection tolerance");
  vsplit->add_option("--seed", vs_seed, "sampling seed");

  // verify-all
  std::uint64_t va_seed = 0;
  CLI::App* vall = app.add_subcommand(
      "verify-all", "Run every module invariant suite");
  vall->add_option("--seed", va_seed, "sampling seed");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  json report;
  report["command"] = app.get_subcommands().front()->get_name();
  report["seed"] = 0;
  report["checks"] = json::array();
  int exit_code = kExitOk;
  const auto t0 = std::chrono::steady_clock::now();

  try {
    if (classify->parsed()) {
      PseudoMetric g = cl_metric.empty()
                           ? PseudoMetric::standard(cl_p, cl_q)
                           : metric_from_json(unwrap_instance(
                                 read_json_file(cl_metric), "metric"));
      json result{{"p", g.p}, {"q", g.q}};
      if (!cl_basis.empty()) {
        std::vector<Vec> basis;
        for (const std::string& b : cl_basis)
          basis.push_back(detail::parse_csv_vec(b));
        result["class"] = to_string(classify_subspace(g, basis, cl_tol));
      } else if (!cl_from.empty() && !cl_to.empty()) {
        const Vec a = detail::parse_csv_vec(cl_from);
        const Vec b = detail::parse_csv_vec(cl_to);
        result["class"] = to_string(classify_segment(g, a, b, cl_tol));
        result["quadratic_form"] = g.quad(b - a);
      } else if (!cl_vector.empty()) {
        const Vec v = detail::parse_csv_vec(cl_vector);
        result["class"] = to_string(classify_vector(g, v, cl_tol));
        result["quadratic_form"] = g.quad(v);
      } else {
        throw std::invalid_argument(
            "classify: give --vector, --from/--to, or --basis");
      }
      report["result"] = std::move(result);
    } else if (extend->parsed()) {
      const GraphSamples samples =
          samples_from_json(unwrap_instance(read_json_file(ex_in), "samples"));
      const LipMap m =
          ex_lip_opt->count() > 0
              ? LipMap(samples, ex_lip)
              : build_inextendible(samples, ex_mode == "causal"
                                                ? ExtensionMode::Causal
                                                : ExtensionMode::Timelike);
      json values = json::array();
      for (const std::string& a : ex_at) {
        const Vec x = detail::parse_csv_vec(a);
        values.push_back(detail::vec_to_json(m.eval(x, ex_tol)));
      }
      report["result"] = json{{"certified_constant", m.certified_constant()},
                              {"values", std::move(values)}};
      if (!ex_out.empty())
        write_text_file(ex_out,
                        wrap_instance("map", map_to_json(m)).dump(2) + "\n");
    } else if (intersect->parsed()) {
      const LipMap f = detail::read_map_file(in_graph, "map");
      const SpacelikeMap w(detail::read_map_file(in_surface, "map"));
      const Vec x0 = in_start.empty() ? Vec(Vec::Zero(f.source_dim()))
                                      : detail::parse_csv_vec(in_start);
      const IntersectResult res = intersect_fixed_point(f, w, x0, in_tol);
      report["result"] = json{{"x_star", detail::vec_to_json(res.x_star)},
                              {"point", detail::vec_to_json(res.point)},
                              {"iterations", res.iterations}};
    } else if (diamond->parsed()) {
      const FlatDiamond d(di_p, di_q);
      json result;
      if (!di_point.empty()) {
        const Vec pt = detail::parse_csv_vec(di_point);
        result["member"] = in_flat_diamond(d, pt);
        if (di_oracle > 0)
          result["oracle"] = diamond_membership_oracle(d, pt, di_oracle);
      }
      if (!di_svg.empty() || !di_csv.empty()) {
        const Vec base = di_base.empty() ? Vec(Vec::Zero(d.dim()))
                                         : detail::parse_csv_vec(di_base);
        if (!di_svg.empty()) {
          write_text_file(di_svg, svg_diamond_slice(d, di_sp_axis, di_tm_axis,
                                                    base, di_res));
          result["svg"] = di_svg;
        }
        if (!di_csv.empty()) {
          write_text_file(di_csv, csv_diamond_slice(d, di_sp_axis, di_tm_axis,
                                                    base, di_res));
          result["csv"] = di_csv;
        }
      }
      report["result"] = std::move(result);
    } else if (plateau->parsed()) {
      const ProblemFile pf =
          problem_from_json(unwrap_instance(read_json_file(pl_in), "problem"));
      const PlateauSolution sol = solve_plateau(pf.problem);
      if (!sol.converged)
        throw nonconvergence_error("plateau: iteration budget exhausted");
      report["result"] = json{{"area", sol.area},
                              {"iterations", sol.iterations},
                              {"converged", sol.converged},
                              {"feasibility_residual", sol.feas_residual}};
      if (!pl_out.empty())
        write_text_file(
            pl_out,
            wrap_instance("surface", solution_to_json(pf.base_spec, sol))
                    .dump(2) +
                "\n");
      if (!pl_svg.empty())
        write_text_file(pl_svg, svg_section_heightfield(sol.section));
    } else if (split->parsed()) {
      const FoliationWitness fol(detail::read_map_file(sp_fol, "foliation"));
      const SpacelikeMap w(detail::read_map_file(sp_surface, "map"));
      const Vec pt = detail::parse_csv_vec(sp_point);
      const SplittingResult res = splitting_map(fol, w, pt, sp_tol);
      const Vec rec = reconstruct(fol, res.leaf, res.time);
      report["result"] =
          json{{"leaf", detail::vec_to_json(res.leaf)},
               {"surface_point", detail::vec_to_json(res.surface_point)},
               {"time", detail::vec_to_json(res.time)},
               {"iterations", res.iterations},
               {"roundtrip_error", (rec - pt).norm()}};
    } else if (vsplit->parsed()) {
      report["seed"] = vs_seed;
      std::mt19937_64 rng(vs_seed);
      const LipMap W = vs_fol.empty()
                           ? random_affine_map(rng, 2, 2, 0.6)
                           : detail::read_map_file(vs_fol, "foliation");
      const LipMap wmap = vs_surface.empty()
                              ? random_affine_map(rng, W.target_dim(),
                                                  W.source_dim(), 0.5)
                              : detail::read_map_file(vs_surface, "map");
      const FoliationWitness fol(W);
      const SpacelikeMap level(wmap);
      const SplittingReport sr = verify_splitting_bijectivity(
          fol, level, vs_samples, vs_seed, vs_tol);
      report["checks"].push_back(json{
          {"name", "split/roundtrip-and-collisions"},
          {"pass", sr.pass},
          {"detail", "max error " + detail::fmtg(sr.max_roundtrip_error) +
                         ", collisions " + std::to_string(sr.collisions)}});
      report["result"] =
          json{{"samples", sr.samples},
               {"max_roundtrip_error", sr.max_roundtrip_error},
               {"collisions", sr.collisions},
               {"pass", sr.pass}};
      if (!sr.pass) exit_code = kExitVerifyFailed;
    } else if (vall->parsed()) {
      report["seed"] = va_seed;
      const std::vector<SuiteReport> suites = verify_all(va_seed);
      bool all = true;
      for (const SuiteReport& s : suites) all = all && s.pass();
      report["checks"] = detail::checks_to_json(suites);
      report["result"] = json{{"pass", all},
                              {"suites", suites.size()},
                              {"checks", report["checks"].size()}};
      if (!all) exit_code = kExitVerifyFailed;
    }
  } catch (const file_format_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFileFormat;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const nonconvergence_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitNonconvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 70;  // internal software error
  }

  const std::chrono::duration<double> dt =
      std::chrono::steady_clock::now() - t0;
  report["wall_time_s"] = dt.count();
  out << report.dump(2) << "\n";
  return exit_code;
}

}  // namespace pqcausal
