#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "pqcausal/cauchy.hpp"
#include "pqcausal/plateau.hpp"
#include "pqcausal/split.hpp"

namespace pqcausal {

using json = nlohmann::json;

// Anything wrong with a file's structure, as opposed to its mathematical
// content: parse failures, bad envelopes, missing or mistyped fields.
class file_format_error : public std::runtime_error {
 public:
  explicit file_format_error(const std::string& what)
      : std::runtime_error(what) {}
};

inline constexpr int kInstanceVersion = 1;

// Every on-disk artifact shares one envelope:
//   {"version": 1, "kind": <metric|samples|map|problem|surface|foliation>,
//    "payload": {...}}
// "map" is any Lipschitz map (a Cauchy surface when contracting), "surface"
// a grid section; solution files round-trip as surfaces.
inline json wrap_instance(const std::string& kind, json payload) {
  return json{{"version", kInstanceVersion},
              {"kind", kind},
              {"payload", std::move(payload)}};
}

inline json unwrap_instance(const json& file, const std::string& expected_kind) {
  if (!file.is_object() || !file.contains("version") || !file.contains("kind") ||
      !file.contains("payload"))
    throw file_format_error("instance file: missing envelope fields");
  if (file["version"] != kInstanceVersion)
    throw file_format_error("instance file: unsupported version");
  if (file["kind"] != expected_kind)
    throw file_format_error("instance file: expected kind '" + expected_kind +
                            "', found '" + file["kind"].dump() + "'");
  return file["payload"];
}

namespace detail {

inline Vec vec_from_json(const json& j) {
  if (!j.is_array()) throw file_format_error("expected a number array");
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw file_format_error("expected a number array");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline json vec_to_json(const Vec& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

inline Mat mat_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw file_format_error("expected a matrix");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Mat m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vec row = vec_from_json(j[r]);
    if (row.size() != static_cast<Eigen::Index>(cols))
      throw file_format_error("expected a rectangular matrix");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

inline json mat_to_json(const Mat& m) {
  json j = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    j.push_back(vec_to_json(m.row(r).transpose()));
  return j;
}

}  // namespace detail

inline json metric_to_json(const PseudoMetric& g) {
  return json{{"p", g.p},
              {"q", g.q},
              {"spatial_weights", detail::vec_to_json(g.spatial_weights)},
              {"temporal_weights", detail::vec_to_json(g.temporal_weights)}};
}

inline PseudoMetric metric_from_json(const json& payload) {
  try {
    return PseudoMetric(payload.at("p").get<int>(), payload.at("q").get<int>(),
                        detail::vec_from_json(payload.at("spatial_weights")),
                        detail::vec_from_json(payload.at("temporal_weights")));
  } catch (const json::exception& e) {
    throw file_format_error(std::string("metric payload: ") + e.what());
  }
}

inline json samples_to_json(const GraphSamples& s) {
  return json{{"sources", detail::mat_to_json(s.sources)},
              {"targets", detail::mat_to_json(s.targets)}};
}

inline GraphSamples samples_from_json(const json& payload) {
  try {
    return GraphSamples(detail::mat_from_json(payload.at("sources")),
                        detail::mat_from_json(payload.at("targets")));
  } catch (const json::exception& e) {
    throw file_format_error(std::string("samples payload: ") + e.what());
  }
}

// Map payloads accept three spellings:
//   {"sources": [[..]], "targets": [[..]], "lipschitz": L}   interpolant
//   {"affine": {"A": [[..]], "b": [..]}}                     exact affine
//   {"constant": [..], "source_dim": q}                      constant map
inline LipMap map_from_json(const json& payload) {
  try {
    if (payload.contains("affine")) {
      const json& a = payload["affine"];
      return LipMap(detail::mat_from_json(a.at("A")),
                    detail::vec_from_json(a.at("b")));
    }
    if (payload.contains("constant")) {
      const Vec c = detail::vec_from_json(payload["constant"]);
      const int q = payload.at("source_dim").get<int>();
      return LipMap(Mat::Zero(c.size(), q), c);
    }
    GraphSamples s = samples_from_json(payload);
    const double L = payload.contains("lipschitz")
                         ? payload["lipschitz"].get<double>()
                         : lipschitz_constant(s);
    return LipMap(std::move(s), L);
  } catch (const json::exception& e) {
    throw file_format_error(std::string("map payload: ") + e.what());
  }
}

inline json map_to_json(const LipMap& m) {
  if (m.is_affine())
    return json{{"affine",
                 json{{"A", detail::mat_to_json(m.affine().A)},
                      {"b", detail::vec_to_json(m.affine().b)}}}};
  return json{{"sources", detail::mat_to_json(m.interpolant().samples.sources)},
              {"targets", detail::mat_to_json(m.interpolant().samples.targets)},
              {"lipschitz", m.interpolant().L}};
}

// Grid payloads carry construction parameters, not node lists:
//   {"shape": "box", "lo": [..], "hi": [..], "nodes_per_axis": n}
//   {"shape": "ball", "center": [..], "radius": r, "h": h}
inline GridBase grid_from_json(const json& spec) {
  try {
    const std::string shape = spec.at("shape").get<std::string>();
    if (shape == "box")
      return GridBase::box(detail::vec_from_json(spec.at("lo")),
                           detail::vec_from_json(spec.at("hi")),
                           spec.at("nodes_per_axis").get<int>());
    if (shape == "ball")
      return GridBase::ball(detail::vec_from_json(spec.at("center")),
                            spec.at("radius").get<double>(),
                            spec.at("h").get<double>());
    throw file_format_error("grid payload: unknown shape '" + shape + "'");
  } catch (const json::exception& e) {
    throw file_format_error(std::string("grid payload: ") + e.what());
  }
}

struct ProblemFile {
  PlateauProblem problem;
  json base_spec;  // echoed into solution files
};

inline ProblemFile problem_from_json(const json& payload) {
  try {
    json base_spec = payload.at("base");
    auto base = std::make_shared<GridBase>(grid_from_json(base_spec));
    PseudoMetric metric = metric_from_json(payload.at("metric"));
    LipMap boundary = map_from_json(payload.at("boundary"));
    SolverParams sp;
    if (payload.contains("solver")) {
      const json& s = payload["solver"];
      if (s.contains("step_init")) sp.step_init = s["step_init"].get<double>();
      if (s.contains("stop_tol")) sp.stop_tol = s["stop_tol"].get<double>();
      if (s.contains("patience")) sp.patience = s["patience"].get<int>();
      if (s.contains("max_iter")) sp.max_iter = s["max_iter"].get<int>();
      if (s.contains("feas_tol")) sp.feas_tol = s["feas_tol"].get<double>();
      if (s.contains("max_sweeps")) sp.max_sweeps = s["max_sweeps"].get<int>();
      if (s.contains("grad_floor"))
        sp.grad_floor = s["grad_floor"].get<double>();
    }
    return ProblemFile{
        PlateauProblem(std::move(base), std::move(metric), std::move(boundary),
                       sp),
        std::move(base_spec)};
  } catch (const json::exception& e) {
    throw file_format_error(std::string("problem payload: ") + e.what());
  }
}

inline json solution_to_json(const json& base_spec, const PlateauSolution& sol) {
  return json{{"base", base_spec},
              {"values", detail::mat_to_json(sol.section.values)},
              {"area", sol.area},
              {"iterations", sol.iterations},
              {"feasibility_residual", sol.feas_residual},
              {"converged", sol.converged},
              {"history", sol.history}};
}

struct SurfaceFile {
  GridSection section;
  json base_spec;
};

inline SurfaceFile surface_from_json(const json& payload) {
  try {
    json base_spec = payload.at("base");
    auto base = std::make_shared<GridBase>(grid_from_json(base_spec));
    Mat values = detail::mat_from_json(payload.at("values"));
    return SurfaceFile{GridSection(std::move(base), std::move(values)),
                       std::move(base_spec)};
  } catch (const json::exception& e) {
    throw file_format_error(std::string("surface payload: ") + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw file_format_error("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw file_format_error(std::string("parse error in ") + path + ": " +
                            e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw file_format_error("cannot open file for writing: " + path);
  out << text;
}

}  // namespace pqcausal
