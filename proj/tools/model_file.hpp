#pragma once

// JSON model files for the command-line front end.
//
//   { "kind": "ray_space" | "tangent_lines" | "explicit" | "product",
//     "n": int, "params": {name: real}, "exprs": {role: string or [string, string]},
//     "section": {"anchor": [...], "i": int, "j": int},
//     "probe": {"window": [[lo, hi], ...], "points": [[...], ...], "base": [...]},
//     "options": {"jet_order": int, "delta_sep": real, "tol": real} }
//
// Roles: explicit "A" (an n x n array of strings, or one string when n = 1) or a
// scalar potential "H"; product "f" and "g", shaped like "A"; ray_space "f" and
// "g" (graphs) or "curve_x" and "curve_y" (planar curves, n = 2); tangent_lines
// "f" and "g" (graphs) or "curve_L" and "curve_K". For ray_space and
// tangent_lines "n" is the ambient dimension, for the others the leaf dimension.

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "biweb/models.hpp"
#include "biweb/web.hpp"

namespace biweb::cli {

struct Section {
  std::vector<double> anchor;
  int i = 0, j = 0;
};

struct ModelFile {
  std::string kind;
  int n = 0;
  Params params;
  std::shared_ptr<const WebModel> model;       // the web the commands analyze (a section when requested)
  std::shared_ptr<const RaySpaceModel> ray;    // set for ray_space files
  std::optional<Section> section;
  std::vector<std::pair<double, double>> window;  // one interval per coordinate of `model`
  std::vector<std::vector<double>> points;
  std::optional<std::vector<double>> base;
  int jet_order = 2;
  double delta_sep = kDefaultSeparation;
  double tol = 1e-9;

  int coordinates() const { return 2 * model->dim(); }
  bool in_window(const std::vector<double>& p) const;
};

/// Throws InputError (including ParseError) on schema or expression problems.
ModelFile parse_model(const nlohmann::json& doc);
ModelFile load_model_file(const std::string& path);

}  // namespace biweb::cli
