#include "model_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "biweb/errors.hpp"

namespace biweb::cli {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw InputError(where + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw InputError("unknown key \"" + key + "\" in " + where);
}

double real(const json& v, const std::string& where) {
  if (!v.is_number()) throw InputError(where + " must be a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw InputError(where + " must be an integer");
  return v.get<int>();
}

std::vector<double> reals(const json& v, const std::string& where) {
  if (!v.is_array()) throw InputError(where + " must be an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(real(v[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

std::string string_role(const json& exprs, const std::string& role) {
  if (!exprs.contains(role)) throw InputError("missing expression \"" + role + "\"");
  const json& v = exprs[role];
  if (!v.is_string()) throw InputError("expression \"" + role + "\" must be a string");
  return v.get<std::string>();
}

std::array<std::string, 2> pair_role(const json& exprs, const std::string& role) {
  if (!exprs.contains(role)) throw InputError("missing expression \"" + role + "\"");
  const json& v = exprs[role];
  if (!v.is_array() || v.size() != 2 || !v[0].is_string() || !v[1].is_string())
    throw InputError("expression \"" + role + "\" must be an array of two strings");
  return {v[0].get<std::string>(), v[1].get<std::string>()};
}

// n x n matrix of expressions, row-major; a bare string is accepted when n = 1.
std::vector<std::string> matrix_role(const json& exprs, const std::string& role, int n) {
  if (!exprs.contains(role)) throw InputError("missing expression \"" + role + "\"");
  const json& v = exprs[role];
  if (v.is_string()) {
    if (n != 1) throw InputError("expression \"" + role + "\" must be an " + std::to_string(n) + "x" +
                                 std::to_string(n) + " array of strings");
    return {v.get<std::string>()};
  }
  if (!v.is_array() || v.size() != static_cast<std::size_t>(n))
    throw InputError("expression \"" + role + "\" must have " + std::to_string(n) + " rows");
  std::vector<std::string> out;
  for (const json& row : v) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
      throw InputError("each row of \"" + role + "\" must have " + std::to_string(n) + " entries");
    for (const json& e : row) {
      if (!e.is_string()) throw InputError("entries of \"" + role + "\" must be strings");
      out.push_back(e.get<std::string>());
    }
  }
  return out;
}

void expect_roles(const json& exprs, const std::set<std::string>& roles, const std::string& kind) {
  require_keys(exprs, "exprs of a " + kind + " model", roles);
}

}  // namespace

bool ModelFile::in_window(const std::vector<double>& p) const {
  if (p.size() != window.size()) return false;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (!(p[k] >= window[k].first && p[k] <= window[k].second)) return false;
  return true;
}

ModelFile parse_model(const json& doc) {
  require_keys(doc, "model file", {"kind", "n", "params", "exprs", "section", "probe", "options"});
  ModelFile mf;
  if (!doc.contains("kind") || !doc["kind"].is_string()) throw InputError("\"kind\" must be a string");
  mf.kind = doc["kind"].get<std::string>();
  if (!doc.contains("n")) throw InputError("missing \"n\"");
  mf.n = integer(doc["n"], "n");
  if (mf.n < 1) throw InputError("\"n\" must be positive");

  if (doc.contains("params")) {
    const json& ps = doc["params"];
    if (!ps.is_object()) throw InputError("\"params\" must be an object");
    for (const auto& [name, value] : ps.items()) mf.params.emplace_back(name, real(value, "params." + name));
  }

  if (doc.contains("options")) {
    const json& o = doc["options"];
    require_keys(o, "options", {"jet_order", "delta_sep", "tol"});
    if (o.contains("jet_order")) mf.jet_order = integer(o["jet_order"], "options.jet_order");
    if (o.contains("delta_sep")) mf.delta_sep = real(o["delta_sep"], "options.delta_sep");
    if (o.contains("tol")) mf.tol = real(o["tol"], "options.tol");
    if (mf.jet_order < 2) throw InputError("options.jet_order must be at least 2");
    if (!(mf.delta_sep > 0.0)) throw InputError("options.delta_sep must be positive");
    if (!(mf.tol > 0.0)) throw InputError("options.tol must be positive");
  }

  if (!doc.contains("exprs")) throw InputError("missing \"exprs\"");
  const json& ex = doc["exprs"];
  if (!ex.is_object()) throw InputError("\"exprs\" must be an object");

  std::shared_ptr<const WebModel> base;
  if (mf.kind == "explicit") {
    expect_roles(ex, {"A", "H"}, mf.kind);
    if (ex.contains("A") == ex.contains("H")) throw InputError("an explicit model needs exactly one of \"A\" and \"H\"");
    if (ex.contains("A"))
      base = std::make_shared<ExplicitModel>(ExplicitModel::from_exprs(mf.n, matrix_role(ex, "A", mf.n), mf.params));
    else
      base = std::make_shared<PotentialModel>(PotentialModel::from_expr(mf.n, string_role(ex, "H"), mf.params));
  } else if (mf.kind == "product") {
    expect_roles(ex, {"f", "g"}, mf.kind);
    base = std::make_shared<ProductModel>(
        ProductModel::from_exprs(mf.n, matrix_role(ex, "f", mf.n), matrix_role(ex, "g", mf.n), mf.params));
  } else if (mf.kind == "ray_space") {
    expect_roles(ex, {"f", "g", "curve_x", "curve_y"}, mf.kind);
    if (mf.n < 2) throw InputError("a ray_space model needs n >= 2");
    std::shared_ptr<const RaySpaceModel> ray;
    if (ex.contains("curve_x") || ex.contains("curve_y")) {
      if (ex.contains("f") || ex.contains("g")) throw InputError("give either graphs f, g or curves, not both");
      if (mf.n != 2) throw InputError("curve_x and curve_y describe planar curves and need n = 2");
      ray = std::make_shared<RaySpaceModel>(
          RaySpaceModel::from_curves(pair_role(ex, "curve_x"), pair_role(ex, "curve_y"), mf.params, mf.delta_sep));
    } else {
      ray = std::make_shared<RaySpaceModel>(
          RaySpaceModel::from_graphs(mf.n, string_role(ex, "f"), string_role(ex, "g"), mf.params, mf.delta_sep));
    }
    mf.ray = ray;
    base = ray;
  } else if (mf.kind == "tangent_lines") {
    expect_roles(ex, {"f", "g", "curve_L", "curve_K"}, mf.kind);
    if (mf.n != 2) throw InputError("a tangent_lines model lives in the plane and needs n = 2");
    if (ex.contains("curve_L") || ex.contains("curve_K")) {
      if (ex.contains("f") || ex.contains("g")) throw InputError("give either graphs f, g or curves, not both");
      base = std::make_shared<TangentLineModel>(
          TangentLineModel::from_exprs(pair_role(ex, "curve_L"), pair_role(ex, "curve_K"), mf.params));
    } else {
      base = std::make_shared<TangentLineModel>(
          TangentLineModel::from_graphs(string_role(ex, "f"), string_role(ex, "g"), mf.params));
    }
  } else {
    throw InputError("unknown model kind \"" + mf.kind + "\"");
  }

  mf.model = base;
  if (doc.contains("section")) {
    const json& s = doc["section"];
    require_keys(s, "section", {"anchor", "i", "j"});
    if (!s.contains("anchor") || !s.contains("i") || !s.contains("j"))
      throw InputError("section needs \"anchor\", \"i\" and \"j\"");
    Section sec{reals(s["anchor"], "section.anchor"), integer(s["i"], "section.i"), integer(s["j"], "section.j")};
    const int d = base->dim();
    if (sec.anchor.size() != static_cast<std::size_t>(2 * d))
      throw InputError("section.anchor needs " + std::to_string(2 * d) + " coordinates");
    if (sec.i < 0 || sec.i >= d || sec.j < 0 || sec.j >= d)
      throw InputError("section indices must lie in [0, " + std::to_string(d) + ")");
    mf.model = std::make_shared<SectionModel>(base, sec.anchor, sec.i, sec.j);
    mf.section = std::move(sec);
  }

  if (!doc.contains("probe")) throw InputError("missing \"probe\"");
  const json& pr = doc["probe"];
  require_keys(pr, "probe", {"window", "points", "base"});
  if (!pr.contains("window") || !pr["window"].is_array()) throw InputError("probe.window must be an array");
  const std::size_t coords = static_cast<std::size_t>(mf.coordinates());
  if (pr["window"].size() != coords)
    throw InputError("probe.window needs " + std::to_string(coords) + " intervals, one per coordinate");
  for (std::size_t k = 0; k < coords; ++k) {
    const auto iv = reals(pr["window"][k], "probe.window[" + std::to_string(k) + "]");
    if (iv.size() != 2 || !(iv[0] < iv[1]))
      throw InputError("probe.window[" + std::to_string(k) + "] must be an interval [lo, hi] with lo < hi");
    mf.window.emplace_back(iv[0], iv[1]);
  }
  auto check_point = [&](const std::vector<double>& p, const std::string& where) {
    if (p.size() != coords) throw InputError(where + " needs " + std::to_string(coords) + " coordinates");
    if (!mf.in_window(p)) throw InputError(where + " lies outside the probe window");
  };
  if (pr.contains("points")) {
    if (!pr["points"].is_array()) throw InputError("probe.points must be an array of points");
    for (std::size_t k = 0; k < pr["points"].size(); ++k) {
      const std::string where = "probe.points[" + std::to_string(k) + "]";
      mf.points.push_back(reals(pr["points"][k], where));
      check_point(mf.points.back(), where);
    }
  }
  if (pr.contains("base")) {
    mf.base = reals(pr["base"], "probe.base");
    check_point(*mf.base, "probe.base");
  }
  return mf;
}

ModelFile load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("invalid JSON in " + path + ": " + e.what());
  }
  return parse_model(doc);
}

}  // namespace biweb::cli
