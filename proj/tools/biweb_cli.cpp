// biweb: curvature reports, verification suites and holonomy fits from the shell.
//
// Exit status: 0 success, 1 bad input or flags, 2 a domain condition at a queried
// point (the message names it), 3 a verification suite failed.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "biweb/errors.hpp"
#include "biweb/holonomy.hpp"
#include "biweb/models.hpp"
#include "biweb/potential.hpp"
#include "biweb/verify.hpp"
#include "biweb/web.hpp"
#include "json_out.hpp"
#include "model_file.hpp"

namespace {

using nlohmann::json;
using namespace biweb;
using cli::ModelFile;

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitDomain = 2;
constexpr int kExitVerify = 3;

json calibration_json() {
  return {{"xi_sign", Calibration::kXiSign},
          {"cjk_scale_first", Calibration::kCjkScaleFirst},
          {"cjk_scale_second", Calibration::kCjkScaleSecond},
          {"ray_volume_sign", Calibration::kRayVolumeSign},
          {"sphere_sign", Calibration::kSphereSign},
          {"tangent_sign", Calibration::kTangentSign},
          {"tangent_c00_exponents", kTangentC00Exponents},
          {"tangent_c00_constant", kTangentC00Constant}};
}

json envelope(const std::string& command) {
  return {{"toolkit", {{"name", "biweb"}, {"version", kVersion}}},
          {"command", command},
          {"calibration", calibration_json()},
          {"metadata", {{"curves", "coordinate"}}}};
}

void emit(json report, const std::string& out, std::chrono::steady_clock::time_point start) {
  report["wall_time_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string text = cli::dump_json(report) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw InputError("cannot write " + out);
  f << text;
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec_json(m.row(r).transpose()));
  return rows;
}

json block_json(const OneFormBlock& b) {
  json out = json::array();
  for (int i = 0; i < b.n; ++i) {
    json row = json::array();
    for (int j = 0; j < b.n; ++j) row.push_back(vec_json(b(i, j)));
    out.push_back(row);
  }
  return out;
}

json block_json(const TwoFormBlock& b) {
  json out = json::array();
  for (int i = 0; i < b.n; ++i) {
    json row = json::array();
    for (int j = 0; j < b.n; ++j) row.push_back(mat_json(b(i, j)));
    out.push_back(row);
  }
  return out;
}

std::vector<double> parse_reals(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw InputError("bad number \"" + tok + "\" in " + what);
    }
    if (tok.find_first_not_of(" \t", used) != std::string::npos) throw InputError("bad number \"" + tok + "\" in " + what);
    out.push_back(v);
  }
  if (out.empty()) throw InputError("empty list in " + what);
  return out;
}

std::vector<std::vector<double>> parse_points(const std::string& text) {
  std::vector<std::vector<double>> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ';'))
    if (tok.find_first_not_of(" \t") != std::string::npos) out.push_back(parse_reals(tok, "--points"));
  return out;
}

std::vector<double> window_center(const ModelFile& mf) {
  std::vector<double> c;
  for (const auto& [lo, hi] : mf.window) c.push_back(0.5 * (lo + hi));
  return c;
}

// K cell centres per coordinate, in lexicographic order with the last coordinate fastest.
std::vector<std::vector<double>> grid_points(const ModelFile& mf, int k) {
  const std::size_t d = mf.window.size();
  std::vector<std::vector<double>> out;
  std::vector<int> idx(d, 0);
  while (true) {
    std::vector<double> p(d);
    for (std::size_t c = 0; c < d; ++c) {
      const auto [lo, hi] = mf.window[c];
      p[c] = lo + (hi - lo) * (idx[c] + 0.5) / k;
    }
    out.push_back(std::move(p));
    std::size_t c = d;
    while (c > 0 && ++idx[c - 1] == k) idx[--c] = 0;
    if (c == 0) break;
  }
  return out;
}

// Runs work(i) for i in [0, count) on `jobs` threads. Results stay indexed, so the
// output does not depend on scheduling; the lowest-index exception is rethrown.
template <class Work>
void parallel_for(std::size_t count, int jobs, Work work) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        work(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string format_point(const std::vector<double>& p) {
  std::string s = "(";
  char buf[32];
  for (std::size_t k = 0; k < p.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%s%.6g", k ? ", " : "", p[k]);
    s += buf;
  }
  return s + ")";
}

// Re-raises a domain error with the offending point in the message, keeping the condition.
template <class F>
auto at_point(const std::string& label, const std::vector<double>& p, F f) {
  try {
    return f();
  } catch (const DomainError& e) {
    std::string msg = e.what();
    const std::string prefix = e.condition() + ": ";
    if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
    throw DomainError(e.condition(), msg + " at " + label + " " + format_point(p));
  }
}

json point_report(const ModelFile& mf, const std::vector<double>& p, const std::vector<double>& base) {
  const CurvatureReport r = at_point("point", p, [&] { return curvature_report(*mf.model, p); });
  return {{"point", p},
          {"det_A", r.det_A},
          {"gamma_F", block_json(r.gamma_F)},
          {"gamma_G", block_json(r.gamma_G)},
          {"omega_F", block_json(r.omega_F)},
          {"omega_G", block_json(r.omega_G)},
          {"ricci", mat_json(r.ricci)},
          {"ricci_max_abs", r.ricci.size() ? r.ricci.cwiseAbs().maxCoeff() : 0.0},
          {"flat_residual", r.flat_residual},
          {"closed_residual", r.closed_residual},
          {"cross_ratio_residual", flatness_cross_ratio(*mf.model, p, base)}};
}

json model_json(const ModelFile& mf) {
  json m = {{"kind", mf.kind},
            {"web", mf.model->kind()},
            {"n", mf.n},
            {"leaf_dim", mf.model->dim()},
            {"jet_order", mf.jet_order},
            {"delta_sep", mf.delta_sep},
            {"tol", mf.tol}};
  json params = json::object();
  for (const auto& [k, v] : mf.params) params[k] = v;
  m["params"] = params;
  if (mf.section) m["section"] = {{"anchor", mf.section->anchor}, {"i", mf.section->i}, {"j", mf.section->j}};
  return m;
}

struct AnalyzeArgs {
  std::string model, out, points;
  int grid = 0, jobs = 1;
  std::optional<int> jet_order;
};

int run_analyze(const AnalyzeArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  ModelFile mf = cli::load_model_file(a.model);
  if (a.jet_order) {
    if (*a.jet_order < 2) throw InputError("--jet-order must be at least 2");
    mf.jet_order = *a.jet_order;
  }
  if (a.jobs < 1) throw InputError("--jobs must be positive");

  std::vector<std::vector<double>> pts = mf.points;
  if (!a.points.empty()) pts = parse_points(a.points);
  if (a.grid > 0) {
    auto g = grid_points(mf, a.grid);
    pts.insert(pts.end(), g.begin(), g.end());
  } else if (a.grid < 0) {
    throw InputError("--grid must be positive");
  }
  if (pts.empty()) pts.push_back(window_center(mf));
  for (const auto& p : pts) {
    if (p.size() != static_cast<std::size_t>(mf.coordinates()))
      throw InputError("points need " + std::to_string(mf.coordinates()) + " coordinates");
    if (!mf.in_window(p)) throw InputError("point outside the probe window");
  }
  const std::vector<double> base = mf.base ? *mf.base : window_center(mf);
  at_point("base point", base, [&] { mf.model->check_point(base); });

  std::vector<json> reports(pts.size());
  parallel_for(pts.size(), a.jobs, [&](std::size_t i) { reports[i] = point_report(mf, pts[i], base); });

  double max_ricci = 0.0, max_flat = 0.0, max_closed = 0.0, max_cross = 0.0;
  for (const auto& r : reports) {
    max_ricci = std::max(max_ricci, r["ricci_max_abs"].get<double>());
    max_flat = std::max(max_flat, r["flat_residual"].get<double>());
    max_closed = std::max(max_closed, r["closed_residual"].get<double>());
    max_cross = std::max(max_cross, r["cross_ratio_residual"].get<double>());
  }
  json report = envelope("analyze");
  report["model"] = model_json(mf);
  report["base"] = base;
  report["points"] = reports;
  report["summary"] = {{"count", reports.size()},
                       {"max_ricci_abs", max_ricci},
                       {"max_flat_residual", max_flat},
                       {"max_closed_residual", max_closed},
                       {"max_cross_ratio_residual", max_cross}};
  emit(std::move(report), a.out, start);
  return kExitOk;
}

struct VerifyArgs {
  std::string suite = "all", out;
  std::optional<int> trials, n;
  std::uint64_t seed = verify::Options{}.seed;
};

int run_verify(const VerifyArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  verify::Options opts;
  opts.seed = a.seed;
  opts.trials = a.trials;
  opts.n = a.n;
  if (opts.trials && *opts.trials < 1) throw InputError("--trials must be positive");
  const auto suites = verify::run(a.suite, opts);

  bool all = true;
  json js = json::array();
  for (const auto& s : suites) {
    json crit = json::array();
    for (const auto& c : s.criteria) {
      json metrics = json::array();
      for (const auto& m : c.metrics)
        metrics.push_back({{"name", m.name},
                           {"value", m.value},
                           {"tolerance", m.tolerance},
                           {"bound", m.upper ? "upper" : "lower"},
                           {"informational", m.informational},
                           {"ok", m.informational || m.ok()}});
      json cj = {{"id", c.id}, {"name", c.name}, {"passed", c.passed()}, {"metrics", metrics}};
      if (!c.note.empty()) cj["note"] = c.note;
      if (!c.error.empty()) cj["error"] = c.error;
      crit.push_back(cj);
      std::cerr << (c.passed() ? "PASS" : "FAIL") << " criterion " << c.id << " [" << s.suite << "] " << c.name
                << "\n";
    }
    all = all && s.passed();
    js.push_back({{"suite", s.suite}, {"passed", s.passed()}, {"seconds", s.seconds}, {"criteria", crit}});
  }
  json report = envelope("verify");
  report["options"] = {{"suite", a.suite}, {"seed", a.seed}};
  if (a.trials) report["options"]["trials"] = *a.trials;
  if (a.n) report["options"]["n"] = *a.n;
  report["suites"] = js;
  report["passed"] = all;
  emit(std::move(report), a.out, start);
  return all ? kExitOk : kExitVerify;
}

struct HolonomyArgs {
  std::string model, out, point, ladder;
};

int run_holonomy(const HolonomyArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  const ModelFile mf = cli::load_model_file(a.model);
  if (mf.model->dim() != 1)
    throw InputError("holonomy needs a 2D web; add a \"section\" to the model file to cut one out");

  std::vector<double> p;
  if (!a.point.empty())
    p = parse_reals(a.point, "--point");
  else if (mf.base)
    p = *mf.base;
  else if (!mf.points.empty())
    p = mf.points.front();
  else
    p = window_center(mf);
  if (p.size() != 2) throw InputError("--point needs 2 coordinates");
  if (!mf.in_window(p)) throw InputError("--point lies outside the probe window");

  ReflectionConfig cfg;
  if (!a.ladder.empty()) cfg.ladder = parse_reals(a.ladder, "--ladder");
  cfg.radius = std::min({p[0] - mf.window[0].first, mf.window[0].second - p[0], p[1] - mf.window[1].first,
                         mf.window[1].second - p[1]});
  if (!(cfg.radius > 0.0)) throw InputError("--point must lie strictly inside the probe window");

  const Window w{mf.window[0].first, mf.window[0].second, mf.window[1].first, mf.window[1].second};
  std::optional<DoublePotential> h;
  std::string volumes = "quadrature";
  if (mf.ray && (mf.section || mf.ray->dim() == 1)) {
    const std::vector<double> anchor = mf.section ? mf.section->anchor : p;
    const int i = mf.section ? mf.section->i : 0, j = mf.section ? mf.section->j : 0;
    h = ray_distance_potential(mf.ray, anchor, i, j, w, p[0], p[1]);
    volumes = "closed_form";
  } else {
    h = DoublePotential::by_quadrature(mf.model, w, p[0], p[1], mf.tol);
  }
  const LoopFit f = fit_loop_coefficient(mf.model, {p[0], p[1]}, cfg, std::move(h));

  json report = envelope("holonomy");
  report["model"] = model_json(mf);
  report["volumes"] = volumes;
  report["fit"] = {{"point", f.p},
                   {"steps", f.steps},
                   {"c_u_steps", f.c_u_steps},
                   {"c_v_steps", f.c_v_steps},
                   {"displacement", f.displacement},
                   {"c_u", f.c_u},
                   {"c_v", f.c_v},
                   {"kappa", f.kappa},
                   {"reference", f.reference},
                   {"deviation", f.deviation},
                   {"kappa_deviation", f.kappa_deviation},
                   {"noise_floor", f.noise_floor},
                   {"converged", f.converged}};
  emit(std::move(report), a.out, start);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature of bi-Lagrangian webs"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "curvature report at probe points");
  analyze->add_option("--model", an.model, "model file (JSON)")->required();
  analyze->add_option("--out", an.out, "output file, stdout when omitted");
  analyze->add_option("--points", an.points, "points \"a,b,...;c,d,...\", replacing the file's probe points");
  analyze->add_option("--grid", an.grid, "also sample K cell centres per coordinate of the window");
  analyze->add_option("--jobs", an.jobs, "worker threads");
  analyze->add_option("--jet-order", an.jet_order, "jet order (at least 2)");

  VerifyArgs ve;
  auto* verify_cmd = app.add_subcommand("verify", "run verification suites");
  std::vector<std::string> suites = verify::suite_names();
  suites.push_back("all");
  verify_cmd->add_option("--suite", ve.suite, "suite name or all")->check(CLI::IsMember(suites));
  verify_cmd->add_option("--trials", ve.trials, "samples per criterion");
  verify_cmd->add_option("--n", ve.n, "dimension for dimension-ranging criteria");
  verify_cmd->add_option("--seed", ve.seed, "base seed");
  verify_cmd->add_option("--out", ve.out, "output file, stdout when omitted");

  HolonomyArgs ho;
  auto* holonomy = app.add_subcommand("holonomy", "fit the cubic coefficients of the reflection loop");
  holonomy->add_option("--model", ho.model, "model file (JSON) of a 2D web or a section")->required();
  holonomy->add_option("--point", ho.point, "base point \"x,y\"");
  holonomy->add_option("--ladder", ho.ladder, "step sizes \"h1,h2,...\"");
  holonomy->add_option("--out", ho.out, "output file, stdout when omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*analyze) return run_analyze(an);
    if (*verify_cmd) return run_verify(ve);
    if (*holonomy) return run_holonomy(ho);
  } catch (const DomainError& e) {
    std::cerr << "biweb: " << e.what() << "\n";
    return kExitDomain;
  } catch (const NumericalError& e) {
    std::cerr << "biweb: numerical failure: " << e.what() << " (achieved " << e.achieved() << ")\n";
    return kExitDomain;
  } catch (const InputError& e) {
    std::cerr << "biweb: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "biweb: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
