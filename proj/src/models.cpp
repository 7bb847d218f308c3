#include "biweb/models.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "biweb/errors.hpp"
#include "biweb/expr.hpp"

namespace biweb {

namespace {

std::vector<double> values_of(const Params& params) {
  std::vector<double> v;
  for (const auto& p : params) v.push_back(p.second);
  return v;
}

std::vector<std::string> with_params(std::vector<std::string> vars, const Params& params) {
  for (const auto& p : params) vars.push_back(p.first);
  return vars;
}

std::vector<Jet> constant_coords(std::span<const double> p, int order = 0) {
  JetContext ctx(static_cast<int>(p.size()), order);
  std::vector<Jet> c;
  for (double v : p) c.emplace_back(ctx, v);
  return c;
}

std::vector<Jet> seeded_coords(std::span<const double> p, int order) {
  JetContext ctx(static_cast<int>(p.size()), order);
  std::vector<Jet> c;
  for (std::size_t k = 0; k < p.size(); ++k) c.push_back(seed_variable(ctx, static_cast<int>(k), p[k]));
  return c;
}

Jet det2(const Jet& a0, const Jet& a1, const Jet& b0, const Jet& b1) { return a0 * b1 - a1 * b0; }

double det2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a(0) * b(1) - a(1) * b(0); }

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

std::vector<std::string> graph_variables(int m, char letter) {
  if (m == 1) return {std::string(1, letter), std::string(1, letter) + "1"};
  std::vector<std::string> v;
  for (int k = 1; k <= m; ++k) v.push_back(letter + std::to_string(k));
  return v;
}

// Slots for graph_variables(m, letter): both names map to the single coordinate when m = 1.
std::vector<int> graph_slots(int m, int offset) {
  if (m == 1) return {offset, offset};
  std::vector<int> s;
  for (int k = 0; k < m; ++k) s.push_back(offset + k);
  return s;
}

// d^2 log|F| / dv0 dv1, two orders lower than F.
Jet mixed_log_derivative(const Jet& f, int v0, int v1) { return abs_log(f).derivative(v0).derivative(v1); }

}  // namespace

// ---------------------------------------------------------------- ray space

RaySpaceModel::RaySpaceModel(int n, std::vector<JetFn> x, std::vector<JetFn> y, double delta_sep)
    : n_(n), x_(std::move(x)), y_(std::move(y)), delta_sep_(delta_sep) {
  if (n < 2) throw InputError("ray_space model: ambient dimension must be >= 2");
  if (x_.size() != static_cast<std::size_t>(n) || y_.size() != static_cast<std::size_t>(n)) {
    throw InputError("ray_space model: expected " + std::to_string(n) + " components per hypersurface");
  }
  if (!(delta_sep > 0.0)) throw InputError("ray_space model: separation must be positive");
  const int m = n - 1;
  for (int a = 0; a < m; ++a)
    for (int k = 0; k < n; ++k) xs_.push_back(partial_fn(x_[static_cast<std::size_t>(k)], {a}, 2 * m));
  for (int b = 0; b < m; ++b)
    for (int k = 0; k < n; ++k) yt_.push_back(partial_fn(y_[static_cast<std::size_t>(k)], {m + b}, 2 * m));
}

RaySpaceModel make_graph_model(int n, JetFn f, JetFn g, double delta_sep) {
  const int m = n - 1;
  if (m < 1) throw InputError("ray_space model: ambient dimension must be >= 2");
  std::vector<JetFn> x, y;
  for (int k = 0; k < m; ++k) {
    x.push_back([k](std::span<const Jet> c) { return c[static_cast<std::size_t>(k)]; });
    y.push_back([k, m](std::span<const Jet> c) { return c[static_cast<std::size_t>(m + k)]; });
  }
  x.push_back([f, m](std::span<const Jet> c) { return f(c.subspan(0, static_cast<std::size_t>(m))); });
  y.push_back([g, m](std::span<const Jet> c) {
    return g(c.subspan(static_cast<std::size_t>(m), static_cast<std::size_t>(m)));
  });
  RaySpaceModel model(n, std::move(x), std::move(y), delta_sep);
  model.graph_f_ = std::move(f);
  model.graph_g_ = std::move(g);
  return model;
}

RaySpaceModel RaySpaceModel::from_graphs(int n, const std::string& f, const std::string& g, const Params& params,
                                         double delta_sep) {
  const int m = n - 1;
  if (m < 1) throw InputError("ray_space model: ambient dimension must be >= 2");
  auto fvars = with_params(graph_variables(m, 's'), params);
  auto gvars = graph_variables(m, 's');
  for (const auto& name : graph_variables(m, 't')) gvars.push_back(name);
  gvars = with_params(gvars, params);
  auto gslots = graph_slots(m, 0);
  for (int s : graph_slots(m, 0)) gslots.push_back(s);
  JetFn ff = bind_expr(parse(f, std::span<const std::string>(fvars)), graph_slots(m, 0), values_of(params));
  JetFn gg = bind_expr(parse(g, std::span<const std::string>(gvars)), gslots, values_of(params));
  return make_graph_model(n, std::move(ff), std::move(gg), delta_sep);
}

RaySpaceModel RaySpaceModel::from_curves(const std::array<std::string, 2>& x, const std::array<std::string, 2>& y,
                                         const Params& params, double delta_sep) {
  const auto xv = with_params({"s"}, params);
  const auto yv = with_params({"t"}, params);
  std::vector<JetFn> xf, yf;
  for (const auto& src : x) xf.push_back(bind_expr(parse(src, std::span<const std::string>(xv)), {0}, values_of(params)));
  for (const auto& src : y) yf.push_back(bind_expr(parse(src, std::span<const std::string>(yv)), {1}, values_of(params)));
  return RaySpaceModel(2, std::move(xf), std::move(yf), delta_sep);
}

RaySpaceModel::Frame RaySpaceModel::frame(std::span<const Jet> coords) const {
  Frame fr;
  for (const auto& fn : x_) fr.x.push_back(fn(coords));
  for (const auto& fn : y_) fr.y.push_back(fn(coords));
  for (const auto& fn : xs_) fr.xs.push_back(fn(coords));
  for (const auto& fn : yt_) fr.yt.push_back(fn(coords));
  return fr;
}

JetMatrix RaySpaceModel::omega_jets(std::span<const Jet> coords) const {
  const int m = n_ - 1;
  const Frame fr = frame(coords);
  const JetContext& ctx = coords[0].context();
  std::vector<Jet> d;
  Jet d2(ctx, 0.0);
  for (int k = 0; k < n_; ++k) {
    d.push_back(fr.x[static_cast<std::size_t>(k)] - fr.y[static_cast<std::size_t>(k)]);
    d2 += d.back() * d.back();
  }
  const Jet inv_d = pow(d2, -0.5);
  const Jet inv_d2 = reciprocal(d2);
  auto dot = [&](const std::vector<Jet>& v, int a, const std::vector<Jet>& w) {
    Jet acc(ctx, 0.0);
    for (int k = 0; k < n_; ++k) acc += v[static_cast<std::size_t>(a * n_ + k)] * w[static_cast<std::size_t>(k)];
    return acc;
  };
  std::vector<Jet> xd, yd;
  for (int a = 0; a < m; ++a) {
    xd.push_back(dot(fr.xs, a, d));
    yd.push_back(dot(fr.yt, a, d));
  }
  JetMatrix A(ctx, m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      Jet xy(ctx, 0.0);
      for (int k = 0; k < n_; ++k) {
        xy += fr.xs[static_cast<std::size_t>(a * n_ + k)] * fr.yt[static_cast<std::size_t>(b * n_ + k)];
      }
      A(a, b) = (xd[static_cast<std::size_t>(a)] * yd[static_cast<std::size_t>(b)] * inv_d2 - xy) * inv_d;
    }
  }
  return A;
}

void RaySpaceModel::check_point(std::span<const double> p) const {
  const int m = n_ - 1;
  if (p.size() != static_cast<std::size_t>(2 * m)) throw InputError("ray_space model: point has wrong dimension");
  const auto coords = constant_coords(p);
  const Frame fr = frame(coords);
  Eigen::VectorXd d(n_);
  for (int k = 0; k < n_; ++k) d(k) = fr.x[static_cast<std::size_t>(k)].value() - fr.y[static_cast<std::size_t>(k)].value();
  if (!(d.norm() >= delta_sep_)) {
    throw DomainError("separation violated", "|x - y| = " + std::to_string(d.norm()) + " below " +
                                                 std::to_string(delta_sep_));
  }
  Eigen::MatrixXd X(n_, n_), Y(n_, n_);
  for (int a = 0; a < m; ++a) {
    for (int k = 0; k < n_; ++k) {
      X(k, a) = fr.xs[static_cast<std::size_t>(a * n_ + k)].value();
      Y(k, a) = fr.yt[static_cast<std::size_t>(a * n_ + k)].value();
    }
  }
  X.col(m) = d;
  Y.col(m) = d;
  if (std::abs(X.determinant()) < kTransversalityTol || std::abs(Y.determinant()) < kTransversalityTol) {
    throw DomainError("transversality", "the ray is tangent to a hypersurface");
  }
}

Jet rayspace_volume_coeff(const RaySpaceModel& m, std::span<const double> s, std::span<const double> t, int order) {
  const int n = m.ambient_dim();
  const int dim = n - 1;
  if (s.size() != static_cast<std::size_t>(dim) || t.size() != static_cast<std::size_t>(dim)) {
    throw InputError("rayspace_volume_coeff: s and t must have n-1 components");
  }
  std::vector<double> p(s.begin(), s.end());
  p.insert(p.end(), t.begin(), t.end());
  m.check_point(p);
  const auto coords = seeded_coords(p, order);
  const JetContext& ctx = coords[0].context();
  const auto fr = m.frame(coords);
  JetMatrix X(ctx, n, n), Y(ctx, n, n);
  Jet d2(ctx, 0.0);
  for (int k = 0; k < n; ++k) {
    Jet dk = fr.x[static_cast<std::size_t>(k)] - fr.y[static_cast<std::size_t>(k)];
    d2 += dk * dk;
    X(k, dim) = dk;
    Y(k, dim) = dk;
    for (int a = 0; a < dim; ++a) {
      X(k, a) = fr.xs[static_cast<std::size_t>(a * n + k)];
      Y(k, a) = fr.yt[static_cast<std::size_t>(a * n + k)];
    }
  }
  const double sign = (n * (n - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
  return sign * factorial(n - 1) * determinant(X) * determinant(Y) * pow(d2, -0.5 * (n + 1));
}

double rayspace_xi(const RaySpaceModel& m, double s, double t) {
  if (m.ambient_dim() != 2) throw InputError("rayspace_xi: planar curves only (n = 2)");
  const double pt[2] = {s, t};
  m.check_point(pt);
  const auto coords = constant_coords(pt);
  Eigen::Vector2d x, y, x1, y1, x2, y2;
  for (int k = 0; k < 2; ++k) {
    const auto& xf = m.x_fns()[static_cast<std::size_t>(k)];
    const auto& yf = m.y_fns()[static_cast<std::size_t>(k)];
    x(k) = xf(coords).value();
    y(k) = yf(coords).value();
    x1(k) = partial_fn(xf, {0}, 2)(coords).value();
    x2(k) = partial_fn(xf, {0, 0}, 2)(coords).value();
    y1(k) = partial_fn(yf, {1}, 2)(coords).value();
    y2(k) = partial_fn(yf, {1, 1}, 2)(coords).value();
  }
  const Eigen::Vector2d d = x - y;
  const double tx = det2(x1, d), ty = det2(y1, d);
  if (std::abs(tx) < kTransversalityTol || std::abs(ty) < kTransversalityTol) {
    throw DomainError("transversality", "det(x', x-y) or det(y', x-y) vanishes");
  }
  const double dd = d.squaredNorm();
  return -6.0 * d.dot(x1) * d.dot(y1) / (dd * dd) + 3.0 * x1.dot(y1) / dd +
         det2(x1, y1) * det2(x2, d) / (tx * tx) - det2(x2, y1) / tx -
         det2(y1, x1) * det2(y2, d) / (ty * ty) + det2(y2, x1) / ty;
}

RaySpaceModel sphere_model(const std::array<double, 3>& c, double r) {
  if (!(r > 0.0)) throw InputError("sphere model: radius must be positive");
  const Params params = {{"c1", c[0]}, {"c2", c[1]}, {"c3", c[2]}, {"r", r}};
  return RaySpaceModel::from_graphs(3, "c3 + sqrt(r^2 - (s1 - c1)^2 - (s2 - c2)^2)",
                                    "c3 - sqrt(r^2 - (s1 - c1)^2 - (s2 - c2)^2)", params);
}

// ---------------------------------------------------------------- c_jk

RhoSigmaJets rho_sigma(const JetFn& f, const JetFn& g, int num_args, int i, std::span<const double> s, int order) {
  if (i < 0 || i >= num_args || s.size() != static_cast<std::size_t>(num_args)) {
    throw InputError("rho_sigma: bad direction or point");
  }
  JetContext ctx(1, order);
  std::vector<Jet> args;
  for (int k = 0; k < num_args; ++k) {
    args.push_back(k == i ? seed_variable(ctx, 0, s[static_cast<std::size_t>(k)]) : Jet(ctx, s[static_cast<std::size_t>(k)]));
  }
  const Jet fj = f(args), gj = g(args);
  RhoSigmaJets rs;
  for (int k = 0; k <= order; ++k) {
    const MultiIndex a = MultiIndex::unit(1, 0, k);
    rs.rho.push_back(fj.partial(a) - gj.partial(a));
    rs.sigma.push_back(fj.partial(a) + gj.partial(a));
  }
  return rs;
}

std::string to_string(CjkIdentity id) {
  switch (id) {
    case CjkIdentity::C00: return "c00";
    case CjkIdentity::C10PlusC01: return "c10+c01";
    case CjkIdentity::C10MinusC01: return "c10-c01";
    case CjkIdentity::C20PlusC02: return "c20+c02";
    case CjkIdentity::C11: return "c11";
  }
  return "?";
}

CjkIdentity cjk_from_string(const std::string& name) {
  for (auto id : kAllCjk) {
    if (to_string(id) == name) return id;
  }
  throw InputError("unknown c_jk identity '" + name + "'");
}

double cjk_polynomial(CjkIdentity id, int n, const RhoSigmaJets& rs) {
  const int need = id == CjkIdentity::C20PlusC02 ? 4 : 3;
  if (rs.rho.size() <= static_cast<std::size_t>(need)) throw InputError("cjk_polynomial: insufficient jet order");
  const double N = n;
  const double r = rs.rho[0], r1 = rs.rho[1], r2 = rs.rho[2], r3 = rs.rho[3];
  const double s1 = rs.sigma[1], s2 = rs.sigma[2], s3 = rs.sigma[3];
  switch (id) {
    case CjkIdentity::C00:
      return (1 + N) * (4 + r1 * r1 - s1 * s1) + 4 * r * r2;
    case CjkIdentity::C10PlusC01:
      return 4 * r * r * r3 - 0.5 * (1 + N) * ((3 + N) * r1 * (4 + r1 * r1 - s1 * s1) + 4 * r * s1 * s2);
    case CjkIdentity::C10MinusC01:
      return 0.5 * ((1 + N) * (4 * (N - 11) + (N - 3) * r1 * r1) * s1 - (N - 3) * (N + 1) * s1 * s1 * s1 +
                    4 * r * ((N + 7) * r1 * s2 + 2 * r * s3));
    case CjkIdentity::C20PlusC02: {
      const double r4 = rs.rho[4];
      const double r1s = r1 * r1, s1s = s1 * s1;
      return 0.5 * (2 * (N + 1) * r1s * (2 * N * (N + 20) + 6 - (11 * N + 3) * s1s) +
                    8 * (N + 1) * (N + 6) * r * r1 * s1 * s2 + (N + 1) * (N * (N + 14) + 9) * r1s * r1s +
                    (N + 1) * (4 * ((N - 22) * N + 49) * s1s + 96 * (N - 1) - ((N - 8) * N + 3) * s1s * s1s) +
                    16 * r * r * (r * r4 + 3 * s2 * s2));
    }
    case CjkIdentity::C11: {
      const double r1s = r1 * r1, s1s = s1 * s1;
      return (N + 1) * (N - 3) * (N - 5) / 8 * (r1s * r1s - 8 * s1s + s1s * s1s - 2 * r1s * (s1s - 4) + 16) -
             2 * (24 * (N + 1) * s1s + (N + 7) * r * r * s2 * s2);
    }
  }
  return 0.0;
}

double cjk_scale(CjkIdentity id) {
  return id == CjkIdentity::C20PlusC02 || id == CjkIdentity::C11 ? Calibration::kCjkScaleSecond
                                                                  : Calibration::kCjkScaleFirst;
}

void reduce_onto_variety(CjkIdentity id, int n, RhoSigmaJets& rs) {
  if (rs.rho.size() < 5 || rs.sigma.size() < 5) throw InputError("reduce_onto_variety: need jets through order 4");
  auto solve = [&](CjkIdentity eq, double& unknown) {
    unknown = 0.0;
    const double p0 = cjk_polynomial(eq, n, rs);
    unknown = 1.0;
    const double p1 = cjk_polynomial(eq, n, rs);
    if (p1 == p0) throw DomainError("degenerate", "reduction equation does not involve its unknown");
    unknown = -p0 / (p1 - p0);
  };
  if (id == CjkIdentity::C00) return;
  solve(CjkIdentity::C00, rs.rho[2]);
  if (id == CjkIdentity::C10PlusC01 || id == CjkIdentity::C10MinusC01) return;
  solve(CjkIdentity::C10PlusC01, rs.rho[3]);
  solve(CjkIdentity::C10MinusC01, rs.sigma[3]);
}

double cjk_from_kappa(const RaySpaceModel& m, int i, int j, int k, std::span<const double> s) {
  if (!m.is_graph()) throw InputError("c_jk: requires a graph model");
  const int dim = m.dim();
  if (i < 0 || i >= dim || s.size() != static_cast<std::size_t>(dim)) throw InputError("c_jk: bad direction or point");
  std::vector<double> p(s.begin(), s.end());
  p.insert(p.end(), s.begin(), s.end());
  m.check_point(p);
  // Jets along the (s_i, t_i) plane only; the other coordinates stay at s.
  JetContext ctx(2, j + k + 2);
  std::vector<Jet> coords;
  for (int side = 0; side < 2; ++side) {
    for (int a = 0; a < dim; ++a) {
      const double v = s[static_cast<std::size_t>(a)];
      coords.push_back(a == i ? seed_variable(ctx, side, v) : Jet(ctx, v));
    }
  }
  const Jet kappa = mixed_log_derivative(determinant(m.omega_jets(coords)), 0, 1);
  const auto rs = rho_sigma(*m.graph_f(), *m.graph_g(), dim, i, s, 0);
  return std::pow(rs.rho[0], j + k + 2) * kappa.partial(MultiIndex({j, k}));
}

CjkCheck ray_cjk_check(const RaySpaceModel& m, int i, CjkIdentity id, std::span<const double> s) {
  if (!m.is_graph()) throw InputError("c_jk: requires a graph model");
  auto c = [&](int j, int k) { return cjk_from_kappa(m, i, j, k, s); };
  double combo = 0.0;
  switch (id) {
    case CjkIdentity::C00: combo = c(0, 0); break;
    case CjkIdentity::C10PlusC01: combo = c(1, 0) + c(0, 1); break;
    case CjkIdentity::C10MinusC01: combo = c(1, 0) - c(0, 1); break;
    case CjkIdentity::C20PlusC02: combo = c(2, 0) + c(0, 2); break;
    case CjkIdentity::C11: combo = c(1, 1); break;
  }
  CjkCheck out;
  out.lhs = cjk_scale(id) * combo;
  out.rhs = cjk_polynomial(id, m.ambient_dim(), rho_sigma(*m.graph_f(), *m.graph_g(), m.dim(), i, s, 4));
  return out;
}

// ---------------------------------------------------------------- tangent lines

TangentLineModel::TangentLineModel(std::array<JetFn, 2> gl, std::array<JetFn, 2> gk)
    : gl_(std::move(gl)), gk_(std::move(gk)) {
  for (int c = 0; c < 2; ++c) {
    gl1_[static_cast<std::size_t>(c)] = partial_fn(gl_[static_cast<std::size_t>(c)], {0}, 2);
    gl2_[static_cast<std::size_t>(c)] = partial_fn(gl_[static_cast<std::size_t>(c)], {0, 0}, 2);
    gk1_[static_cast<std::size_t>(c)] = partial_fn(gk_[static_cast<std::size_t>(c)], {1}, 2);
    gk2_[static_cast<std::size_t>(c)] = partial_fn(gk_[static_cast<std::size_t>(c)], {1, 1}, 2);
  }
}

TangentLineModel TangentLineModel::from_exprs(const std::array<std::string, 2>& gl,
                                              const std::array<std::string, 2>& gk, const Params& params) {
  const auto sv = with_params({"s"}, params);
  const auto tv = with_params({"t"}, params);
  std::array<JetFn, 2> l, k;
  for (int c = 0; c < 2; ++c) {
    l[static_cast<std::size_t>(c)] =
        bind_expr(parse(gl[static_cast<std::size_t>(c)], std::span<const std::string>(sv)), {0}, values_of(params));
    k[static_cast<std::size_t>(c)] =
        bind_expr(parse(gk[static_cast<std::size_t>(c)], std::span<const std::string>(tv)), {1}, values_of(params));
  }
  return TangentLineModel(std::move(l), std::move(k));
}

TangentLineModel TangentLineModel::from_graphs(const std::string& f, const std::string& g, const Params& params) {
  const auto sv = with_params({"s"}, params);
  return from_graph_fns(bind_expr(parse(f, std::span<const std::string>(sv)), {0}, values_of(params)),
                        bind_expr(parse(g, std::span<const std::string>(sv)), {0}, values_of(params)));
}

TangentLineModel TangentLineModel::from_graph_fns(JetFn f, JetFn g) {
  auto first = [](std::span<const Jet> c) { return c[0]; };
  auto second = [](std::span<const Jet> c) { return c[1]; };
  JetFn f_at_s = [f](std::span<const Jet> c) { return f(c.subspan(0, 1)); };
  JetFn g_at_t = [g](std::span<const Jet> c) { return g(c.subspan(1, 1)); };
  TangentLineModel model({first, f_at_s}, {second, g_at_t});
  model.graph_f_ = std::move(f);
  model.graph_g_ = std::move(g);
  return model;
}

TangentLineModel::Frame TangentLineModel::frame(std::span<const Jet> coords) const {
  Frame fr;
  for (int c = 0; c < 2; ++c) {
    const auto u = static_cast<std::size_t>(c);
    fr.l.push_back(gl_[u](coords));
    fr.l1.push_back(gl1_[u](coords));
    fr.l2.push_back(gl2_[u](coords));
    fr.k.push_back(gk_[u](coords));
    fr.k1.push_back(gk1_[u](coords));
    fr.k2.push_back(gk2_[u](coords));
  }
  return fr;
}

JetMatrix TangentLineModel::omega_jets(std::span<const Jet> coords) const {
  const Frame fr = frame(coords);
  const Jet d0 = fr.l[0] - fr.k[0], d1 = fr.l[1] - fr.k[1];
  const Jet chord_l = det2(fr.l1[0], fr.l1[1], d0, d1);
  const Jet chord_k = det2(fr.k1[0], fr.k1[1], d0, d1);
  const Jet curv_l = det2(fr.l1[0], fr.l1[1], fr.l2[0], fr.l2[1]);
  const Jet curv_k = det2(fr.k1[0], fr.k1[1], fr.k2[0], fr.k2[1]);
  const Jet cross = det2(fr.l1[0], fr.l1[1], fr.k1[0], fr.k1[1]);
  JetMatrix A(coords[0].context(), 1, 1);
  A(0, 0) = chord_l * chord_k * curv_l * curv_k * pow(reciprocal(cross), 3);
  return A;
}

void TangentLineModel::check_point(std::span<const double> p) const {
  if (p.size() != 2) throw InputError("tangent model: point must be (s, t)");
  const auto fr = frame(constant_coords(p));
  auto v = [](const std::vector<Jet>& j) { return Eigen::Vector2d(j[0].value(), j[1].value()); };
  const Eigen::Vector2d d = v(fr.l) - v(fr.k);
  if (std::abs(det2(v(fr.l1), v(fr.k1))) < kTransversalityTol) {
    throw DomainError("tangency", "the tangent lines are parallel");
  }
  if (std::abs(det2(v(fr.l1), d)) < kTransversalityTol || std::abs(det2(v(fr.k1), d)) < kTransversalityTol) {
    throw DomainError("chord-tangency", "the chord is tangent to a curve");
  }
  if (std::abs(det2(v(fr.l1), v(fr.l2))) < kTransversalityTol) {
    throw DomainError("inflection", "det(gamma_L', gamma_L'') = 0");
  }
  if (std::abs(det2(v(fr.k1), v(fr.k2))) < kTransversalityTol) {
    throw DomainError("inflection", "det(gamma_K', gamma_K'') = 0");
  }
}

std::array<double, 2> tangent_intersection(const TangentLineModel& m, double s, double t) {
  const double pt[2] = {s, t};
  const auto fr = m.frame(constant_coords(pt));
  const double x1 = fr.l[0].value(), y1 = fr.l[1].value(), dx1 = fr.l1[0].value(), dy1 = fr.l1[1].value();
  const double x2 = fr.k[0].value(), y2 = fr.k[1].value(), dx2 = fr.k1[0].value(), dy2 = fr.k1[1].value();
  const double det = dx1 * dy2 - dx2 * dy1;
  if (std::abs(det) < kTransversalityTol) throw DomainError("tangency", "parallel tangents");
  // dy1 x - dx1 y = c1 and dy2 x - dx2 y = c2
  const double c1 = x1 * dy1 - y1 * dx1;
  const double c2 = x2 * dy2 - y2 * dx2;
  return {(dx1 * c2 - dx2 * c1) / det, (dy1 * c2 - dy2 * c1) / det};
}

Jet tangent_omega_coeff(const TangentLineModel& m, double s, double t, int order) {
  const double pt[2] = {s, t};
  m.check_point(pt);
  return m.omega_jets(seeded_coords(pt, order))(0, 0);
}

double tangent_kappa(const TangentLineModel& m, double s, double t) {
  const double pt[2] = {s, t};
  m.check_point(pt);
  const auto fr = m.frame(constant_coords(pt));
  auto v = [](const std::vector<Jet>& j) { return Eigen::Vector2d(j[0].value(), j[1].value()); };
  const Eigen::Vector2d l1 = v(fr.l1), l2 = v(fr.l2), k1 = v(fr.k1), k2 = v(fr.k2), d = v(fr.l) - v(fr.k);
  const double cross = det2(l1, k1), cl = det2(l1, d), ck = det2(k1, d);
  return cross * det2(l2, d) / (cl * cl) - det2(l2, k1) / cl + cross * det2(k2, d) / (ck * ck) -
         det2(l1, k2) / ck + 3.0 * det2(l2, k1) * det2(l1, k2) / (cross * cross) - 3.0 * det2(l2, k2) / cross;
}

namespace {

struct DiagonalData {
  double kappa, rho, rho1, q, rhs;
};

DiagonalData diagonal_data(const TangentLineModel& m, double s) {
  if (!m.graph_f() || !m.graph_g()) throw InputError("tangent c00: requires a graph model");
  const double sv[1] = {s};
  const auto rs = rho_sigma(*m.graph_f(), *m.graph_g(), 1, 0, sv, 2);
  DiagonalData d{};
  d.rho = rs.rho[0];
  d.rho1 = rs.rho[1];
  d.q = rs.rho[2] * rs.rho[2] - rs.sigma[2] * rs.sigma[2];
  if (std::abs(d.rho) < kTransversalityTol) throw DomainError("chord-tangency", "rho = 0");
  if (std::abs(d.rho1) < kTransversalityTol) throw DomainError("tangency", "rho_1 = 0");
  if (std::abs(d.q) < kTransversalityTol) throw DomainError("inflection", "rho_2^2 = sigma_2^2");
  d.rhs = 4 * d.rho1 * d.rho1 * rs.rho[2] + 3 * d.rho * d.q;
  const double pt[2] = {s, s};
  m.check_point(pt);
  d.kappa = mixed_log_derivative(m.omega_jets(seeded_coords(pt, 2))(0, 0), 0, 1).value();
  return d;
}

}  // namespace

TangentC00Check tangent_c00_check(const TangentLineModel& graphs, double s, std::optional<std::array<int, 3>> exponents) {
  const auto e = exponents.value_or(kTangentC00Exponents);
  const auto d = diagonal_data(graphs, s);
  TangentC00Check out;
  out.exponents = e;
  out.lhs = d.kappa * std::pow(d.rho, e[0]) * std::pow(d.rho1, e[1]) * std::pow(d.q, e[2]);
  out.rhs = d.rhs;
  out.ratio = out.rhs / out.lhs;
  return out;
}

NormalizationFit fit_tangent_normalization(const TangentLineModel& graphs, std::span<const double> probes) {
  if (probes.size() < 4) throw InputError("normalization fit: need at least 4 probes");
  const auto rows = static_cast<Eigen::Index>(probes.size());
  Eigen::MatrixXd M(rows, 4);
  Eigen::VectorXd b(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto d = diagonal_data(graphs, probes[static_cast<std::size_t>(r)]);
    M(r, 0) = 1.0;
    M(r, 1) = std::log(std::abs(d.rho));
    M(r, 2) = std::log(std::abs(d.rho1));
    M(r, 3) = std::log(std::abs(d.q));
    b(r) = std::log(std::abs(d.rhs / d.kappa));
  }
  const Eigen::VectorXd sol = M.colPivHouseholderQr().solve(b);
  NormalizationFit fit;
  for (int c = 0; c < 3; ++c) {
    fit.raw[static_cast<std::size_t>(c)] = sol(c + 1);
    fit.exponents[static_cast<std::size_t>(c)] = static_cast<int>(std::lround(sol(c + 1)));
  }
  std::vector<double> ratios;
  for (double s : probes) ratios.push_back(tangent_c00_check(graphs, s, fit.exponents).ratio);
  fit.constant = ratios.front();
  for (double r : ratios) fit.spread = std::max(fit.spread, std::abs(r / fit.constant - 1.0));
  return fit;
}

}  // namespace biweb
