#include "biweb/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "biweb/errors.hpp"

namespace biweb {

namespace {

struct GaussRule {
  std::array<double, 20> nodes{}, weights{};
};

// Legendre roots by Newton iteration from the Chebyshev-like initial guesses.
GaussRule make_rule() {
  GaussRule r;
  constexpr int n = 20;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[static_cast<std::size_t>(i)] = x;
    r.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

const GaussRule& rule() {
  static const GaussRule r = make_rule();
  return r;
}

template <class F>
double gauss(const F& f, double a, double b) {
  const GaussRule& r = rule();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
  return half * s;
}

}  // namespace

QuadratureResult integrate_1d(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double whole = gauss(f, a, b);
  const double halves = gauss(f, a, mid) + gauss(f, mid, b);
  return {halves, std::abs(whole - halves)};
}

QuadratureResult integrate_rectangle(const std::function<double(double, double)>& f, double x0, double x1,
                                     double y0, double y1) {
  double inner_err = 0.0;
  auto column = [&](double x) {
    QuadratureResult r = integrate_1d([&](double y) { return f(x, y); }, y0, y1);
    inner_err = std::max(inner_err, r.error);
    return r.value;
  };
  QuadratureResult outer = integrate_1d(column, x0, x1);
  outer.error += inner_err * std::abs(x1 - x0);
  return outer;
}

double omega_coefficient(const WebModel& m, double x, double y) {
  if (m.dim() != 1) throw InputError("double potentials need a 2D web, got leaf dimension " + std::to_string(m.dim()));
  const std::array<double, 2> p{x, y};
  return omega_matrix(m, p, 0).values()(0, 0);
}

DoublePotential DoublePotential::closed_form(Fn h, const Window& w, double x0, double y0) {
  if (!w.contains(x0, y0)) throw InputError("base point lies outside the window");
  DoublePotential d;
  d.raw_ = std::move(h);
  d.w_ = w;
  d.x0_ = x0;
  d.y0_ = y0;
  d.h00_ = d.raw_(x0, y0);
  return d;
}

DoublePotential DoublePotential::by_quadrature(std::shared_ptr<const WebModel> m, const Window& w, double x0,
                                               double y0, double tolerance) {
  if (!m) throw InputError("null model");
  if (m->dim() != 1) throw InputError("double potentials need a 2D web, got leaf dimension " + std::to_string(m->dim()));
  if (!w.contains(x0, y0)) throw InputError("base point lies outside the window");
  if (!(tolerance > 0.0)) throw InputError("quadrature tolerance must be positive");
  DoublePotential d;
  d.model_ = std::move(m);
  d.w_ = w;
  d.x0_ = x0;
  d.y0_ = y0;
  d.tol_ = tolerance;
  d.memo_ = std::make_shared<Memo>();
  return d;
}

double DoublePotential::operator()(double x, double y) const {
  if (!w_.contains(x, y)) {
    throw InputError("point (" + std::to_string(x) + ", " + std::to_string(y) + ") lies outside the potential window");
  }
  if (!model_) return raw_(x, y) - raw_(x0_, y) - raw_(x, y0_) + h00_;
  if (x == x0_ || y == y0_) return 0.0;
  {
    std::lock_guard<std::mutex> lock(memo_->mu);
    if (auto it = memo_->values.find({x, y}); it != memo_->values.end()) return it->second;
  }
  const WebModel& m = *model_;
  const QuadratureResult r =
      integrate_rectangle([&m](double u, double v) { return omega_coefficient(m, u, v); }, x0_, x, y0_, y);
  if (!std::isfinite(r.value) || r.error > tol_ * std::max(1.0, std::abs(r.value))) {
    throw NumericalError("quadrature did not converge: error estimate " + std::to_string(r.error), r.error);
  }
  std::lock_guard<std::mutex> lock(memo_->mu);
  memo_->values.emplace(std::make_pair(x, y), r.value);
  return r.value;
}

DoublePotential build_potential(std::shared_ptr<const WebModel> m, const Window& w, double x0, double y0) {
  return DoublePotential::by_quadrature(std::move(m), w, x0, y0);
}

DoublePotential ray_distance_potential(std::shared_ptr<const RaySpaceModel> m, std::vector<double> anchor, int i,
                                       int j, const Window& w, double x0, double y0) {
  if (!m) throw InputError("null model");
  const int d = m->dim();
  if (anchor.size() != static_cast<std::size_t>(2 * d)) throw InputError("anchor has the wrong number of coordinates");
  if (i < 0 || i >= d || j < 0 || j >= d) throw InputError("section indices out of range");
  DoublePotential::Fn h = [m, anchor = std::move(anchor), i, j, d](double s, double t) {
    std::vector<double> p = anchor;
    p[static_cast<std::size_t>(i)] = s;
    p[static_cast<std::size_t>(d + j)] = t;
    m->check_point(p);
    JetContext ctx(2 * d, 0);
    std::vector<Jet> coords;
    for (double v : p) coords.emplace_back(ctx, v);
    const RaySpaceModel::Frame f = m->frame(coords);
    double sq = 0.0;
    for (std::size_t k = 0; k < f.x.size(); ++k) {
      const double diff = f.x[k].value() - f.y[k].value();
      sq += diff * diff;
    }
    return std::sqrt(sq);
  };
  return DoublePotential::closed_form(std::move(h), w, x0, y0);
}

double region_area(const DoublePotential& h, double x, double y, double x2, double y2) {
  return h(x2, y2) + h(x, y) - h(x2, y) - h(x, y2);
}

double bisect(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0 && fb == 0.0) throw NumericalError("bisection: function vanishes at both ends of the bracket", 0.0);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (!(std::signbit(fa) != std::signbit(fb))) {
    throw NumericalError("bisection: root not bracketed (f(a) = " + std::to_string(fa) +
                             ", f(b) = " + std::to_string(fb) + ")",
                         std::min(std::abs(fa), std::abs(fb)));
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= std::min(a, b) || mid >= std::max(a, b)) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(fa)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

namespace {

void validate(const QuadProbe& pr) {
  if (!(pr.p[0] < pr.p[1] && pr.p[1] < pr.p[2]) || !(pr.q[0] < pr.q[1] && pr.q[1] < pr.q[2])) {
    throw InputError("quadrilateral probe needs p1 < p2 < p3 and q1 < q2 < q3");
  }
}

std::array<double, 4> four_areas(const DoublePotential& h, double p1, double p2, double p3, double q1, double q2,
                                 double q3) {
  return {region_area(h, p1, q1, p2, q2), region_area(h, p1, q2, p2, q3), region_area(h, p2, q2, p3, q3),
          region_area(h, p2, q1, p3, q2)};
}

double spread(const std::array<double, 4>& a) {
  const double quarter = 0.25 * (a[0] + a[1] + a[2] + a[3]);
  double r = 0.0;
  for (double v : a) r = std::max(r, std::abs(v - quarter));
  return r;
}

}  // namespace

QuadResult quad_condition(const DoublePotential& h, const QuadProbe& probe, QuadCondition which) {
  validate(probe);
  const auto [p1, p2g, p3] = probe.p;
  const auto [q1, q2g, q3] = probe.q;
  QuadResult r;
  r.which = which;
  switch (which) {
    case QuadCondition::Product: {
      r.p2 = p2g;
      r.q2 = q2g;
      r.areas = four_areas(h, p1, p2g, p3, q1, q2g, q3);
      r.residual = r.areas[0] * r.areas[2] - r.areas[1] * r.areas[3];
      return r;
    }
    case QuadCondition::EqualSplit: {
      r.p2 = bisect([&](double p) { return region_area(h, p1, q1, p, q3) - region_area(h, p, q1, p3, q3); }, p1, p3);
      r.q2 = bisect([&](double q) { return region_area(h, p1, q1, p3, q) - region_area(h, p1, q, p3, q3); }, q1, q3);
      r.areas = four_areas(h, p1, r.p2, p3, q1, r.q2, q3);
      r.residual = spread(r.areas);
      return r;
    }
    case QuadCondition::Cut: {
      r.q2 = bisect([&](double q) { return region_area(h, p1, q1, p3, q) - region_area(h, p1, q, p3, q3); }, q1, q3);
      r.p2 = bisect([&](double p) { return region_area(h, p1, q1, p, r.q2) - region_area(h, p, q1, p3, r.q2); }, p1,
                    p3);
      r.areas = four_areas(h, p1, r.p2, p3, q1, r.q2, q3);
      const auto& a = r.areas;
      r.premise_residual = std::abs((a[0] + a[3]) - (a[1] + a[2])) + std::abs(a[0] - a[3]);
      r.residual = spread(a);
      return r;
    }
  }
  throw InputError("unknown quadrilateral condition");
}

std::string to_string(QuadCondition c) {
  switch (c) {
    case QuadCondition::Product:
      return "product";
    case QuadCondition::EqualSplit:
      return "equal_split";
    case QuadCondition::Cut:
      return "cut";
  }
  return "?";
}

QuadCondition quad_condition_from_string(const std::string& name) {
  if (name == "product") return QuadCondition::Product;
  if (name == "equal_split") return QuadCondition::EqualSplit;
  if (name == "cut") return QuadCondition::Cut;
  throw InputError("unknown quadrilateral condition '" + name + "' (expected product, equal_split or cut)");
}

}  // namespace biweb
