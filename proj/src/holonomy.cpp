#include "biweb/holonomy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "biweb/errors.hpp"

namespace biweb {

namespace {

DoublePotential working_potential(const std::shared_ptr<const WebModel>& m, Point2 p, const ReflectionConfig& cfg,
                                  std::optional<DoublePotential> h) {
  if (!m) throw InputError("null model");
  if (m->dim() != 1) throw InputError("holonomy loops need a 2D web, got leaf dimension " + std::to_string(m->dim()));
  if (!(cfg.volume_tol > 0.0)) throw InputError("volume tolerance must be positive");
  if (!(cfg.expansion > 1.0)) throw InputError("bracket expansion factor must exceed 1");
  if (cfg.max_iterations < 1) throw InputError("max_iterations must be positive");
  if (!(cfg.radius > 0.0)) throw InputError("working radius must be positive");
  if (h) return *std::move(h);
  const Window w{p[0] - cfg.radius, p[0] + cfg.radius, p[1] - cfg.radius, p[1] + cfg.radius};
  return build_potential(m, w, p[0], p[1]);
}

}  // namespace

Holonomy::Holonomy(std::shared_ptr<const WebModel> m, Point2 p, ReflectionConfig cfg, std::optional<DoublePotential> h)
    : m_(m), p_(p), cfg_(std::move(cfg)), h_(working_potential(m, p, cfg_, std::move(h))) {}

double Holonomy::area(double x, double y) const { return region_area(h_, p_[0], p_[1], x, y); }

double Holonomy::edge(double t, Axis along) const {
  const WebModel& m = *m_;
  const double px = p_[0], py = p_[1];
  if (along == Axis::F) {
    return integrate_1d([&](double u) { return omega_coefficient(m, u, py); }, px, t).value;
  }
  return integrate_1d([&](double v) { return omega_coefficient(m, px, v); }, py, t).value;
}

Point2 Holonomy::reflect(Point2 q, Axis axis) const {
  const int k = axis == Axis::F ? 0 : 1;  // the coordinate that moves
  const double c = p_[static_cast<std::size_t>(k)], qk = q[static_cast<std::size_t>(k)];
  const double other = q[static_cast<std::size_t>(1 - k)], other_base = p_[static_cast<std::size_t>(1 - k)];
  if (qk == c) return q;

  std::function<double(double)> volume;
  if (other == other_base) {
    // q on the other mirror leaf: the regions degenerate, use their first-order limit
    volume = [this, axis](double t) { return edge(t, axis); };
  } else if (axis == Axis::F) {
    volume = [this, other](double t) { return area(t, other); };
  } else {
    volume = [this, other](double t) { return area(other, t); };
  }
  const double target = -volume(qk);
  auto mismatch = [&](double t) { return volume(t) - target; };

  const double dir = qk > c ? -1.0 : 1.0;
  const double limit = dir < 0 ? (axis == Axis::F ? h_.window().x_lo : h_.window().y_lo)
                               : (axis == Axis::F ? h_.window().x_hi : h_.window().y_hi);
  const double f0 = mismatch(c);  // = -target, nonzero
  double len = std::abs(qk - c), near = c, far = c;
  double ffar = f0;
  bool bracketed = false;
  for (int it = 0; it < cfg_.max_iterations; ++it) {
    far = c + dir * len;
    if (dir * (far - limit) > 0) far = limit;
    ffar = mismatch(far);
    if (std::signbit(ffar) != std::signbit(f0) || ffar == 0.0) {
      bracketed = true;
      break;
    }
    near = far;
    if (far == limit) break;
    len *= cfg_.expansion;
  }
  if (!bracketed) {
    throw DomainError("bracket failure", "no equal-volume reflection of (" + std::to_string(q[0]) + ", " +
                                             std::to_string(q[1]) + ") inside the working square");
  }

  double a = near, b = far, fa = mismatch(near);
  double root = far;
  for (int it = 0; it < cfg_.max_iterations && ffar != 0.0; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid == a || mid == b) break;
    const double fm = mismatch(mid);
    root = mid;
    if (std::abs(fm) <= cfg_.volume_tol) break;
    if (std::signbit(fm) == std::signbit(fa)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
    root = 0.5 * (a + b);
  }
  Point2 out = q;
  out[static_cast<std::size_t>(k)] = root;
  return out;
}

Point2 Holonomy::loop(Point2 q) const {
  q = reflect(q, Axis::F);
  q = reflect(q, Axis::G);
  q = reflect(q, Axis::F);
  return reflect(q, Axis::G);
}

double extrapolate_to_zero(const std::vector<double>& h, const std::vector<double>& f) {
  if (h.empty() || h.size() != f.size()) throw InputError("extrapolation needs matching, non-empty samples");
  std::vector<double> t = f;
  const std::size_t n = h.size();
  for (std::size_t level = 1; level < n; ++level)
    for (std::size_t i = 0; i + level < n; ++i) {
      const double hi = h[i], hj = h[i + level];
      t[i] = (hj * t[i] - hi * t[i + 1]) / (hj - hi);
    }
  return t[0];
}

LoopFit Holonomy::fit() const {
  LoopFit r;
  r.p = p_;
  if (cfg_.ladder.empty()) throw InputError("empty step ladder");
  for (double h : cfg_.ladder) {
    if (!(h > 0.0) || h >= cfg_.radius) throw InputError("ladder steps must lie in (0, radius)");
    const Point2 q{p_[0] + h, p_[1] + h};
    const Point2 img = loop(q);
    const double h3 = h * h * h;
    r.steps.push_back(h);
    r.c_u_steps.push_back((img[0] - q[0]) / h3);
    r.c_v_steps.push_back((img[1] - q[1]) / h3);
    r.displacement.push_back(std::hypot(img[0] - q[0], img[1] - q[1]));
  }
  r.c_u = extrapolate_to_zero(r.steps, r.c_u_steps);
  r.c_v = extrapolate_to_zero(r.steps, r.c_v_steps);

  const std::array<double, 2> pt{p_[0], p_[1]};
  r.kappa = ricci(*m_, pt)(0, 0);
  r.reference = 2.0 * r.kappa;
  r.deviation = r.reference != 0.0 ? std::abs(r.c_u - r.reference) / std::abs(r.reference)
                                   : std::numeric_limits<double>::infinity();
  r.kappa_deviation =
      r.kappa != 0.0 ? std::abs(r.c_u - r.kappa) / std::abs(r.kappa) : std::numeric_limits<double>::infinity();

  const double hmin = *std::min_element(r.steps.begin(), r.steps.end());
  const double a0 = std::abs(omega_coefficient(*m_, p_[0], p_[1]));
  const double scale = std::max({std::abs(p_[0]), std::abs(p_[1]), cfg_.radius});
  const double resolution =
      std::max(4.0 * std::numeric_limits<double>::epsilon() * scale, cfg_.volume_tol / (a0 * hmin));
  r.noise_floor = 4.0 * resolution / (hmin * hmin * hmin);

  if (r.steps.size() >= 2) {
    const std::vector<double> hs(r.steps.begin() + 1, r.steps.end()), cs(r.c_u_steps.begin() + 1, r.c_u_steps.end());
    const double coarse = extrapolate_to_zero(hs, cs);
    r.converged = std::abs(coarse - r.c_u) <= std::max(0.01 * std::abs(r.c_u), r.noise_floor);
  }
  return r;
}

Point2 reflect(std::shared_ptr<const WebModel> m, Point2 p, Point2 q, Axis axis, const ReflectionConfig& cfg) {
  return Holonomy(std::move(m), p, cfg).reflect(q, axis);
}

Point2 loop(std::shared_ptr<const WebModel> m, Point2 p, Point2 q, const ReflectionConfig& cfg) {
  return Holonomy(std::move(m), p, cfg).loop(q);
}

LoopFit fit_loop_coefficient(std::shared_ptr<const WebModel> m, Point2 p, const ReflectionConfig& cfg,
                             std::optional<DoublePotential> h) {
  return Holonomy(std::move(m), p, cfg, std::move(h)).fit();
}

}  // namespace biweb
