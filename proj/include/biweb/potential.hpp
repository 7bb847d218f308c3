#pragma once

// Double potentials of 2D webs: h(x, y) with omega = d_x d_y h, normalized to
// vanish on the two coordinate lines through a base point. Symplectic areas of
// coordinate rectangles are mixed corner differences of h, and the
// quadrilateral flatness conditions are stated in terms of those areas.

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>

#include "biweb/models.hpp"
#include "biweb/web.hpp"

namespace biweb {

struct Window {
  double x_lo = -1.0, x_hi = 1.0, y_lo = -1.0, y_hi = 1.0;
  bool contains(double x, double y) const noexcept {
    return x >= x_lo && x <= x_hi && y >= y_lo && y <= y_hi;
  }
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // |whole-interval rule - bisected rule|, accumulated over both axes
};

/// Gauss-Legendre rule of order 20 on [a, b], compared against the same rule on the two halves.
QuadratureResult integrate_1d(const std::function<double(double)>& f, double a, double b);
/// Nested 1D rules: integral over [x0, x1] x [y0, y1] of f(x, y), oriented (it changes sign
/// when an interval is reversed).
QuadratureResult integrate_rectangle(const std::function<double(double, double)>& f, double x0, double x1,
                                     double y0, double y1);

/// The omega coefficient A(x, y) of a 2D web.
double omega_coefficient(const WebModel& m, double x, double y);

class DoublePotential {
 public:
  using Fn = std::function<double(double, double)>;
  static constexpr double kDefaultTolerance = 1e-9;

  /// From a closed-form double potential, normalized by subtracting its values on the base axes.
  static DoublePotential closed_form(Fn h, const Window& w, double x0, double y0);
  /// By quadrature of the model's omega coefficient over [x0, x] x [y0, y].
  static DoublePotential by_quadrature(std::shared_ptr<const WebModel> m, const Window& w, double x0, double y0,
                                       double tolerance = kDefaultTolerance);

  /// Throws InputError outside the window and NumericalError when quadrature does not
  /// reach the tolerance (relative to max(1, |h|)).
  double operator()(double x, double y) const;

  const Window& window() const noexcept { return w_; }
  double base_x() const noexcept { return x0_; }
  double base_y() const noexcept { return y0_; }
  bool is_closed_form() const noexcept { return !model_; }
  double tolerance() const noexcept { return tol_; }

 private:
  DoublePotential() = default;
  Fn raw_;
  std::shared_ptr<const WebModel> model_;
  Window w_;
  double x0_ = 0.0, y0_ = 0.0, tol_ = kDefaultTolerance;
  double h00_ = 0.0;
  // quadrature values are memoized; copies of a potential share the memo
  struct Memo {
    std::mutex mu;
    std::map<std::pair<double, double>, double> values;
  };
  std::shared_ptr<Memo> memo_;
};

/// build_potential for a 2D web; quadrature-backed.
DoublePotential build_potential(std::shared_ptr<const WebModel> m, const Window& w, double x0, double y0);

/// Closed form |x(s) - y(t)| restricted to the (s_i, t_j) plane through `anchor`
/// (a full ray-space point), as the double potential of the corresponding section web.
DoublePotential ray_distance_potential(std::shared_ptr<const RaySpaceModel> m, std::vector<double> anchor, int i,
                                       int j, const Window& w, double x0, double y0);

/// Symplectic area of [x, x2] x [y, y2]: h(x2, y2) + h(x, y) - h(x2, y) - h(x, y2).
double region_area(const DoublePotential& h, double x, double y, double x2, double y2);

struct QuadProbe {
  std::array<double, 3> p{};  // strictly increasing x-parameters
  std::array<double, 3> q{};  // strictly increasing y-parameters
};

enum class QuadCondition { Product, EqualSplit, Cut };

struct QuadResult {
  QuadCondition which = QuadCondition::Product;
  /// a = [p1,p2]x[q1,q2], b = [p1,p2]x[q2,q3], c = [p2,p3]x[q2,q3], d = [p2,p3]x[q1,q2]
  std::array<double, 4> areas{};
  double p2 = 0.0, q2 = 0.0;        // the split actually used (solved for equal_split and cut)
  double residual = 0.0;            // product: ac - bd; otherwise max |area - total/4|
  double premise_residual = 0.0;    // cut only: |(a+d) - (b+c)| + |a - d| after solving
};

/// product uses the probe as given; equal_split solves p2 (columns halve the total) and
/// q2 (rows halve the total); cut solves q2 (rows halve the total), then p2 with a = d,
/// and reports how far the four areas are from equal. Throws NumericalError when a
/// bisection is not bracketed.
QuadResult quad_condition(const DoublePotential& h, const QuadProbe& probe, QuadCondition which);

std::string to_string(QuadCondition c);
QuadCondition quad_condition_from_string(const std::string& name);

/// Root of f on [a, b] by bisection down to ~1 ulp of the bracket; f(a), f(b) must differ in sign.
double bisect(const std::function<double(double)>& f, double a, double b);

}  // namespace biweb
