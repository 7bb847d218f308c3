#pragma once

// Volume-preserving reflections and the four-fold holonomy loop of a 2D web
// at a base point p, with a ladder fit of the cubic Taylor coefficients of
// the loop. Coordinates are the model's adapted (x, y); the mirror leaves
// through p are x = p_x (for F) and y = p_y (for G).

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "biweb/potential.hpp"
#include "biweb/web.hpp"

namespace biweb {

using Point2 = std::array<double, 2>;

enum class Axis {
  F,  // mirror leaf x = p_x; the reflection moves x and keeps y
  G,  // mirror leaf y = p_y; the reflection moves y and keeps x
};

struct ReflectionConfig {
  double expansion = 1.6;       // bracket growth factor while searching for a sign change
  double volume_tol = 1e-18;    // stop once |signed volume mismatch| falls below this
  int max_iterations = 200;     // bracket expansions and bisection steps, each
  double radius = 0.5;          // half-width of the working square around p
  std::vector<double> ladder{0.08, 0.04, 0.02, 0.01};
};

struct LoopFit {
  Point2 p{};
  std::vector<double> steps;
  std::vector<double> c_u_steps, c_v_steps;  // (u - h) / h^3 and (v - h) / h^3 at q = p + (h, h)
  std::vector<double> displacement;          // |loop(q_h) - q_h|
  double c_u = 0.0, c_v = 0.0;               // extrapolated to h = 0
  double kappa = 0.0;                        // ricci coefficient of the web at p
  double reference = 0.0;                    // 2 kappa
  double deviation = 0.0;                    // |c_u - 2 kappa| / |2 kappa|
  double kappa_deviation = 0.0;              // |c_u - kappa| / |kappa|
  double noise_floor = 0.0;
  bool converged = true;  // last two extrapolation levels agree to 1% (or within the noise floor)
};

class Holonomy {
 public:
  /// Volumes come from `h` when given (any base point), else from a quadrature
  /// potential of `m` based at p over the working square.
  Holonomy(std::shared_ptr<const WebModel> m, Point2 p, ReflectionConfig cfg = {},
           std::optional<DoublePotential> h = std::nullopt);

  /// r_{p;F} or r_{p;G}. Throws DomainError("bracket failure") when no equal-volume
  /// point exists inside the working square (typically a sign change of the coefficient).
  Point2 reflect(Point2 q, Axis axis) const;
  /// r_G o r_F o r_G o r_F
  Point2 loop(Point2 q) const;
  LoopFit fit() const;

  const Point2& base() const noexcept { return p_; }
  const ReflectionConfig& config() const noexcept { return cfg_; }

 private:
  double area(double x, double y) const;  // signed volume of [p, (x, y)]
  double edge(double t, Axis along) const;  // signed length of [p, t] along a mirror-free axis line
  std::shared_ptr<const WebModel> m_;
  Point2 p_;
  ReflectionConfig cfg_;
  DoublePotential h_;
};

Point2 reflect(std::shared_ptr<const WebModel> m, Point2 p, Point2 q, Axis axis, const ReflectionConfig& cfg = {});
Point2 loop(std::shared_ptr<const WebModel> m, Point2 p, Point2 q, const ReflectionConfig& cfg = {});
LoopFit fit_loop_coefficient(std::shared_ptr<const WebModel> m, Point2 p, const ReflectionConfig& cfg = {},
                             std::optional<DoublePotential> h = std::nullopt);

/// Neville extrapolation of samples f(h_k) to h = 0.
double extrapolate_to_zero(const std::vector<double>& h, const std::vector<double>& f);

}  // namespace biweb
