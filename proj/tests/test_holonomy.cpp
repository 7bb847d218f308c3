#include <doctest.h>

#include <cmath>
#include <random>

#include "biweb/errors.hpp"
#include "biweb/holonomy.hpp"
#include "biweb/models.hpp"
#include "support.hpp"

using namespace biweb;
using namespace biweb::testing;

namespace {

std::shared_ptr<const WebModel> explicit_web(const std::string& a) {
  return std::make_shared<ExplicitModel>(ExplicitModel::from_exprs(1, {a}));
}

double exy_series(double x, double y) {
  double term = x * y, sum = 0.0;
  for (int k = 0; k < 60; ++k) {
    sum += term / ((k + 1.0) * (k + 1.0));
    term *= x * y / (k + 1.0);
  }
  return sum;
}

const LoopFit& exy_fit() {
  static const LoopFit fit = fit_loop_coefficient(explicit_web("exp(x*y)"), {0.0, 0.0});
  return fit;
}

}  // namespace

TEST_CASE("reflections of the flat area form") {
  Holonomy hol(explicit_web("1"), {0.0, 0.0});
  const Point2 f = hol.reflect({0.2, -0.3}, Axis::F);
  CHECK(f[0] == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(f[1] == -0.3);
  const Point2 g = hol.reflect({0.2, -0.3}, Axis::G);
  CHECK(g[0] == 0.2);
  CHECK(g[1] == doctest::Approx(0.3).epsilon(1e-12));
  // points on a mirror leaf stay put
  CHECK(hol.reflect({0.0, 0.4}, Axis::F) == Point2{0.0, 0.4});
  CHECK(hol.reflect({0.1, 0.0}, Axis::G) == Point2{0.1, 0.0});
}

TEST_CASE("e^{xy} reflection against a series and bisection oracle") {
  Holonomy hol(explicit_web("exp(x*y)"), {0.0, 0.0});
  const Point2 o = hol.reflect({0.1, 0.2}, Axis::F);
  const double target = -exy_series(0.1, 0.2);
  double lo = -0.5, hi = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (exy_series(mid, 0.2) > target ? hi : lo) = mid;
  }
  CHECK(o[1] == 0.2);
  CHECK(std::abs(o[0] - 0.5 * (lo + hi)) < 1e-12);
}

TEST_CASE("reflections are involutions and keep their leaf") {
  std::mt19937_64 rng(41);
  for (const char* a : {"exp(x*y)", "2 + sin(x + 2*y)"}) {
    const Point2 p{uniform(rng, -0.2, 0.2), uniform(rng, -0.2, 0.2)};
    Holonomy hol(explicit_web(a), p);
    for (int trial = 0; trial < 2; ++trial) {
      const Point2 q{p[0] + uniform(rng, -0.15, 0.15), p[1] + uniform(rng, -0.15, 0.15)};
      for (Axis ax : {Axis::F, Axis::G}) {
        const Point2 r = hol.reflect(q, ax);
        CHECK(r[ax == Axis::F ? 1 : 0] == q[ax == Axis::F ? 1 : 0]);
        const Point2 back = hol.reflect(r, ax);
        CHECK(std::abs(back[0] - q[0]) < 1e-10);
        CHECK(std::abs(back[1] - q[1]) < 1e-10);
      }
    }
  }
}

TEST_CASE("loops: flat webs, mirror leaves and cubic shrinkage") {
  Holonomy flat(explicit_web("(1 + x^2) * exp(0.5*y)"), {0.1, 0.2});
  for (Point2 q : {Point2{0.25, 0.1}, Point2{-0.05, 0.32}}) {
    const Point2 img = flat.loop(q);
    CHECK(std::abs(img[0] - q[0]) < 1e-10);
    CHECK(std::abs(img[1] - q[1]) < 1e-10);
  }

  Holonomy curved(explicit_web("exp(x*y)"), {0.0, 0.0});
  for (Point2 q : {Point2{0.0, 0.15}, Point2{-0.12, 0.0}}) {
    const Point2 img = curved.loop(q);
    CHECK(std::abs(img[0] - q[0]) < 1e-12);
    CHECK(std::abs(img[1] - q[1]) < 1e-12);
  }

  auto disp = [&](double h) {
    const Point2 img = curved.loop({h, 0.5 * h});
    return std::hypot(img[0] - h, img[1] - 0.5 * h);
  };
  const double ratio = disp(0.06) / disp(0.03);
  CHECK(ratio > 8.0 / 1.5);
  CHECK(ratio < 8.0 * 1.5);
}

TEST_CASE("loop coefficient equals the ricci coefficient with opposite signs") {
  const LoopFit& f = exy_fit();
  CHECK(f.kappa == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(f.c_u - 1.0) < 1e-5);
  CHECK(std::abs(f.c_v + 1.0) < 1e-5);
  CHECK(f.kappa_deviation < 1e-5);
  // the 2 kappa reference overshoots by a factor of two
  CHECK(f.reference == doctest::Approx(2.0));
  CHECK(f.deviation == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(f.converged);
  CHECK(f.noise_floor < 1e-6);
  for (std::size_t k = 0; k + 1 < f.displacement.size(); ++k) {
    const double r = f.displacement[k] / f.displacement[k + 1];
    CHECK(r > 8.0 / 1.5);
    CHECK(r < 8.0 * 1.5);
  }

  const LoopFit g = fit_loop_coefficient(explicit_web("exp(x*y + 0.3*x^2*y)"), {0.2, 0.1});
  CHECK(g.kappa == doctest::Approx(1.12).epsilon(1e-10));
  CHECK(g.kappa_deviation < 1e-5);
  CHECK(std::signbit(g.c_u) == std::signbit(g.kappa));
  CHECK(std::signbit(g.c_v) != std::signbit(g.kappa));
}

TEST_CASE("flat web fit sits below the noise floor") {
  const LoopFit f = fit_loop_coefficient(explicit_web("(2 + sin(x)) * (1 + y^2)"), {0.1, -0.1});
  CHECK(std::abs(f.c_u) < 1e-6);
  CHECK(std::abs(f.c_v) < 1e-6);
  CHECK(std::abs(f.kappa) < 1e-12);
}

TEST_CASE("sphere section: loop coefficient against the section's ricci coefficient") {
  auto sphere = std::make_shared<const RaySpaceModel>(sphere_model({0.1, 0.2, 0.3}, 1.0));
  const std::vector<double> anchor = {0.0, 0.0, 0.0, 0.0};
  auto section = std::make_shared<SectionModel>(sphere, anchor, 0, 0);
  const Window w{-0.5, 0.5, -0.5, 0.5};
  const LoopFit f =
      fit_loop_coefficient(section, {0.0, 0.0}, {}, ray_distance_potential(sphere, anchor, 0, 0, w, 0.0, 0.0));
  const std::array<double, 2> p{0.0, 0.0};
  const double kappa = ricci(*section, p)(0, 0);
  CHECK(std::abs(kappa) > 1e-3);
  CHECK(rel_err(f.c_u, kappa) < 0.05);
  CHECK(rel_err(f.c_v, -kappa) < 0.05);
}

TEST_CASE("holonomy errors and extrapolation") {
  // the coefficient changes sign at x = 0, so the region cannot be matched
  Holonomy hol(explicit_web("x"), {0.05, 0.0});
  try {
    (void)hol.reflect({0.3, 0.1}, Axis::F);
    FAIL("expected a bracket failure");
  } catch (const DomainError& e) {
    CHECK(e.condition() == "bracket failure");
  }
  auto ray = std::make_shared<RaySpaceModel>(RaySpaceModel::from_graphs(3, "1", "0"));
  CHECK_THROWS_AS(Holonomy(ray, {0.0, 0.0}), InputError);
  ReflectionConfig bad;
  bad.volume_tol = 0.0;
  CHECK_THROWS_AS(Holonomy(explicit_web("1"), {0.0, 0.0}, bad), InputError);

  const std::vector<double> h{0.08, 0.04, 0.02, 0.01};
  std::vector<double> f;
  for (double v : h) f.push_back(3.0 + 2.0 * v - v * v + 0.5 * v * v * v);
  CHECK(extrapolate_to_zero(h, f) == doctest::Approx(3.0).epsilon(1e-12));
}
