#include <doctest.h>

#include <cmath>
#include <random>

#include "biweb/errors.hpp"
#include "biweb/models.hpp"
#include "biweb/potential.hpp"
#include "support.hpp"

using namespace biweb;
using namespace biweb::testing;

namespace {

const Window kUnit{-1.0, 1.0, -1.0, 1.0};

std::shared_ptr<const WebModel> exy() {
  return std::make_shared<ExplicitModel>(ExplicitModel::from_exprs(1, {"exp(x*y)"}));
}

// int_0^x int_0^y exp(uv) = sum_k (xy)^{k+1} / ((k+1)^2 k!)
double exy_series(double x, double y) {
  double term = x * y, sum = 0.0;
  for (int k = 0; k < 60; ++k) {
    sum += term / ((k + 1.0) * (k + 1.0));
    term *= x * y / (k + 1.0);
  }
  return sum;
}

// Composite Simpson on a fine tensor grid; an independent oracle for rectangle areas.
double simpson_area(const WebModel& m, double x0, double x1, double y0, double y1, int panels = 100) {
  auto w = [panels](int i) { return (i == 0 || i == 2 * panels) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
  const double hx = (x1 - x0) / (2 * panels), hy = (y1 - y0) / (2 * panels);
  double s = 0.0;
  for (int i = 0; i <= 2 * panels; ++i)
    for (int j = 0; j <= 2 * panels; ++j) s += w(i) * w(j) * omega_coefficient(m, x0 + i * hx, y0 + j * hy);
  return s * hx * hy / 9.0;
}

}  // namespace

TEST_CASE("gauss-legendre rules") {
  const auto poly = integrate_1d([](double x) { return std::pow(x, 38) + 3 * std::pow(x, 7); }, -1.0, 1.0);
  CHECK(poly.value == doctest::Approx(2.0 / 39.0).epsilon(1e-14));
  const auto e = integrate_1d([](double x) { return std::exp(x); }, 0.0, 1.0);
  CHECK(e.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-15));
  CHECK(e.error < 1e-14);
  const auto rect = integrate_rectangle([](double x, double y) { return x * y * y; }, 0.0, 2.0, 1.0, 0.0);
  CHECK(rect.value == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("constant coefficient gives h = xy") {
  auto one = std::make_shared<ExplicitModel>(ExplicitModel::from_exprs(1, {"1"}));
  const auto h = build_potential(one, kUnit, 0.0, 0.0);
  CHECK(!h.is_closed_form());
  CHECK(h(0.3, -0.7) == doctest::Approx(-0.21).epsilon(1e-14));
  CHECK(region_area(h, 0.0, 0.0, 0.5, 0.25) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(region_area(h, 0.4, -0.2, 0.4, 0.9) == 0.0);
}

TEST_CASE("e^{xy}: potential values, normalization and mixed partial") {
  const auto h = build_potential(exy(), kUnit, 0.0, 0.0);
  for (double x : {-0.9, -0.3, 0.2, 0.8})
    for (double y : {-0.7, 0.1, 0.6}) CHECK(rel_err(h(x, y), exy_series(x, y)) < 1e-12);

  auto hb = build_potential(exy(), kUnit, 0.2, -0.3);
  for (double v : {-0.8, 0.0, 0.5, 0.95}) {
    CHECK(hb(0.2, v) == 0.0);
    CHECK(hb(v, -0.3) == 0.0);
  }

  // Richardson-extrapolated centered mixed difference
  int checked = 0;
  for (double x : {-0.5, 0.0, 0.5})
    for (double y : {-0.5, 0.0, 0.5}) {
      auto mixed = [&](double d) { return region_area(hb, x - d, y - d, x + d, y + d) / (4 * d * d); };
      const double est = (4.0 * mixed(0.01) - mixed(0.02)) / 3.0;
      CHECK(rel_err(est, std::exp(x * y)) < 1e-6);
      ++checked;
    }
  CHECK(checked == 9);
}

TEST_CASE("potential errors") {
  CHECK_THROWS_AS(build_potential(exy(), kUnit, 2.0, 0.0), InputError);
  const auto h = build_potential(exy(), kUnit, 0.0, 0.0);
  CHECK_THROWS_AS(h(1.5, 0.0), InputError);
  auto ray = std::make_shared<RaySpaceModel>(RaySpaceModel::from_graphs(3, "1", "0"));
  CHECK_THROWS_AS(build_potential(ray, kUnit, 0.0, 0.0), InputError);

  // a near-pole coefficient that twenty nodes cannot resolve
  auto spike = std::make_shared<ExplicitModel>(ExplicitModel::from_exprs(1, {"1/((x-0.3)^2 + 1e-8)"}));
  const auto hs = DoublePotential::by_quadrature(spike, kUnit, -1.0, 0.0);
  try {
    (void)hs(1.0, 0.5);
    FAIL("expected a quadrature failure");
  } catch (const NumericalError& e) {
    CHECK(e.achieved() > 1e-9);
  }
}

TEST_CASE("region_area matches direct quadrature on random closed webs") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 4; ++trial) {
    std::shared_ptr<const WebModel> m = random_explicit(1, rng);
    const auto h = build_potential(m, kUnit, uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5));
    double x0 = uniform(rng, -0.9, 0.9), x1 = uniform(rng, -0.9, 0.9);
    double y0 = uniform(rng, -0.9, 0.9), y1 = uniform(rng, -0.9, 0.9);
    CHECK(std::abs(region_area(h, x0, y0, x1, y1) - simpson_area(*m, x0, x1, y0, y1)) < 1e-6);
  }
}

TEST_CASE("region_area additivity and anti-symmetry") {
  std::mt19937_64 rng(32);
  const auto h = build_potential(random_explicit(1, rng), kUnit, 0.0, 0.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double x0 = uniform(rng, -0.9, -0.1), x1 = uniform(rng, x0, 0.9), xm = uniform(rng, x0, x1);
    const double y0 = uniform(rng, -0.9, -0.1), y1 = uniform(rng, y0, 0.9), ym = uniform(rng, y0, y1);
    const double whole = region_area(h, x0, y0, x1, y1);
    const double parts = region_area(h, x0, y0, xm, ym) + region_area(h, xm, y0, x1, ym) +
                         region_area(h, x0, ym, xm, y1) + region_area(h, xm, ym, x1, y1);
    CHECK(std::abs(whole - parts) < 1e-13 * std::max(1.0, std::abs(whole)));
    CHECK(region_area(h, x1, y0, x0, y1) == doctest::Approx(-whole).epsilon(1e-15));
  }
}

TEST_CASE("flat product web satisfies all three quadrilateral conditions") {
  auto flat = std::make_shared<ExplicitModel>(ExplicitModel::from_exprs(1, {"(1 + x^2) * exp(0.5*y)"}));
  const auto h = build_potential(flat, kUnit, 0.0, 0.0);
  std::mt19937_64 rng(33);
  double worst = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    QuadProbe pr;
    pr.p = {uniform(rng, -0.9, -0.4), uniform(rng, -0.3, 0.3), uniform(rng, 0.4, 0.9)};
    pr.q = {uniform(rng, -0.9, -0.4), uniform(rng, -0.3, 0.3), uniform(rng, 0.4, 0.9)};
    worst = std::max(worst, std::abs(quad_condition(h, pr, QuadCondition::Product).residual));
  }
  CHECK(worst < 1e-10);

  QuadProbe outer{{-0.8, 0.0, 0.7}, {-0.6, 0.0, 0.9}};
  const auto split = quad_condition(h, outer, QuadCondition::EqualSplit);
  CHECK(split.residual < 1e-12);
  CHECK(split.p2 > -0.8);
  CHECK(split.p2 < 0.7);
  const auto cut = quad_condition(h, outer, QuadCondition::Cut);
  CHECK(cut.premise_residual < 1e-12);
  CHECK(cut.residual < 1e-12);
}

TEST_CASE("e^{xy} violates the product condition") {
  const auto h = build_potential(exy(), kUnit, 0.0, 0.0);
  const QuadProbe pr{{-0.5, 0.0, 0.5}, {-0.5, 0.0, 0.5}};
  const auto r = quad_condition(h, pr, QuadCondition::Product);
  // independent corner values from the series
  auto area = [](double x, double y, double x2, double y2) {
    return exy_series(x2, y2) + exy_series(x, y) - exy_series(x2, y) - exy_series(x, y2);
  };
  const double want = area(-0.5, -0.5, 0, 0) * area(0, 0, 0.5, 0.5) - area(-0.5, 0, 0, 0.5) * area(0, -0.5, 0.5, 0);
  CHECK(std::abs(r.residual - want) < 1e-12);
  CHECK(std::abs(r.residual) > 1e-4);

  const auto split = quad_condition(h, pr, QuadCondition::EqualSplit);
  CHECK(split.residual > 1e-5);
  const auto cut = quad_condition(h, pr, QuadCondition::Cut);
  CHECK(cut.premise_residual < 1e-12);
  CHECK(cut.residual > 1e-5);
}

TEST_CASE("pitch-0.1 probe grids separate flat from curved webs") {
  // kappa = d_x d_y log A: 0 for the product web, 1 for e^{xy}
  auto flat = std::make_shared<ExplicitModel>(ExplicitModel::from_exprs(1, {"(2 + sin(x)) * (1 + y^2)"}));
  const double pitch = 0.1;
  auto scan = [&](std::shared_ptr<const WebModel> m) {
    const auto h = build_potential(m, kUnit, 0.0, 0.0);
    std::vector<double> g;
    for (int k = -5; k <= 5; ++k) g.push_back(k * pitch);
    std::vector<std::vector<double>> hv(g.size(), std::vector<double>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j < g.size(); ++j) hv[i][j] = h(g[i], g[j]);
    auto area = [&](std::size_t i, std::size_t j, std::size_t i2, std::size_t j2) {
      return hv[i2][j2] + hv[i][j] - hv[i2][j] - hv[i][j2];
    };
    double worst = 0.0;
    const std::size_t N = g.size();
    for (std::size_t i1 = 0; i1 < N; ++i1)
      for (std::size_t i2 = i1 + 1; i2 < N; ++i2)
        for (std::size_t i3 = i2 + 1; i3 < N; ++i3)
          for (std::size_t j1 = 0; j1 < N; ++j1)
            for (std::size_t j2 = j1 + 1; j2 < N; ++j2)
              for (std::size_t j3 = j2 + 1; j3 < N; ++j3) {
                const double a = area(i1, j1, i2, j2), b = area(i1, j2, i2, j3);
                const double c = area(i2, j2, i3, j3), d = area(i2, j1, i3, j2);
                worst = std::max(worst, std::abs(a * c - b * d));
              }
    return worst;
  };
  CHECK(scan(flat) < 1e-8);
  CHECK(scan(exy()) > 1e-5);
}

TEST_CASE("sphere section web fails the product condition somewhere") {
  auto sphere = std::make_shared<const RaySpaceModel>(sphere_model({0.1, 0.2, 0.3}, 1.0));
  const std::vector<double> anchor = {0.0, 0.0, 0.0, 0.0};
  auto section = std::make_shared<SectionModel>(sphere, anchor, 0, 0);
  const Window w{-0.6, 0.6, -0.6, 0.6};
  const auto h = build_potential(section, w, 0.0, 0.0);
  const QuadProbe pr{{-0.5, 0.0, 0.5}, {-0.5, 0.1, 0.5}};
  CHECK(std::abs(quad_condition(h, pr, QuadCondition::Product).residual) > 1e-4);
}

TEST_CASE("ray distance potential: closed form against quadrature on coordinate planes") {
  SUBCASE("planar curves") {
    auto m = std::make_shared<const RaySpaceModel>(
        RaySpaceModel::from_curves({"cos(s)", "sin(s)"}, {"2.5*cos(t)", "2*sin(t) + 0.2"}));
    const Window w{-1.0, 1.0, 2.0, 4.0};
    const auto closed = ray_distance_potential(m, {0.0, 3.0}, 0, 0, w, 0.0, 3.0);
    const auto quad = build_potential(std::make_shared<SectionModel>(m, std::vector<double>{0.0, 3.0}, 0, 0), w,
                                      0.0, 3.0);
    CHECK(closed.is_closed_form());
    for (auto [x, y, x2, y2] : std::vector<std::array<double, 4>>{
             {-0.8, 2.2, 0.5, 3.1}, {0.7, 2.9, -0.6, 2.4}}) {
      CHECK(std::abs(region_area(closed, x, y, x2, y2) - region_area(quad, x, y, x2, y2)) < 1e-6);
    }
  }
  SUBCASE("n = 4 graphs, diagonal and off-diagonal planes") {
    std::mt19937_64 rng(35);
    auto m = std::make_shared<const RaySpaceModel>(samplers::random_ray_graphs(4, rng));
    const std::vector<double> anchor = {0.1, -0.2, 0.05, 0.2, 0.1, -0.1};
    const Window w{-0.4, 0.4, -0.4, 0.4};
    for (auto [i, j] : std::vector<std::pair<int, int>>{{0, 0}, {1, 2}}) {
      const auto closed = ray_distance_potential(m, anchor, i, j, w, 0.0, 0.0);
      const auto quad = build_potential(std::make_shared<SectionModel>(m, anchor, i, j), w, 0.0, 0.0);
      CHECK(std::abs(region_area(closed, -0.3, -0.2, 0.35, 0.3) - region_area(quad, -0.3, -0.2, 0.35, 0.3)) < 1e-6);
    }
  }
}

TEST_CASE("quadrilateral probe validation and names") {
  const auto h = build_potential(exy(), kUnit, 0.0, 0.0);
  CHECK_THROWS_AS(quad_condition(h, QuadProbe{{0.0, -0.1, 0.5}, {-0.5, 0.0, 0.5}}, QuadCondition::Product),
                  InputError);
  for (auto c : {QuadCondition::Product, QuadCondition::EqualSplit, QuadCondition::Cut})
    CHECK(quad_condition_from_string(to_string(c)) == c);
  CHECK_THROWS_AS(quad_condition_from_string("diagonal"), InputError);
  // the total area vanishes, so neither split can be bracketed
  auto zero = std::make_shared<ExplicitModel>(ExplicitModel::from_exprs(1, {"y"}));
  const auto hz = build_potential(zero, kUnit, 0.0, 0.0);
  CHECK_THROWS_AS(quad_condition(hz, QuadProbe{{-0.5, 0.0, 0.5}, {-0.5, 0.0, 0.5}}, QuadCondition::EqualSplit),
                  NumericalError);
}
