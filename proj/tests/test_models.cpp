#include <doctest.h>

#include <cmath>
#include <random>

#include "biweb/errors.hpp"
#include "biweb/models.hpp"
#include "support.hpp"

using namespace biweb;
using namespace biweb::testing;

namespace {

double diag_sign(int m) { return (m * (m - 1) / 2) % 2 == 0 ? 1.0 : -1.0; }

double fact(int m) { return m <= 1 ? 1.0 : m * fact(m - 1); }

// Ray (direction p, foot point q) through x(s) and y(t), from plain evaluation of the model frame.
std::pair<Eigen::VectorXd, Eigen::VectorXd> ray_of(const RaySpaceModel& m, std::span<const double> pt) {
  JetContext ctx(static_cast<int>(pt.size()), 0);
  std::vector<Jet> c;
  for (double v : pt) c.emplace_back(ctx, v);
  const auto fr = m.frame(c);
  const int n = m.ambient_dim();
  Eigen::VectorXd x(n), y(n);
  for (int k = 0; k < n; ++k) {
    x(k) = fr.x[static_cast<std::size_t>(k)].value();
    y(k) = fr.y[static_cast<std::size_t>(k)].value();
  }
  const Eigen::VectorXd p = (x - y).normalized();
  const Eigen::VectorXd q = x - x.dot(p) * p;
  return {p, q};
}

// omega(d/ds_a, d/dt_b) for sum_i dq_i ^ dp_i on the ray space, by central differences.
Eigen::MatrixXd canonical_form_fd(const RaySpaceModel& m, std::vector<double> pt, double h = 1e-5) {
  const int dim = m.dim();
  auto diff = [&](int k) {
    auto a = pt, b = pt;
    a[static_cast<std::size_t>(k)] += h;
    b[static_cast<std::size_t>(k)] -= h;
    auto [pa, qa] = ray_of(m, a);
    auto [pb, qb] = ray_of(m, b);
    return std::pair<Eigen::VectorXd, Eigen::VectorXd>((pa - pb) / (2 * h), (qa - qb) / (2 * h));
  };
  Eigen::MatrixXd A(dim, dim);
  for (int a = 0; a < dim; ++a) {
    auto [dps, dqs] = diff(a);
    for (int b = 0; b < dim; ++b) {
      auto [dpt, dqt] = diff(dim + b);
      A(a, b) = dqs.dot(dpt) - dqt.dot(dps);
    }
  }
  return A;
}

}  // namespace

TEST_CASE("ray volume coefficient: parallel lines hand value") {
  auto m = RaySpaceModel::from_graphs(2, "1", "0");
  const double z[1] = {0.0};
  CHECK(rayspace_volume_coeff(m, z, z, 0).value() == doctest::Approx(-1.0).epsilon(1e-15));
  const double p[2] = {0.0, 0.0};
  CHECK(omega_matrix(m, p, 0)(0, 0).value() == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("ray volume coefficient is the top power of omega") {
  std::mt19937_64 rng(11);
  for (int n = 2; n <= 5; ++n) {
    const int dim = n - 1;
    for (int trial = 0; trial < 5; ++trial) {
      auto m = samplers::random_ray_graphs(n, rng);
      for (const auto& p : admissible_probes(m, 3, -0.3, 0.3, rng)) {
        std::span<const double> ps(p);
        const double h = rayspace_volume_coeff(m, ps.subspan(0, static_cast<std::size_t>(dim)),
                                               ps.subspan(static_cast<std::size_t>(dim)), 0)
                             .value();
        // omega^m = m! (-1)^{m(m-1)/2} det A ds_1..ds_m dt_1..dt_m
        const double want = Calibration::kRayVolumeSign * fact(dim) * diag_sign(dim) * A_at(m, p).determinant();
        CHECK(rel_err(h, want) < 1e-8);
      }
    }
  }
}

TEST_CASE("ray omega agrees with the canonical form of T*S^{n-1}") {
  std::mt19937_64 rng(12);
  for (int n = 2; n <= 3; ++n) {
    auto m = samplers::random_ray_graphs(n, rng);
    for (const auto& p : admissible_probes(m, 3, -0.3, 0.3, rng)) {
      const Eigen::MatrixXd want = canonical_form_fd(m, p);
      const Eigen::MatrixXd got = A_at(m, p);
      CHECK((got - want).cwiseAbs().maxCoeff() < 1e-7 * (1.0 + want.cwiseAbs().maxCoeff()));
    }
  }
  auto curves = samplers::random_planar_curves(rng);
  const std::vector<double> p = {0.4, 1.3};
  CHECK((A_at(curves, p) - canonical_form_fd(curves, p)).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("ray model domain errors") {
  auto close = RaySpaceModel::from_curves({"s", "0"}, {"t", "0.0001"});
  const double p[2] = {0.2, 0.2};
  try {
    close.check_point(p);
    FAIL("expected a separation error");
  } catch (const DomainError& e) {
    CHECK(e.condition() == "separation violated");
  }
  // the ray from (1, 0) on the unit circle to (1, 2) on the line x = 1 is tangent to the circle
  auto tangent = RaySpaceModel::from_curves({"cos(s)", "sin(s)"}, {"1", "t"});
  const double q[2] = {0.0, 2.0};
  try {
    (void)rayspace_xi(tangent, q[0], q[1]);
    FAIL("expected a transversality error");
  } catch (const DomainError& e) {
    CHECK(e.condition() == "transversality");
  }
  CHECK_THROWS_AS(sphere_model({0, 0, 0}, -1.0), InputError);
}

TEST_CASE("xi: concentric circles and parallel lines against the log-volume oracle") {
  auto circles = RaySpaceModel::from_curves({"cos(s)", "sin(s)"}, {"2*cos(t)", "2*sin(t)"});
  const std::vector<std::pair<double, double>> probes = {{0.3, 1.2}, {0.1, -0.7}, {2.0, 2.5}, {-1.0, 0.4}};
  for (auto [s, t] : probes) {
    const double sv[1] = {s}, tv[1] = {t};
    const double oracle = abs_log(rayspace_volume_coeff(circles, sv, tv, 2)).derivative(0).derivative(1).value();
    CHECK(rel_err(rayspace_xi(circles, s, t), Calibration::kXiSign * oracle) < 1e-6);
  }
  auto lines = RaySpaceModel::from_curves({"s", "1"}, {"t", "0"});
  for (auto [s, t] : probes) {
    const double sv[1] = {s}, tv[1] = {t};
    const double oracle = abs_log(rayspace_volume_coeff(lines, sv, tv, 2)).derivative(0).derivative(1).value();
    CHECK(rel_err(rayspace_xi(lines, s, t), Calibration::kXiSign * oracle) < 1e-6);
    // A = -1 / D^3 with D = sqrt((s - t)^2 + 1)
    const double pt[2] = {s, t};
    CHECK(rel_err(A_at(lines, pt)(0, 0), -std::pow((s - t) * (s - t) + 1.0, -1.5)) < 1e-14);
  }
}

TEST_CASE("xi matches the generic curvature pipeline on random planar curves") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    auto m = samplers::random_planar_curves(rng);
    for (const auto& p : admissible_probes(m, 5, -3.0, 3.0, rng)) {
      CHECK(rel_err(rayspace_xi(m, p[0], p[1]), Calibration::kXiSign * ricci(m, p)(0, 0), 1e-9) < 1e-6);
    }
  }
}

TEST_CASE("sphere model: graphs, volume, Ricci flatness, curvature matrix") {
  auto unit = sphere_model({0, 0, 0}, 1.0);
  const double s[2] = {0.3, -0.2}, t[2] = {-0.1, 0.4};
  // f = sqrt(1 - s1^2 - s2^2), g = -f
  JetContext c0(2, 0);
  const Jet fs = (*unit.graph_f())(std::vector<Jet>{Jet(c0, s[0]), Jet(c0, s[1])});
  const Jet gs = (*unit.graph_g())(std::vector<Jet>{Jet(c0, s[0]), Jet(c0, s[1])});
  CHECK(fs.value() == doctest::Approx(std::sqrt(1 - 0.09 - 0.04)).epsilon(1e-15));
  CHECK(gs.value() == doctest::Approx(-fs.value()).epsilon(1e-15));

  // h(s, t) factors as -h1(s) h1(t) up to a constant, h1 = 1 / sqrt(r^2 - |s - c|^2). At the
  // origin x - y = (0, 0, 2) and both transversality determinants are 2, so h = -2! * 4 / 2^4 = -1/2.
  const double z[2] = {0.0, 0.0};
  CHECK(rayspace_volume_coeff(unit, z, z, 0).value() == doctest::Approx(-0.5).epsilon(1e-15));
  const double h = rayspace_volume_coeff(unit, s, t, 0).value();
  const double h1s = 1.0 / std::sqrt(1 - s[0] * s[0] - s[1] * s[1]);
  const double h1t = 1.0 / std::sqrt(1 - t[0] * t[0] - t[1] * t[1]);
  CHECK(rel_err(h, -0.5 * h1s * h1t) < 1e-12);

  auto shifted = sphere_model({0.1, 0.2, 0.3}, 1.0);
  double worst = 0.0;
  const double grid[3] = {-0.2, 0.0, 0.2};
  for (double a : grid)
    for (double b : grid)
      for (double c : grid)
        for (double d : grid) {
          const std::vector<double> q = {a, b, c, d};
          worst = std::max(worst, ricci(shifted, q).cwiseAbs().maxCoeff());
        }
  CHECK(worst < 1e-7);

  const std::vector<double> origin = {0, 0, 0, 0};
  const auto [F, G] = curvature_forms(unit, origin);
  // displayed matrix, entry (i, j) -> components on ds_a ^ dt_b
  const double paper[2][2][2][2] = {{{{-1, 0}, {0, 1}}, {{0, 1}, {-3, 0}}},
                                    {{{0, -3}, {1, 0}}, {{1, 0}, {0, -1}}}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          CHECK(F(i, j)(a, 2 + b) == doctest::Approx(Calibration::kSphereSign * paper[i][j][a][b] / 4.0).epsilon(1e-9));
        }
  CHECK(curvature_report(unit, origin).flat_residual > 1e-3);
  (void)G;
}

TEST_CASE("sphere model: branch error outside the disk") {
  auto unit = sphere_model({0, 0, 0}, 1.0);
  const std::vector<double> outside = {1.2, 0.0, 0.0, 0.0};
  try {
    (void)ricci(unit, outside);
    FAIL("expected a branch error");
  } catch (const DomainError& e) {
    CHECK(e.condition() == "branch error");
  }
}

TEST_CASE("perturbed sphere is not Ricci flat") {
  const Params params = {{"e", 0.1}};
  auto m = RaySpaceModel::from_graphs(3, "sqrt(1 - s1^2 - s2^2) + e*s1^3", "-sqrt(1 - s1^2 - s2^2)", params);
  double worst = 0.0;
  for (double a : {-0.2, 0.0, 0.2})
    for (double b : {-0.2, 0.2}) {
      const std::vector<double> q = {a, b, -a, 0.1};
      worst = std::max(worst, ricci(m, q).cwiseAbs().maxCoeff());
    }
  CHECK(worst > 1e-4);
}

TEST_CASE("ray Ricci is a tensor under reparametrization of the hypersurfaces") {
  // x(u) = (psi(u), f(psi(u))) with psi(u) = (u1 + 0.2 u2^2, u2 + 0.1 u1 u2), same for y.
  const std::string psi1 = "(u1 + 0.2*u2^2)", psi2 = "(u2 + 0.1*u1*u2)";
  const std::string f = "sqrt(1 - S1^2 - S2^2) + 0.1*S1^3", g = "-sqrt(1 - S1^2 - S2^2)";
  auto subst = [&](std::string e, const std::string& a, const std::string& b) {
    std::string out;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e.compare(i, 2, "S1") == 0) {
        out += a;
        ++i;
      } else if (e.compare(i, 2, "S2") == 0) {
        out += b;
        ++i;
      } else {
        out += e[i];
      }
    }
    return out;
  };
  std::vector<JetFn> x, y;
  const std::vector<std::string> uv = {"u1", "u2"};
  for (const auto& src : {psi1, psi2, subst(f, psi1, psi2)}) x.push_back(bind_expr(parse(src, uv), {0, 1}, {}));
  for (const auto& src : {psi1, psi2, subst(g, psi1, psi2)}) y.push_back(bind_expr(parse(src, uv), {2, 3}, {}));
  RaySpaceModel reparam(3, x, y);
  auto plain = RaySpaceModel::from_graphs(3, subst(f, "s1", "s2"), subst(g, "s1", "s2"));

  const std::vector<double> u = {0.1, -0.2, 0.15, 0.05};
  auto psi = [](double a, double b) { return std::array<double, 2>{a + 0.2 * b * b, b + 0.1 * a * b}; };
  auto jac = [](double a, double b) {
    Eigen::Matrix2d J;
    J << 1.0, 0.4 * b, 0.1 * b, 1.0 + 0.1 * a;
    return J;
  };
  const auto sx = psi(u[0], u[1]), ty = psi(u[2], u[3]);
  const std::vector<double> st = {sx[0], sx[1], ty[0], ty[1]};
  const Eigen::MatrixXd want = jac(u[0], u[1]).transpose() * ricci(plain, st) * jac(u[2], u[3]);
  CHECK((ricci(reparam, u) - want).cwiseAbs().maxCoeff() < 1e-9 * (1.0 + want.cwiseAbs().maxCoeff()));

  // and the sphere stays Ricci flat in the new chart
  std::vector<JetFn> xs, ys;
  for (const auto& src : {psi1, psi2, subst("sqrt(1 - S1^2 - S2^2)", psi1, psi2)}) {
    xs.push_back(bind_expr(parse(src, uv), {0, 1}, {}));
  }
  for (const auto& src : {psi1, psi2, subst("-sqrt(1 - S1^2 - S2^2)", psi1, psi2)}) {
    ys.push_back(bind_expr(parse(src, uv), {2, 3}, {}));
  }
  RaySpaceModel sphere_chart(3, xs, ys);
  CHECK(ricci(sphere_chart, u).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("c_jk: hand example and sphere") {
  auto m = RaySpaceModel::from_graphs(2, "s^2", "-1");
  const double z[1] = {0.0};
  const auto c = ray_cjk_check(m, 0, CjkIdentity::C00, z);
  CHECK(c.rhs == doctest::Approx(20.0).epsilon(1e-14));
  CHECK(c.lhs == doctest::Approx(20.0).epsilon(1e-10));

  auto sphere = sphere_model({0.1, 0.2, 0.3}, 1.0);
  const double s[2] = {0.05, -0.1};
  for (int i = 0; i < 2; ++i) {
    for (auto id : kAllCjk) {
      const auto r = ray_cjk_check(sphere, i, id, s);
      CHECK(std::abs(r.lhs) < 1e-8);
      CHECK(std::abs(r.rhs) < 1e-8);
    }
  }
}

TEST_CASE("c_jk identities on random polynomial graphs, n = 2..5") {
  std::mt19937_64 rng(14);
  for (int n = 2; n <= 5; ++n) {
    for (int trial = 0; trial < 50; ++trial) {
      auto m = samplers::random_ray_graphs(n, rng);
      const auto s = random_point(n - 1, rng, 0.2);
      const int i = static_cast<int>(rng() % static_cast<unsigned>(n - 1));
      const auto c = ray_cjk_check(m, i, CjkIdentity::C00, s);
      CHECK(rel_err(c.lhs, c.rhs) < 1e-8);
    }
    for (auto id : {CjkIdentity::C10PlusC01, CjkIdentity::C10MinusC01, CjkIdentity::C20PlusC02, CjkIdentity::C11}) {
      for (int trial = 0; trial < 50; ++trial) {
        const auto s = random_point(n - 1, rng, 0.2);
        const int i = static_cast<int>(rng() % static_cast<unsigned>(n - 1));
        auto m = samplers::variety_ray_graphs(n, id, i, s, rng);
        const auto c = ray_cjk_check(m, i, id, s);
        CHECK(rel_err(c.lhs, c.rhs) < 1e-8);
      }
    }
  }
}

TEST_CASE("c_jk higher identities are reduced forms, not identities off the variety") {
  std::mt19937_64 rng(15);
  int mismatched = 0;
  for (int trial = 0; trial < 10; ++trial) {
    auto m = samplers::random_ray_graphs(3, rng);
    const auto s = random_point(2, rng, 0.2);
    const auto c = ray_cjk_check(m, 0, CjkIdentity::C10PlusC01, s);
    if (rel_err(c.lhs, c.rhs) > 1e-3) ++mismatched;
  }
  CHECK(mismatched >= 9);
}

TEST_CASE("tangent intersection") {
  auto m = TangentLineModel::from_exprs({"s", "s^2"}, {"t", "2 - t^2"});
  const auto p = tangent_intersection(m, 1.0, 1.0);
  CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(1.0).epsilon(1e-15));

  std::mt19937_64 rng(16);
  auto e = samplers::random_tangent_curves(rng);
  for (int k = 0; k < 10; ++k) {
    const double s = uniform(rng, -3, 3), t = uniform(rng, -3, 3);
    JetContext c0(2, 0);
    const std::vector<Jet> c = {Jet(c0, s), Jet(c0, t)};
    const auto fr = e.frame(c);
    Eigen::Matrix2d M;
    Eigen::Vector2d rhs;
    M << fr.l1[1].value(), -fr.l1[0].value(), fr.k1[1].value(), -fr.k1[0].value();
    rhs << fr.l[0].value() * fr.l1[1].value() - fr.l[1].value() * fr.l1[0].value(),
        fr.k[0].value() * fr.k1[1].value() - fr.k[1].value() * fr.k1[0].value();
    if (std::abs(M.determinant()) < 1e-3) continue;
    const Eigen::Vector2d want = M.partialPivLu().solve(rhs);
    const auto got = tangent_intersection(e, s, t);
    CHECK(std::abs(got[0] - want(0)) < 1e-10 * (1 + want.norm()));
    CHECK(std::abs(got[1] - want(1)) < 1e-10 * (1 + want.norm()));
    // on both tangent lines
    const Eigen::Vector2d q(got[0], got[1]), l(fr.l[0].value(), fr.l[1].value()), kk(fr.k[0].value(), fr.k[1].value());
    const Eigen::Vector2d l1(fr.l1[0].value(), fr.l1[1].value()), k1(fr.k1[0].value(), fr.k1[1].value());
    auto cross = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a(0) * b(1) - a(1) * b(0); };
    CHECK(std::abs(cross(q - l, l1)) < 1e-12 * (1 + q.norm()));
    CHECK(std::abs(cross(q - kk, k1)) < 1e-12 * (1 + q.norm()));
  }
  auto parallel = TangentLineModel::from_exprs({"s", "s^2"}, {"t", "t^2 + 1"});
  try {
    (void)tangent_intersection(parallel, 0.5, 0.5);
    FAIL("expected parallel tangents");
  } catch (const DomainError& err) {
    CHECK(err.condition() == "tangency");
  }
}

TEST_CASE("tangent omega coefficient is the Jacobian of the intersection map") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    auto m = samplers::random_tangent_curves(rng);
    for (const auto& p : admissible_probes(m, 5, -3.0, 3.0, rng, 1e-3)) {
      const double h = 1e-5;
      auto X = [&](double s, double t) { return tangent_intersection(m, s, t); };
      const auto a = X(p[0] + h, p[1]), b = X(p[0] - h, p[1]), c = X(p[0], p[1] + h), d = X(p[0], p[1] - h);
      const double J = ((a[0] - b[0]) * (c[1] - d[1]) - (a[1] - b[1]) * (c[0] - d[0])) / (4 * h * h);
      CHECK(rel_err(tangent_omega_coeff(m, p[0], p[1], 0).value(), J) < 1e-6);
    }
  }
  auto flat = TangentLineModel::from_exprs({"s", "s^3"}, {"t", "1 - t^2"});
  try {
    (void)tangent_omega_coeff(flat, 0.0, 0.5);
    FAIL("expected an inflection error");
  } catch (const DomainError& err) {
    CHECK(err.condition() == "inflection");
  }
}

TEST_CASE("tangent kappa formula against the jet oracle, and never zero") {
  std::mt19937_64 rng(18);
  int sampled = 0;
  for (int trial = 0; trial < 10; ++trial) {
    auto m = samplers::random_tangent_curves(rng);
    for (const auto& p : admissible_probes(m, 10, -3.0, 3.0, rng, 1e-3)) {
      const double oracle = abs_log(tangent_omega_coeff(m, p[0], p[1], 2)).derivative(0).derivative(1).value();
      const double k = tangent_kappa(m, p[0], p[1]);
      CHECK(rel_err(k, Calibration::kTangentSign * oracle, 1e-9) < 1e-6);
      CHECK(std::abs(k) > 1e-6);
      ++sampled;
    }
  }
  CHECK(sampled >= 90);
}

TEST_CASE("tangent c00: hand example, reflections and fitted normalization") {
  auto m = TangentLineModel::from_graphs("s^2", "1 - s^2");
  const auto c = tangent_c00_check(m, 0.5);
  CHECK(c.rhs == doctest::Approx(40.0).epsilon(1e-13));
  CHECK(c.ratio == doctest::Approx(4.0).epsilon(1e-10));

  auto refl = TangentLineModel::from_graphs("s^2 + 0.3*s^3 + 0.5", "-(s^2 + 0.3*s^3 + 0.5)");
  const double s = 0.4;
  const double rho = 2 * (s * s + 0.3 * s * s * s + 0.5), rho1 = 2 * (2 * s + 0.9 * s * s), rho2 = 2 * (2 + 1.8 * s);
  CHECK(rel_err(tangent_c00_check(refl, s).rhs, 4 * rho1 * rho1 * rho2 + 3 * rho * rho2 * rho2) < 1e-13);

  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = samplers::random_tangent_graphs(rng);
    std::vector<double> probes;
    while (probes.size() < 10) {
      const double v = uniform(rng, -1.0, 1.0);
      try {
        (void)tangent_c00_check(g, v);
        probes.push_back(v);
      } catch (const DomainError&) {
      }
    }
    const auto fit = fit_tangent_normalization(g, probes);
    CHECK(fit.exponents == kTangentC00Exponents);
    CHECK(fit.constant == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(fit.spread < 1e-6);
  }
}
