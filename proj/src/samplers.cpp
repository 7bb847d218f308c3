#include "biweb/samplers.hpp"

#include <cmath>

#include "biweb/errors.hpp"

namespace biweb::samplers {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

JetFn random_quadratic(std::mt19937_64& rng, std::vector<int> vars, double c0, double scale) {
  std::vector<double> lin, quad;
  for (std::size_t i = 0; i < vars.size(); ++i) lin.push_back(uniform(rng, -scale, scale));
  for (std::size_t i = 0; i < vars.size(); ++i)
    for (std::size_t j = i; j < vars.size(); ++j) quad.push_back(uniform(rng, -scale, scale));
  return [=](std::span<const Jet> z) {
    Jet s(z[0].context(), c0);
    std::size_t q = 0;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const Jet& zi = z[static_cast<std::size_t>(vars[i])];
      s += lin[i] * zi;
      for (std::size_t j = i; j < vars.size(); ++j) s += quad[q++] * zi * z[static_cast<std::size_t>(vars[j])];
    }
    return s;
  };
}

std::shared_ptr<PotentialModel> random_explicit(int n, std::mt19937_64& rng) {
  std::vector<int> all;
  for (int k = 0; k < 2 * n; ++k) all.push_back(k);
  JetFn q = random_quadratic(rng, all, uniform(rng, -0.5, 0.5), 0.4);
  JetFn l = random_quadratic(rng, all, 0.0, 0.3);
  JetFn H = [n, q, l](std::span<const Jet> z) {
    Jet s(z[0].context(), 0.0);
    for (int i = 0; i < n; ++i) s += 2.5 * z[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(n + i)];
    return s + q(z) * exp(l(z));
  };
  return std::make_shared<PotentialModel>(n, std::move(H));
}

std::shared_ptr<ProductModel> random_product(int n, std::mt19937_64& rng) {
  std::vector<int> xs, ys;
  for (int k = 0; k < n; ++k) {
    xs.push_back(k);
    ys.push_back(n + k);
  }
  std::vector<JetFn> f(static_cast<std::size_t>(n * n)), g(static_cast<std::size_t>(n * n));
  for (int l = 0; l < n; ++l) {
    JetFn qx = random_quadratic(rng, xs, 0.0, 0.3), cx = random_quadratic(rng, xs, 0.0, 0.3);
    JetFn qy = random_quadratic(rng, ys, 0.0, 0.3), cy = random_quadratic(rng, ys, 0.0, 0.3);
    const double ax = uniform(rng, -0.3, 0.3), ay = uniform(rng, -0.3, 0.3);
    JetFn phi = [=](std::span<const Jet> z) {
      const Jet& x = z[static_cast<std::size_t>(l)];
      return 2.0 * x + qx(z) + ax * x * cx(z);
    };
    JetFn psi = [=](std::span<const Jet> z) {
      const Jet& y = z[static_cast<std::size_t>(n + l)];
      return 2.0 * y + qy(z) + ay * y * cy(z);
    };
    for (int k = 0; k < n; ++k) {
      f[static_cast<std::size_t>(k * n + l)] = partial_fn(phi, {k}, 2 * n);      // f_kl = d phi_l / dx_k
      g[static_cast<std::size_t>(l * n + k)] = partial_fn(psi, {n + k}, 2 * n);  // g_lk = d psi_l / dy_k
    }
  }
  return std::make_shared<ProductModel>(n, std::move(f), std::move(g));
}

std::vector<double> random_point(int dims, std::mt19937_64& rng, double r) {
  std::vector<double> p;
  for (int k = 0; k < dims; ++k) p.push_back(uniform(rng, -r, r));
  return p;
}

JetFn taylor_graph(std::vector<double> derivs, int i, std::vector<double> s0, double cross) {
  return [derivs = std::move(derivs), i, s0 = std::move(s0), cross](std::span<const Jet> a) {
    const Jet u = a[static_cast<std::size_t>(i)] - s0[static_cast<std::size_t>(i)];
    Jet acc(a[0].context(), derivs[0]);
    Jet power(a[0].context(), 1.0);
    double fact = 1.0;
    for (std::size_t k = 1; k < derivs.size(); ++k) {
      power = power * u;
      fact *= static_cast<double>(k);
      acc += (derivs[k] / fact) * power;
    }
    for (std::size_t j = 0; j < s0.size(); ++j) {
      if (static_cast<int>(j) == i) continue;
      const Jet v = a[j] - s0[j];
      acc += cross * v * (u + 0.5 * v);
    }
    return acc;
  };
}

RaySpaceModel random_ray_graphs(int n, std::mt19937_64& rng) {
  const int m = n - 1;
  std::vector<int> vars;
  for (int k = 0; k < m; ++k) vars.push_back(k);
  JetFn fq = random_quadratic(rng, vars, 1.0, 0.3), fc = random_quadratic(rng, vars, 0.0, 0.2);
  JetFn gq = random_quadratic(rng, vars, 0.0, 0.3), gc = random_quadratic(rng, vars, 0.0, 0.2);
  JetFn f = [fq, fc](std::span<const Jet> s) {
    const Jet c = fc(s);
    return fq(s) + c * c;
  };
  JetFn g = [gq, gc](std::span<const Jet> s) {
    const Jet c = gc(s);
    return gq(s) + c * c;
  };
  return make_graph_model(n, std::move(f), std::move(g));
}

RaySpaceModel variety_ray_graphs(int n, CjkIdentity id, int i, std::span<const double> s0, std::mt19937_64& rng) {
  RhoSigmaJets rs;
  for (int k = 0; k <= 5; ++k) {
    rs.rho.push_back(uniform(rng, -1.0, 1.0));
    rs.sigma.push_back(uniform(rng, -1.0, 1.0));
  }
  rs.rho[0] = uniform(rng, 0.8, 1.5);
  reduce_onto_variety(id, n, rs);
  std::vector<double> fd, gd;
  for (int k = 0; k <= 5; ++k) {
    fd.push_back(0.5 * (rs.sigma[static_cast<std::size_t>(k)] + rs.rho[static_cast<std::size_t>(k)]));
    gd.push_back(0.5 * (rs.sigma[static_cast<std::size_t>(k)] - rs.rho[static_cast<std::size_t>(k)]));
  }
  std::vector<double> base(s0.begin(), s0.end());
  return make_graph_model(n, taylor_graph(fd, i, base, uniform(rng, -0.2, 0.2)),
                          taylor_graph(gd, i, base, uniform(rng, -0.2, 0.2)));
}

namespace {

// A closed curve near the ellipse (cx + a cos u, cy + b sin u) read from coordinate `slot`.
std::array<JetFn, 2> perturbed_ellipse(std::mt19937_64& rng, int slot, double cx, double cy, double a, double b,
                                       double wobble) {
  const double e1 = uniform(rng, -wobble, wobble), e2 = uniform(rng, -wobble, wobble);
  const double phase = uniform(rng, 0.0, 6.283185307179586);
  auto at = [slot](std::span<const Jet> c) { return c[static_cast<std::size_t>(slot)]; };
  JetFn x = [=](std::span<const Jet> c) {
    const Jet u = at(c);
    return cx + a * cos(u) + e1 * cos(2.0 * u + phase);
  };
  JetFn y = [=](std::span<const Jet> c) {
    const Jet u = at(c);
    return cy + b * sin(u) + e2 * sin(3.0 * u + phase);
  };
  return {x, y};
}

}  // namespace

RaySpaceModel random_planar_curves(std::mt19937_64& rng) {
  const double r1 = uniform(rng, 0.6, 1.0), r2 = uniform(rng, 2.2, 3.0);
  auto x = perturbed_ellipse(rng, 0, uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1), r1,
                             r1 * uniform(rng, 0.8, 1.2), 0.08);
  auto y = perturbed_ellipse(rng, 1, uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1), r2,
                             r2 * uniform(rng, 0.8, 1.2), 0.15);
  return RaySpaceModel(2, {x[0], x[1]}, {y[0], y[1]});
}

TangentLineModel random_tangent_curves(std::mt19937_64& rng) {
  auto l = perturbed_ellipse(rng, 0, uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5), uniform(rng, 0.8, 1.5),
                             uniform(rng, 0.8, 1.5), 0.0);
  auto k = perturbed_ellipse(rng, 1, uniform(rng, 2.5, 3.5), uniform(rng, -0.5, 0.5), uniform(rng, 0.8, 1.5),
                             uniform(rng, 0.8, 1.5), 0.0);
  return TangentLineModel(l, k);
}

TangentLineModel random_tangent_graphs(std::mt19937_64& rng) {
  auto cubic = [&rng](double c0, double c2) {
    const double c1 = uniform(rng, -0.5, 0.5), c3 = uniform(rng, -0.3, 0.3), e = uniform(rng, -0.3, 0.3);
    return [=](std::span<const Jet> c) {
      const Jet& s = c[0];
      return c0 + c1 * s + c2 * s * s + c3 * s * s * s + e * sin(s);
    };
  };
  JetFn f = cubic(uniform(rng, -0.2, 0.2), uniform(rng, 0.6, 1.2));
  JetFn g = cubic(uniform(rng, 1.0, 1.5), -uniform(rng, 0.6, 1.2));
  return TangentLineModel::from_graph_fns(std::move(f), std::move(g));
}

std::vector<std::vector<double>> admissible_probes(const WebModel& m, int count, double lo, double hi,
                                                   std::mt19937_64& rng, double min_det) {
  std::vector<std::vector<double>> out;
  const int dims = 2 * m.dim();
  for (int attempt = 0; attempt < 200 * count && static_cast<int>(out.size()) < count; ++attempt) {
    std::vector<double> p;
    for (int k = 0; k < dims; ++k) p.push_back(uniform(rng, lo, hi));
    try {
      m.check_point(p);
      if (std::abs(omega_matrix(m, p, 0).values().determinant()) < min_det) continue;
    } catch (const DomainError&) {
      continue;
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace biweb::samplers
