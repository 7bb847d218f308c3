#pragma once

// Random model generators shared by the test suites and the `verify` command.
// Everything is driven by a caller-owned std::mt19937_64 so runs are reproducible.

#include <memory>
#include <random>
#include <span>
#include <vector>

#include "biweb/models.hpp"
#include "biweb/web.hpp"

namespace biweb::samplers {

double uniform(std::mt19937_64& rng, double lo, double hi);

/// c0 + sum c_i z_i + sum_{i<=j} c_ij z_i z_j over the coordinates listed in `vars`.
JetFn random_quadratic(std::mt19937_64& rng, std::vector<int> vars, double c0, double scale);

/// Random closed web: A = d_x d_y H with H = 2.5 sum x_i y_i + q(z) exp(l(z)).
std::shared_ptr<PotentialModel> random_explicit(int n, std::mt19937_64& rng);

/// Random product web with polynomial Jacobian factors f = d phi / dx, g = d psi / dy,
/// phi and psi cubic, so that A = f g is closed and has quadratic polynomial entries.
std::shared_ptr<ProductModel> random_product(int n, std::mt19937_64& rng);

std::vector<double> random_point(int dims, std::mt19937_64& rng, double r = 0.5);

/// Graph polynomial along direction i through s0 with the given derivatives there,
/// plus cross terms in the other directions scaled by `cross`.
JetFn taylor_graph(std::vector<double> derivs, int i, std::vector<double> s0, double cross);

/// Random polynomial graphs f (degree 4, near 1) and g (near 0) over R^{n-1}.
RaySpaceModel random_ray_graphs(int n, std::mt19937_64& rng);

/// A polynomial graph pair whose rho/sigma jets at (s0, direction i) lie on the
/// reduction variety of `id` (see reduce_onto_variety); the free jets are random.
RaySpaceModel variety_ray_graphs(int n, CjkIdentity id, int i, std::span<const double> s0, std::mt19937_64& rng);

/// Two random disjoint analytic closed curves (perturbed ellipses) as a planar ray model.
RaySpaceModel random_planar_curves(std::mt19937_64& rng);

/// Two random ellipses for a tangent-line web.
TangentLineModel random_tangent_curves(std::mt19937_64& rng);

/// Two random graph curves (s, f(s)), (t, g(t)) with f, g cubic plus a sine term.
TangentLineModel random_tangent_graphs(std::mt19937_64& rng);

/// Up to `count` probes from the window [lo, hi]^dims that pass check_point and
/// whose |det A| is at least `min_det`; gives up after 200 * count attempts.
std::vector<std::vector<double>> admissible_probes(const WebModel& m, int count, double lo, double hi,
                                                   std::mt19937_64& rng, double min_det = 1e-6);

}  // namespace biweb::samplers
