#pragma once

// Shared generators and finite-difference oracles for the test binaries.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "biweb/jet.hpp"
#include "biweb/samplers.hpp"
#include "biweb/web.hpp"

namespace biweb::testing {

using samplers::admissible_probes;
using samplers::random_explicit;
using samplers::random_point;
using samplers::random_product;
using samplers::random_quadratic;
using samplers::uniform;

/// A(p) by plain evaluation, for finite-difference oracles.
inline Eigen::MatrixXd A_at(const WebModel& m, std::span<const double> p) {
  return omega_matrix(m, p, 0).values();
}

/// Central difference of a matrix-valued function along coordinate k.
inline Eigen::MatrixXd fd_matrix(const std::function<Eigen::MatrixXd(std::span<const double>)>& f,
                                 std::vector<double> p, int k, double h = 1e-5) {
  auto q = p;
  q[static_cast<std::size_t>(k)] += h;
  Eigen::MatrixXd plus = f(q);
  q[static_cast<std::size_t>(k)] -= 2 * h;
  Eigen::MatrixXd minus = f(q);
  return (plus - minus) / (2 * h);
}

inline double rel_err(double got, double want, double floor = 1e-12) {
  return std::abs(got - want) / std::max(std::abs(want), floor);
}

}  // namespace biweb::testing
