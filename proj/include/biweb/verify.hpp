#pragma once

// Verification suites: each criterion draws its own seeded models, compares the
// toolkit against an oracle and records every residual with its tolerance.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace biweb::verify {

struct Metric {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool upper = true;           // value < tolerance passes; otherwise value > tolerance passes
  bool informational = false;  // reported but does not gate the criterion
  bool ok() const noexcept { return upper ? value < tolerance : value > tolerance; }
};

struct CriterionResult {
  int id = 0;
  std::string name;
  std::vector<Metric> metrics;
  std::string note;
  std::string error;  // set when the criterion threw instead of producing residuals
  bool passed() const noexcept;
};

struct SuiteResult {
  std::string suite;
  std::vector<CriterionResult> criteria;
  double seconds = 0.0;
  bool passed() const noexcept;
};

struct Options {
  std::uint64_t seed = 20240917;  // std::mt19937_64, reseeded per criterion as seed + id
  std::optional<int> trials;      // overrides each criterion's default sample count
  std::optional<int> n;           // restricts dimension-ranging criteria to one n
};

/// sphere, product, cjk, tangent, holonomy, potential, symmetries
const std::vector<std::string>& suite_names();
/// `name` may also be "all", which runs every suite in order. Throws InputError for unknown names.
std::vector<SuiteResult> run(const std::string& name, const Options& opts = {});

CriterionResult sphere_ricci_flat(const Options& opts);      // 1
CriterionResult sphere_curvature_matrix(const Options& opts);  // 2
CriterionResult product_flatness(const Options& opts);       // 3
CriterionResult ray_xi(const Options& opts);                 // 4
CriterionResult ray_cjk(const Options& opts);                // 5
CriterionResult tangent_web(const Options& opts);            // 6
CriterionResult holonomy_law(const Options& opts);           // 7
CriterionResult double_potential(const Options& opts);       // 8
CriterionResult quad_product(const Options& opts);           // 9
CriterionResult symmetry_cartan(const Options& opts);        // 10

}  // namespace biweb::verify
