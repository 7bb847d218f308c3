#pragma once

// Bi-Lagrangian webs in adapted coordinates (x_1..x_n, y_1..y_n).
//
// A web is described by its coefficient matrix A_ij = omega(dx_i, dy_j). All
// geometry (connection, curvature, Ricci) is computed from jets of A at a
// point. Points are flat coordinate vectors p = (x_1..x_n, y_1..y_n).
//
// Form conventions:
//   * the connection matrix gamma acts on the frame (dx_1..dx_n, dy_1..dy_n)
//     by nabla e_b = sum_a gamma(a, b) e_a;
//   * a 1-form is stored as its 2n components over (dx_1..dx_n, dy_1..dy_n);
//   * a 2-form is stored as the antisymmetric matrix component[a][b] = form(e_a, e_b).

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "biweb/expr.hpp"
#include "biweb/jet.hpp"

namespace biweb {

inline constexpr double kDegenerateDet = 1e-12;

/// Square matrix of jets sharing one context.
class JetMatrix {
 public:
  JetMatrix(const JetContext& ctx, int rows, int cols);
  static JetMatrix identity(const JetContext& ctx, int n);
  static JetMatrix constant(const JetContext& ctx, const Eigen::MatrixXd& m);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  const JetContext& context() const noexcept { return ctx_; }

  Jet& operator()(int i, int j) { return e_[static_cast<std::size_t>(i * cols_ + j)]; }
  const Jet& operator()(int i, int j) const { return e_[static_cast<std::size_t>(i * cols_ + j)]; }

  Eigen::MatrixXd values() const;
  JetMatrix derivative(int var) const;
  JetMatrix transpose() const;

  friend JetMatrix operator*(const JetMatrix& a, const JetMatrix& b);
  friend JetMatrix operator+(const JetMatrix& a, const JetMatrix& b);
  friend JetMatrix operator-(const JetMatrix& a, const JetMatrix& b);

 private:
  JetContext ctx_;
  int rows_, cols_;
  std::vector<Jet> e_;
};

/// Determinant by Gaussian elimination with partial pivoting on constant terms.
Jet determinant(const JetMatrix& a);
/// Series inverse: constant inverse by LU, high orders by Newton iteration.
/// Throws DomainError("degenerate") if |det A(p)| < kDegenerateDet.
JetMatrix inverse(const JetMatrix& a);

class WebModel {
 public:
  virtual ~WebModel() = default;

  virtual std::string kind() const = 0;
  /// Leaf dimension n; points have 2n coordinates.
  virtual int dim() const = 0;
  /// Jets of A at the point whose coordinate jets are `coords` (2n of them, x-side first).
  virtual JetMatrix omega_jets(std::span<const Jet> coords) const = 0;
  /// Model-specific admissibility checks at a point; throws DomainError.
  virtual void check_point(std::span<const double> /*p*/) const {}
};

using JetFn = std::function<Jet(std::span<const Jet>)>;

/// Evaluates `e` with its k-th variable read from coords[slots[k]]; the remaining
/// variables are the constant parameters, in order.
JetFn bind_expr(Expr e, std::vector<int> slots, std::vector<double> params);

/// A given entrywise by closures or Exprs of (x_1..x_n, y_1..y_n, params...).
class ExplicitModel final : public WebModel {
 public:
  ExplicitModel(int n, std::vector<JetFn> entries);

  /// Variables available to the expressions: x1..xn, y1..yn (and x, y when n = 1),
  /// followed by the parameter names.
  static ExplicitModel from_exprs(int n, const std::vector<std::string>& sources,
                                  const std::vector<std::pair<std::string, double>>& params = {});

  std::string kind() const override { return "explicit"; }
  int dim() const override { return n_; }
  JetMatrix omega_jets(std::span<const Jet> coords) const override;

 private:
  int n_;
  std::vector<JetFn> entries_;
};

/// Closure evaluating d^alpha F at the given coordinate jets, alpha listing the
/// differentiated coordinates (with repetition). F reads `num_coords` coordinates.
JetFn partial_fn(JetFn F, std::vector<int> alpha, int num_coords);

/// A_ij = d^2 H / dx_i dy_j for a scalar potential H; omega = d_x d_y H is closed by construction.
class PotentialModel final : public WebModel {
 public:
  PotentialModel(int n, JetFn H);
  /// H is an Expr in the explicit-model variables.
  static PotentialModel from_expr(int n, const std::string& source,
                                  const std::vector<std::pair<std::string, double>>& params = {});

  std::string kind() const override { return "explicit"; }
  int dim() const override { return n_; }
  JetMatrix omega_jets(std::span<const Jet> coords) const override;

 private:
  int n_;
  std::vector<JetFn> entries_;
};

/// A(x, y) = f(x) * g(y).
class ProductModel final : public WebModel {
 public:
  ProductModel(int n, std::vector<JetFn> f, std::vector<JetFn> g);

  /// f entries are Exprs in x1..xn (x when n = 1), g entries in y1..yn (y).
  static ProductModel from_exprs(int n, const std::vector<std::string>& f,
                                 const std::vector<std::string>& g,
                                 const std::vector<std::pair<std::string, double>>& params = {});

  std::string kind() const override { return "product"; }
  int dim() const override { return n_; }
  JetMatrix omega_jets(std::span<const Jet> coords) const override;

 private:
  int n_;
  std::vector<JetFn> f_, g_;  // f_ reads x-jets only, g_ reads y-jets only
};

/// The 2D web cut out of a higher-dimensional one by freezing all coordinates
/// except x_i and y_j; its coefficient is A_ij restricted to that plane.
class SectionModel final : public WebModel {
 public:
  SectionModel(std::shared_ptr<const WebModel> base, std::vector<double> anchor, int i, int j);

  std::string kind() const override { return "section"; }
  int dim() const override { return 1; }
  JetMatrix omega_jets(std::span<const Jet> coords) const override;
  void check_point(std::span<const double> p) const override;

 private:
  std::vector<double> full_point(std::span<const double> p) const;
  std::shared_ptr<const WebModel> base_;
  std::vector<double> anchor_;
  int i_, j_;
};

/// Variable names used by explicit models of leaf dimension n.
std::vector<std::string> explicit_variables(int n);

struct OneFormBlock {
  int n = 0;
  std::vector<Eigen::VectorXd> entries;  // n*n, each of length 2n
  const Eigen::VectorXd& operator()(int i, int j) const { return entries[static_cast<std::size_t>(i * n + j)]; }
  Eigen::VectorXd& operator()(int i, int j) { return entries[static_cast<std::size_t>(i * n + j)]; }
};

struct TwoFormBlock {
  int n = 0;
  std::vector<Eigen::MatrixXd> entries;  // n*n, each 2n x 2n antisymmetric
  const Eigen::MatrixXd& operator()(int i, int j) const { return entries[static_cast<std::size_t>(i * n + j)]; }
  Eigen::MatrixXd& operator()(int i, int j) { return entries[static_cast<std::size_t>(i * n + j)]; }
  double sup_norm() const;
};

/// Everything needed about the web at one point, from jets of A of order 2.
class PointGeometry {
 public:
  PointGeometry(const WebModel& m, std::span<const double> p);

  int dim() const noexcept { return n_; }
  const std::vector<double>& point() const noexcept { return p_; }
  const Eigen::MatrixXd& A() const noexcept { return A0_; }
  double det_A() const noexcept { return det0_; }

  const OneFormBlock& gamma_F() const noexcept { return gF_; }
  const OneFormBlock& gamma_G() const noexcept { return gG_; }
  const TwoFormBlock& omega_F() const noexcept { return oF_; }
  const TwoFormBlock& omega_G() const noexcept { return oG_; }
  const Eigen::MatrixXd& ricci() const noexcept { return ricci_; }
  /// max |d_{x_i}A_kj - d_{x_k}A_ij|, |d_{y_j}A_il - d_{y_l}A_ij|; zero iff d omega = 0 at p.
  double closed_residual() const noexcept { return closed_residual_; }

  /// R(Z, W) as a 2n x 2n endomorphism of coordinate components.
  Eigen::MatrixXd curvature_operator(const Eigen::VectorXd& Z, const Eigen::VectorXd& W) const;
  double omega(const Eigen::VectorXd& V, const Eigen::VectorXd& X) const;
  /// Rs(X, Y, Z, W) = omega(R(Z, W) Y, X).
  double symplectic_curvature(const Eigen::VectorXd& X, const Eigen::VectorXd& Y,
                              const Eigen::VectorXd& Z, const Eigen::VectorXd& W) const;
  /// Ric(Y, Z) = tr(X -> R(Y, X) Z).
  double ricci_contraction(const Eigen::VectorXd& Y, const Eigen::VectorXd& Z) const;

  /// Curvature of the full connection by the structure equation dgamma + gamma ^ gamma;
  /// entry (a, b) is a 2-form on all 2n coordinates.
  std::vector<Eigen::MatrixXd> cartan_curvature() const;
  /// The block-diagonal curvature assembled from omega_F and omega_G, same layout.
  std::vector<Eigen::MatrixXd> block_curvature() const;

  /// ||nabla_{dx_m} X_{y_i}|| for the Hamiltonian field of y_i.
  double hamiltonian_frame_residual(int i, int m) const;

 private:
  int n_;
  std::vector<double> p_;
  Eigen::MatrixXd A0_;
  double det0_ = 0.0;
  OneFormBlock gF_, gG_;
  TwoFormBlock oF_, oG_;
  Eigen::MatrixXd ricci_;
  double closed_residual_ = 0.0;
  // jets of the full connection matrix components, order 1: gamma(a,b)[c]
  std::vector<Jet> gamma_jets_;
  // jets of A^{-1} (order 1) and of M^m = dA/dx_m A^{-1} (order 1), for the frame check
  std::vector<Jet> ainv_jets_;
  std::vector<Eigen::MatrixXd> M0_;
};

/// Jets of A at p through `order`. Throws DomainError("degenerate") if |det A(p)| < 1e-12.
JetMatrix omega_matrix(const WebModel& m, std::span<const double> p, int order);

std::pair<OneFormBlock, OneFormBlock> connection_forms(const WebModel& m, std::span<const double> p);
std::pair<TwoFormBlock, TwoFormBlock> curvature_forms(const WebModel& m, std::span<const double> p);
Eigen::MatrixXd ricci(const WebModel& m, std::span<const double> p);
double symplectic_curvature(const WebModel& m, std::span<const double> p, const Eigen::VectorXd& X,
                            const Eigen::VectorXd& Y, const Eigen::VectorXd& Z,
                            const Eigen::VectorXd& W);
/// ||A(x,y) A(x0,y)^{-1} A(x0,y0) A(x,y0)^{-1} - I||_inf, with p = (x, y) and base = (x0, y0).
double flatness_cross_ratio(const WebModel& m, std::span<const double> p, std::span<const double> base);
double hamiltonian_frame_check(const WebModel& m, std::span<const double> p, int i, int direction);

struct CurvatureReport {
  std::vector<double> point;
  OneFormBlock gamma_F, gamma_G;
  TwoFormBlock omega_F, omega_G;
  Eigen::MatrixXd ricci;
  double det_A = 0.0;
  double flat_residual = 0.0;
  double closed_residual = 0.0;
};

CurvatureReport curvature_report(const WebModel& m, std::span<const double> p);
CurvatureReport curvature_report(const PointGeometry& g);

}  // namespace biweb
