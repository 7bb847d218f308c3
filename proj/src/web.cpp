#include "biweb/web.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "biweb/errors.hpp"

namespace biweb {

// ---------------------------------------------------------------- JetMatrix

JetMatrix::JetMatrix(const JetContext& ctx, int rows, int cols)
    : ctx_(ctx), rows_(rows), cols_(cols), e_(static_cast<std::size_t>(rows * cols), Jet(ctx)) {}

JetMatrix JetMatrix::identity(const JetContext& ctx, int n) {
  JetMatrix m(ctx, n, n);
  for (int i = 0; i < n; ++i) m(i, i) = Jet(ctx, 1.0);
  return m;
}

JetMatrix JetMatrix::constant(const JetContext& ctx, const Eigen::MatrixXd& v) {
  JetMatrix m(ctx, static_cast<int>(v.rows()), static_cast<int>(v.cols()));
  for (int i = 0; i < m.rows_; ++i)
    for (int j = 0; j < m.cols_; ++j) m(i, j) = Jet(ctx, v(i, j));
  return m;
}

Eigen::MatrixXd JetMatrix::values() const {
  Eigen::MatrixXd v(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) v(i, j) = (*this)(i, j).value();
  return v;
}

JetMatrix JetMatrix::derivative(int var) const {
  JetMatrix out(ctx_.with_order(ctx_.order() - 1), rows_, cols_);
  for (std::size_t k = 0; k < e_.size(); ++k) out.e_[k] = e_[k].derivative(var);
  return out;
}

JetMatrix JetMatrix::transpose() const {
  JetMatrix out(ctx_, cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

JetMatrix operator*(const JetMatrix& a, const JetMatrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("JetMatrix: shape mismatch");
  JetMatrix out(a.ctx_, a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i) {
    for (int j = 0; j < b.cols_; ++j) {
      Jet s(a.ctx_);
      for (int k = 0; k < a.cols_; ++k) s += a(i, k) * b(k, j);
      out(i, j) = std::move(s);
    }
  }
  return out;
}

JetMatrix operator+(const JetMatrix& a, const JetMatrix& b) {
  JetMatrix out = a;
  for (std::size_t k = 0; k < out.e_.size(); ++k) out.e_[k] += b.e_.at(k);
  return out;
}

JetMatrix operator-(const JetMatrix& a, const JetMatrix& b) {
  JetMatrix out = a;
  for (std::size_t k = 0; k < out.e_.size(); ++k) out.e_[k] -= b.e_.at(k);
  return out;
}

Jet determinant(const JetMatrix& a) {
  const int n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("determinant: matrix not square");
  JetMatrix m = a;
  Jet det(a.context(), 1.0);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(m(r, c).value()) > std::abs(m(piv, c).value())) piv = r;
    }
    if (m(piv, c).value() == 0.0) return Jet(a.context(), 0.0);
    if (piv != c) {
      for (int k = 0; k < n; ++k) std::swap(m(c, k), m(piv, k));
      det = -det;
    }
    det = det * m(c, c);
    const Jet inv = reciprocal(m(c, c));
    for (int r = c + 1; r < n; ++r) {
      const Jet factor = m(r, c) * inv;
      for (int k = c; k < n; ++k) m(r, k) -= factor * m(c, k);
    }
  }
  return det;
}

JetMatrix inverse(const JetMatrix& a) {
  const int n = a.rows();
  const Eigen::MatrixXd a0 = a.values();
  const double d0 = a0.determinant();
  if (!(std::abs(d0) >= kDegenerateDet)) {
    throw DomainError("degenerate", "|det A| = " + std::to_string(std::abs(d0)) + " below 1e-12");
  }
  const JetContext& ctx = a.context();
  JetMatrix x = JetMatrix::constant(ctx, a0.partialPivLu().inverse());
  const JetMatrix two = JetMatrix::constant(ctx, 2.0 * Eigen::MatrixXd::Identity(n, n));
  for (int correct = 0; correct < ctx.order(); correct = 2 * correct + 1) {
    x = x * (two - a * x);
  }
  return x;
}

// ---------------------------------------------------------------- models

std::vector<std::string> explicit_variables(int n) {
  if (n == 1) return {"x", "y", "x1", "y1"};
  std::vector<std::string> v;
  for (int i = 1; i <= n; ++i) v.push_back("x" + std::to_string(i));
  for (int i = 1; i <= n; ++i) v.push_back("y" + std::to_string(i));
  return v;
}

namespace {

std::vector<std::string> with_params(std::vector<std::string> vars,
                                     const std::vector<std::pair<std::string, double>>& params) {
  for (const auto& [name, value] : params) vars.push_back(name);
  return vars;
}

std::vector<double> param_values(const std::vector<std::pair<std::string, double>>& params) {
  std::vector<double> v;
  for (const auto& p : params) v.push_back(p.second);
  return v;
}

}  // namespace

JetFn bind_expr(Expr e, std::vector<int> slots, std::vector<double> params) {
  return [e = std::move(e), slots = std::move(slots), params = std::move(params)](std::span<const Jet> coords) {
    std::vector<Jet> values;
    values.reserve(slots.size() + params.size());
    for (int s : slots) values.push_back(coords[static_cast<std::size_t>(s)]);
    for (double v : params) values.emplace_back(coords[0].context(), v);
    return eval_jet(e, values);
  };
}

ExplicitModel::ExplicitModel(int n, std::vector<JetFn> entries) : n_(n), entries_(std::move(entries)) {
  if (n < 1) throw InputError("explicit model: n must be >= 1");
  if (entries_.size() != static_cast<std::size_t>(n * n)) {
    throw InputError("explicit model: expected " + std::to_string(n * n) + " entries");
  }
}

ExplicitModel ExplicitModel::from_exprs(int n, const std::vector<std::string>& sources,
                                        const std::vector<std::pair<std::string, double>>& params) {
  if (sources.size() != static_cast<std::size_t>(n * n)) {
    throw InputError("explicit model: expected " + std::to_string(n * n) + " A entries");
  }
  const auto vars = with_params(explicit_variables(n), params);
  std::vector<int> slots;
  if (n == 1) {
    slots = {0, 1, 0, 1};
  } else {
    for (int k = 0; k < 2 * n; ++k) slots.push_back(k);
  }
  std::vector<JetFn> fns;
  for (const auto& src : sources) {
    fns.push_back(bind_expr(parse(src, std::span<const std::string>(vars)), slots, param_values(params)));
  }
  return ExplicitModel(n, std::move(fns));
}

JetMatrix ExplicitModel::omega_jets(std::span<const Jet> coords) const {
  JetMatrix a(coords[0].context(), n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) a(i, j) = entries_[static_cast<std::size_t>(i * n_ + j)](coords);
  return a;
}

JetFn partial_fn(JetFn F, std::vector<int> alpha, int num_coords) {
  return [F = std::move(F), alpha = std::move(alpha), num_coords](std::span<const Jet> coords) {
    if (coords.size() < static_cast<std::size_t>(num_coords)) throw std::logic_error("partial_fn: too few coordinates");
    // Only coordinates that vary along the input jets, or are differentiated, become
    // variables of the auxiliary jet; the rest enter as constants.
    std::vector<int> active;
    std::vector<int> slot(static_cast<std::size_t>(num_coords), -1);
    for (int k = 0; k < num_coords; ++k) {
      const auto c = coords[static_cast<std::size_t>(k)].coeffs();
      const bool varies = std::any_of(c.begin() + 1, c.end(), [](double v) { return v != 0.0; });
      const bool differentiated = std::find(alpha.begin(), alpha.end(), k) != alpha.end();
      if (varies || differentiated) {
        slot[static_cast<std::size_t>(k)] = static_cast<int>(active.size());
        active.push_back(k);
      }
    }
    const int order = coords[0].order();
    if (active.empty()) {
      JetContext aux(1, static_cast<int>(alpha.size()));
      std::vector<Jet> seeds;
      for (int k = 0; k < num_coords; ++k) seeds.emplace_back(aux, coords[static_cast<std::size_t>(k)].value());
      return Jet(coords[0].context(), F(seeds).value());
    }
    JetContext aux(static_cast<int>(active.size()), order + static_cast<int>(alpha.size()));
    std::vector<Jet> seeds;
    for (int k = 0; k < num_coords; ++k) {
      const double v = coords[static_cast<std::size_t>(k)].value();
      const int sl = slot[static_cast<std::size_t>(k)];
      seeds.push_back(sl >= 0 ? seed_variable(aux, sl, v) : Jet(aux, v));
    }
    Jet h = F(seeds);
    for (int v : alpha) h = h.derivative(slot[static_cast<std::size_t>(v)]);
    std::vector<Jet> args;
    for (int k : active) args.push_back(coords[static_cast<std::size_t>(k)]);
    return compose_taylor(h, args);
  };
}

PotentialModel::PotentialModel(int n, JetFn H) : n_(n) {
  if (n < 1) throw InputError("potential model: n must be >= 1");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) entries_.push_back(partial_fn(H, {i, n + j}, 2 * n));
}

PotentialModel PotentialModel::from_expr(int n, const std::string& source,
                                         const std::vector<std::pair<std::string, double>>& params) {
  const auto vars = with_params(explicit_variables(n), params);
  std::vector<int> slots;
  if (n == 1) {
    slots = {0, 1, 0, 1};
  } else {
    for (int k = 0; k < 2 * n; ++k) slots.push_back(k);
  }
  return PotentialModel(n, bind_expr(parse(source, std::span<const std::string>(vars)), slots, param_values(params)));
}

JetMatrix PotentialModel::omega_jets(std::span<const Jet> coords) const {
  JetMatrix a(coords[0].context(), n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) a(i, j) = entries_[static_cast<std::size_t>(i * n_ + j)](coords);
  return a;
}

ProductModel::ProductModel(int n, std::vector<JetFn> f, std::vector<JetFn> g)
    : n_(n), f_(std::move(f)), g_(std::move(g)) {
  if (f_.size() != static_cast<std::size_t>(n * n) || g_.size() != static_cast<std::size_t>(n * n)) {
    throw InputError("product model: f and g need " + std::to_string(n * n) + " entries each");
  }
}

ProductModel ProductModel::from_exprs(int n, const std::vector<std::string>& f,
                                      const std::vector<std::string>& g,
                                      const std::vector<std::pair<std::string, double>>& params) {
  std::vector<std::string> xs, ys;
  std::vector<int> xslots, yslots;
  for (int i = 1; i <= n; ++i) {
    xs.push_back("x" + std::to_string(i));
    ys.push_back("y" + std::to_string(i));
    xslots.push_back(i - 1);
    yslots.push_back(n + i - 1);
  }
  if (n == 1) {
    xs.push_back("x");
    ys.push_back("y");
    xslots.push_back(0);
    yslots.push_back(1);
  }
  xs = with_params(xs, params);
  ys = with_params(ys, params);
  std::vector<JetFn> ff, gg;
  for (const auto& s : f) ff.push_back(bind_expr(parse(s, std::span<const std::string>(xs)), xslots, param_values(params)));
  for (const auto& s : g) gg.push_back(bind_expr(parse(s, std::span<const std::string>(ys)), yslots, param_values(params)));
  return ProductModel(n, std::move(ff), std::move(gg));
}

JetMatrix ProductModel::omega_jets(std::span<const Jet> coords) const {
  const JetContext& ctx = coords[0].context();
  JetMatrix f(ctx, n_, n_), g(ctx, n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      f(i, j) = f_[static_cast<std::size_t>(i * n_ + j)](coords);
      g(i, j) = g_[static_cast<std::size_t>(i * n_ + j)](coords);
    }
  }
  return f * g;
}

SectionModel::SectionModel(std::shared_ptr<const WebModel> base, std::vector<double> anchor, int i, int j)
    : base_(std::move(base)), anchor_(std::move(anchor)), i_(i), j_(j) {
  const int n = base_->dim();
  if (anchor_.size() != static_cast<std::size_t>(2 * n)) throw InputError("section: anchor has wrong length");
  if (i < 0 || i >= n || j < 0 || j >= n) throw InputError("section: plane index out of range");
}

std::vector<double> SectionModel::full_point(std::span<const double> p) const {
  std::vector<double> full = anchor_;
  full[static_cast<std::size_t>(i_)] = p[0];
  full[static_cast<std::size_t>(base_->dim() + j_)] = p[1];
  return full;
}

JetMatrix SectionModel::omega_jets(std::span<const Jet> coords) const {
  const JetContext& ctx = coords[0].context();
  std::vector<Jet> full;
  for (double v : anchor_) full.emplace_back(ctx, v);
  full[static_cast<std::size_t>(i_)] = coords[0];
  full[static_cast<std::size_t>(base_->dim() + j_)] = coords[1];
  JetMatrix a = base_->omega_jets(full);
  JetMatrix out(ctx, 1, 1);
  out(0, 0) = a(i_, j_);
  return out;
}

void SectionModel::check_point(std::span<const double> p) const { base_->check_point(full_point(p)); }

// ---------------------------------------------------------------- pointwise

JetMatrix omega_matrix(const WebModel& m, std::span<const double> p, int order) {
  const int n = m.dim();
  if (p.size() != static_cast<std::size_t>(2 * n)) {
    throw InputError("point has " + std::to_string(p.size()) + " coordinates, expected " + std::to_string(2 * n));
  }
  m.check_point(p);
  JetContext ctx(2 * n, order);
  std::vector<Jet> coords;
  for (int k = 0; k < 2 * n; ++k) coords.push_back(seed_variable(ctx, k, p[static_cast<std::size_t>(k)]));
  JetMatrix a = m.omega_jets(coords);
  if (a.rows() != n || a.cols() != n) throw std::logic_error("model returned a matrix of the wrong shape");
  const double d = a.values().determinant();
  if (!(std::abs(d) >= kDegenerateDet)) {
    throw DomainError("degenerate", "|det A| = " + std::to_string(std::abs(d)) + " below 1e-12");
  }
  return a;
}

double TwoFormBlock::sup_norm() const {
  double s = 0.0;
  for (const auto& m : entries) s = std::max(s, m.cwiseAbs().maxCoeff());
  return s;
}

PointGeometry::PointGeometry(const WebModel& m, std::span<const double> p)
    : n_(m.dim()), p_(p.begin(), p.end()) {
  const int n = n_, N = 2 * n;
  JetMatrix A = omega_matrix(m, p, 2);
  A0_ = A.values();
  det0_ = A0_.determinant();
  JetMatrix Ainv = inverse(A);

  JetContext c1(N, 1);
  JetMatrix Ainv1(c1, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Ainv1(i, j) = Ainv(i, j).truncate(1);

  std::vector<JetMatrix> M, Nl;
  for (int k = 0; k < n; ++k) M.push_back(A.derivative(k) * Ainv1);
  for (int l = 0; l < n; ++l) Nl.push_back(Ainv1 * A.derivative(n + l));

  auto blank1 = [&] {
    OneFormBlock b;
    b.n = n;
    b.entries.assign(static_cast<std::size_t>(n * n), Eigen::VectorXd::Zero(N));
    return b;
  };
  auto blank2 = [&] {
    TwoFormBlock b;
    b.n = n;
    b.entries.assign(static_cast<std::size_t>(n * n), Eigen::MatrixXd::Zero(N, N));
    return b;
  };
  gF_ = blank1();
  gG_ = blank1();
  oF_ = blank2();
  oG_ = blank2();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        gF_(i, j)(k) = M[static_cast<std::size_t>(k)](j, i).value();
        gG_(i, j)(n + k) = Nl[static_cast<std::size_t>(k)](i, j).value();
      }
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          const double f = -M[static_cast<std::size_t>(k)](j, i).partial(MultiIndex::unit(N, n + l));
          oF_(i, j)(k, n + l) = f;
          oF_(i, j)(n + l, k) = -f;
          const double g = Nl[static_cast<std::size_t>(l)](i, j).partial(MultiIndex::unit(N, k));
          oG_(i, j)(k, n + l) = g;
          oG_(i, j)(n + l, k) = -g;
        }
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        const double dx = A(k, j).partial(MultiIndex::unit(N, i)) - A(i, j).partial(MultiIndex::unit(N, k));
        const double dy = A(j, k).partial(MultiIndex::unit(N, n + i)) - A(j, i).partial(MultiIndex::unit(N, n + k));
        closed_residual_ = std::max({closed_residual_, std::abs(dx), std::abs(dy)});
      }
    }
  }

  Jet logdet = abs_log(determinant(A));
  ricci_ = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      ricci_(i, j) = logdet.partial(MultiIndex::unit(N, i) + MultiIndex::unit(N, n + j));
    }
  }

  gamma_jets_.assign(static_cast<std::size_t>(N * N * N), Jet(c1));
  auto gj = [&](int a, int b, int c) -> Jet& { return gamma_jets_[static_cast<std::size_t>((a * N + b) * N + c)]; };
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        gj(a, b, c) = M[static_cast<std::size_t>(c)](b, a);
        gj(n + a, n + b, n + c) = Nl[static_cast<std::size_t>(c)](a, b);
      }
    }
  }
  ainv_jets_.clear();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ainv_jets_.push_back(Ainv1(i, j));
  M0_.clear();
  for (const auto& mk : M) M0_.push_back(mk.values());
}

std::vector<Eigen::MatrixXd> PointGeometry::block_curvature() const {
  const int n = n_, N = 2 * n;
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(N * N), Eigen::MatrixXd::Zero(N, N));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      out[static_cast<std::size_t>(a * N + b)] = oF_(a, b);
      out[static_cast<std::size_t>((n + a) * N + (n + b))] = oG_(a, b);
    }
  }
  return out;
}

std::vector<Eigen::MatrixXd> PointGeometry::cartan_curvature() const {
  const int N = 2 * n_;
  auto gj = [&](int a, int b, int c) -> const Jet& {
    return gamma_jets_[static_cast<std::size_t>((a * N + b) * N + c)];
  };
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(N * N), Eigen::MatrixXd::Zero(N, N));
  for (int a = 0; a < N; ++a) {
    for (int b = 0; b < N; ++b) {
      Eigen::MatrixXd& w = out[static_cast<std::size_t>(a * N + b)];
      for (int c = 0; c < N; ++c) {
        for (int d = 0; d < N; ++d) {
          double v = gj(a, b, d).partial(MultiIndex::unit(N, c)) - gj(a, b, c).partial(MultiIndex::unit(N, d));
          for (int e = 0; e < N; ++e) {
            v += gj(a, e, c).value() * gj(e, b, d).value() - gj(a, e, d).value() * gj(e, b, c).value();
          }
          w(c, d) = v;
        }
      }
    }
  }
  return out;
}

Eigen::MatrixXd PointGeometry::curvature_operator(const Eigen::VectorXd& Z, const Eigen::VectorXd& W) const {
  const int n = n_, N = 2 * n;
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(N, N);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      R(a, b) = Z.dot(oF_(a, b) * W);
      R(n + a, n + b) = Z.dot(oG_(a, b) * W);
    }
  }
  return R;
}

double PointGeometry::omega(const Eigen::VectorXd& V, const Eigen::VectorXd& X) const {
  const int n = n_;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += A0_(i, j) * (V(i) * X(n + j) - V(n + j) * X(i));
  return s;
}

double PointGeometry::symplectic_curvature(const Eigen::VectorXd& X, const Eigen::VectorXd& Y,
                                           const Eigen::VectorXd& Z, const Eigen::VectorXd& W) const {
  return omega(curvature_operator(Z, W) * Y, X);
}

double PointGeometry::ricci_contraction(const Eigen::VectorXd& Y, const Eigen::VectorXd& Z) const {
  const int N = 2 * n_;
  double tr = 0.0;
  for (int c = 0; c < N; ++c) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(N, c);
    tr += (curvature_operator(Y, e) * Z)(c);
  }
  return tr;
}

double PointGeometry::hamiltonian_frame_residual(int i, int m) const {
  const int n = n_, N = 2 * n;
  if (i < 0 || i >= n || m < 0 || m >= n) throw std::out_of_range("hamiltonian_frame_check: index out of range");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  const Eigen::MatrixXd& Mm = M0_[static_cast<std::size_t>(m)];
  for (int a = 0; a < n; ++a) {
    v(a) = ainv_jets_[static_cast<std::size_t>(i * n + a)].partial(MultiIndex::unit(N, m));
    for (int k = 0; k < n; ++k) v(a) += ainv_jets_[static_cast<std::size_t>(i * n + k)].value() * Mm(k, a);
  }
  return v.norm();
}

std::pair<OneFormBlock, OneFormBlock> connection_forms(const WebModel& m, std::span<const double> p) {
  PointGeometry g(m, p);
  return {g.gamma_F(), g.gamma_G()};
}

std::pair<TwoFormBlock, TwoFormBlock> curvature_forms(const WebModel& m, std::span<const double> p) {
  PointGeometry g(m, p);
  return {g.omega_F(), g.omega_G()};
}

Eigen::MatrixXd ricci(const WebModel& m, std::span<const double> p) { return PointGeometry(m, p).ricci(); }

double symplectic_curvature(const WebModel& m, std::span<const double> p, const Eigen::VectorXd& X,
                            const Eigen::VectorXd& Y, const Eigen::VectorXd& Z, const Eigen::VectorXd& W) {
  return PointGeometry(m, p).symplectic_curvature(X, Y, Z, W);
}

double flatness_cross_ratio(const WebModel& m, std::span<const double> p, std::span<const double> base) {
  const int n = m.dim();
  if (p.size() != static_cast<std::size_t>(2 * n) || base.size() != p.size()) {
    throw InputError("cross ratio: points must have " + std::to_string(2 * n) + " coordinates");
  }
  auto corner = [&](std::span<const double> xs, std::span<const double> ys) {
    std::vector<double> q(xs.begin(), xs.end());
    q.insert(q.end(), ys.begin(), ys.end());
    return omega_matrix(m, q, 0).values();
  };
  const auto x = p.subspan(0, static_cast<std::size_t>(n)), y = p.subspan(static_cast<std::size_t>(n));
  const auto x0 = base.subspan(0, static_cast<std::size_t>(n)), y0 = base.subspan(static_cast<std::size_t>(n));
  const Eigen::MatrixXd cr = corner(x, y) * corner(x0, y).inverse() * corner(x0, y0) * corner(x, y0).inverse();
  return (cr - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
}

double hamiltonian_frame_check(const WebModel& m, std::span<const double> p, int i, int direction) {
  return PointGeometry(m, p).hamiltonian_frame_residual(i, direction);
}

CurvatureReport curvature_report(const PointGeometry& g) {
  CurvatureReport r;
  r.point = g.point();
  r.gamma_F = g.gamma_F();
  r.gamma_G = g.gamma_G();
  r.omega_F = g.omega_F();
  r.omega_G = g.omega_G();
  r.ricci = g.ricci();
  r.det_A = g.det_A();
  r.flat_residual = std::max(r.omega_F.sup_norm(), r.omega_G.sup_norm());
  r.closed_residual = g.closed_residual();
  return r;
}

CurvatureReport curvature_report(const WebModel& m, std::span<const double> p) {
  return curvature_report(PointGeometry(m, p));
}

}  // namespace biweb
