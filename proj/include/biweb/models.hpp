#pragma once

// Concrete web families: ray-space webs induced by two hypersurfaces of R^n,
// the sphere instance, and planar tangent-line webs, together with the closed
// form curvature expressions that serve as cross-checks for the generic
// pipeline in web.hpp.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "biweb/jet.hpp"
#include "biweb/web.hpp"

namespace biweb {

using Params = std::vector<std::pair<std::string, double>>;

inline constexpr double kDefaultSeparation = 1e-3;
inline constexpr double kTransversalityTol = 1e-10;

/// Calibrated constants relating closed-form expressions to the jet pipeline.
/// Each one was measured on the model named next to it and is asserted in tests.
struct Calibration {
  // xi = kXiSign * d^2 log|h| / ds dt   (concentric circles R1 = 1, R2 = 2)
  static constexpr double kXiSign = 1.0;
  // paper c_jk polynomial = scale * rho^{j+k+2} d^{j+k} kappa_ii, with scale 4 for j+k <= 1
  // (f = s^2, g = -1, n = 2) and 8 for j+k = 2 (random models on the reduction variety)
  static constexpr double kCjkScaleFirst = 4.0;
  static constexpr double kCjkScaleSecond = 8.0;
  // h = kRayVolumeSign * (n-1)! (-1)^{(n-1)(n-2)/2} det A
  static constexpr double kRayVolumeSign = 1.0;
  // computed Omega_F = kSphereSign * displayed sphere matrix   (c = 0, r = 1)
  static constexpr double kSphereSign = -1.0;
  // tangent kappa formula = kTangentSign * d^2 log|coefficient| / ds dt   (two ellipses)
  static constexpr double kTangentSign = 1.0;
};

/// Web on the space of oriented lines of R^n, induced by two hypersurfaces
/// x(s), y(t) with s, t in R^{n-1}. Coordinates are (s_1..s_{n-1}, t_1..t_{n-1});
/// the leaves are the rays through a fixed point of either hypersurface.
class RaySpaceModel final : public WebModel {
 public:
  /// `x` and `y` hold the n ambient components; x reads the s-coordinates, y the t-coordinates.
  RaySpaceModel(int n, std::vector<JetFn> x, std::vector<JetFn> y, double delta_sep = kDefaultSeparation);

  /// Graphs x = (s, f(s)), y = (t, g(t)). Both expressions are written in s1..s_{n-1}
  /// (s when n = 2); t1..t_{n-1} are accepted as aliases inside g.
  static RaySpaceModel from_graphs(int n, const std::string& f, const std::string& g, const Params& params = {},
                                   double delta_sep = kDefaultSeparation);
  /// Planar curves x(s) = (x1(s), x2(s)) and y(t) = (y1(t), y2(t)); n = 2.
  static RaySpaceModel from_curves(const std::array<std::string, 2>& x, const std::array<std::string, 2>& y,
                                   const Params& params = {}, double delta_sep = kDefaultSeparation);

  std::string kind() const override { return "ray_space"; }
  int dim() const override { return n_ - 1; }
  int ambient_dim() const noexcept { return n_; }
  double separation() const noexcept { return delta_sep_; }
  bool is_graph() const noexcept { return graph_f_.has_value(); }

  JetMatrix omega_jets(std::span<const Jet> coords) const override;
  void check_point(std::span<const double> p) const override;

  /// Positions and first derivatives at the given coordinate jets.
  struct Frame {
    std::vector<Jet> x, y;    // n components each
    std::vector<Jet> xs, yt;  // xs[a * n + k] = d x_k / d s_a, likewise yt
  };
  Frame frame(std::span<const Jet> coords) const;

  const std::vector<JetFn>& x_fns() const noexcept { return x_; }
  const std::vector<JetFn>& y_fns() const noexcept { return y_; }
  /// Graph functions (n-1 coordinate arguments each) when built from graphs.
  const std::optional<JetFn>& graph_f() const noexcept { return graph_f_; }
  const std::optional<JetFn>& graph_g() const noexcept { return graph_g_; }

 private:
  int n_;
  std::vector<JetFn> x_, y_, xs_, yt_;
  double delta_sep_;
  std::optional<JetFn> graph_f_, graph_g_;
  friend RaySpaceModel make_graph_model(int, JetFn, JetFn, double);
};

/// Graph model from closures f, g of n-1 arguments (each reads coords[0..n-2]).
RaySpaceModel make_graph_model(int n, JetFn f, JetFn g, double delta_sep = kDefaultSeparation);

/// Jet (in all 2(n-1) coordinates, through `order`) of the volume coefficient
/// h = (-1)^{n(n-1)/2} (n-1)! det(x_s, x-y) det(y_t, x-y) / |x-y|^{n+1}.
Jet rayspace_volume_coeff(const RaySpaceModel& m, std::span<const double> s, std::span<const double> t,
                          int order = 2);

/// The six-term closed form of the single curvature coefficient of a planar ray web.
double rayspace_xi(const RaySpaceModel& m, double s, double t);

/// Both hemispheres of the sphere |x - c| = r over the (s1, s2) disk.
RaySpaceModel sphere_model(const std::array<double, 3>& c, double r);

/// rho = f - g, sigma = f + g and their derivatives along s_i, at s.
struct RhoSigmaJets {
  std::vector<double> rho, sigma;  // rho[k] = d^k rho / ds_i^k
};
RhoSigmaJets rho_sigma(const JetFn& f, const JetFn& g, int num_args, int i, std::span<const double> s, int order);

enum class CjkIdentity { C00, C10PlusC01, C10MinusC01, C20PlusC02, C11 };
std::string to_string(CjkIdentity id);
CjkIdentity cjk_from_string(const std::string& name);
inline constexpr std::array<CjkIdentity, 5> kAllCjk = {CjkIdentity::C00, CjkIdentity::C10PlusC01,
                                                       CjkIdentity::C10MinusC01, CjkIdentity::C20PlusC02,
                                                       CjkIdentity::C11};

/// The paper's polynomial for the identity in ambient dimension n.
double cjk_polynomial(CjkIdentity id, int n, const RhoSigmaJets& rs);
double cjk_scale(CjkIdentity id);

/// The displayed polynomials are reduced forms: they equal the kappa jets only where the
/// lower identities vanish. First-order identities need c00 = 0, second-order ones also
/// c10 + c01 = c10 - c01 = 0. This solves those equations for rho2, then rho3 and sigma3
/// (each enters linearly), leaving every other entry of `rs` untouched.
void reduce_onto_variety(CjkIdentity id, int n, RhoSigmaJets& rs);

/// c_jk of kappa_ii at the diagonal point (s, s): rho^{j+k+2} d^{j+k} kappa_ii / ds_i^j dt_i^k,
/// combined as the identity requires. Uses the generic jet pipeline on the model.
double cjk_from_kappa(const RaySpaceModel& m, int i, int j, int k, std::span<const double> s);

struct CjkCheck {
  double lhs = 0.0;  // cjk_scale times the combination of c_jk from kappa jets
  double rhs = 0.0;  // the paper polynomial
};
/// Requires a graph model; i is the 0-based direction index.
CjkCheck ray_cjk_check(const RaySpaceModel& m, int i, CjkIdentity id, std::span<const double> s);

/// Web on the plane whose leaves are the tangent lines of two curves.
/// Coordinates (s, t) are the parameters of the points of tangency.
class TangentLineModel final : public WebModel {
 public:
  /// gl and gk hold the two components; gl reads coords[0], gk reads coords[1].
  TangentLineModel(std::array<JetFn, 2> gl, std::array<JetFn, 2> gk);
  /// gamma_L written in s, gamma_K written in t.
  static TangentLineModel from_exprs(const std::array<std::string, 2>& gl, const std::array<std::string, 2>& gk,
                                     const Params& params = {});
  /// gamma_L = (s, f(s)), gamma_K = (t, g(t)) with f, g written in s.
  static TangentLineModel from_graphs(const std::string& f, const std::string& g, const Params& params = {});
  /// The same from one-argument closures f(s), g(s).
  static TangentLineModel from_graph_fns(JetFn f, JetFn g);

  std::string kind() const override { return "tangent"; }
  int dim() const override { return 1; }
  JetMatrix omega_jets(std::span<const Jet> coords) const override;
  void check_point(std::span<const double> p) const override;

  struct Frame {
    std::vector<Jet> l, l1, l2, k, k1, k2;  // curve points and first two derivatives, 2 components each
  };
  Frame frame(std::span<const Jet> coords) const;

  /// One-argument graph functions when built from graphs.
  const std::optional<JetFn>& graph_f() const noexcept { return graph_f_; }
  const std::optional<JetFn>& graph_g() const noexcept { return graph_g_; }

 private:
  std::array<JetFn, 2> gl_, gk_, gl1_, gl2_, gk1_, gk2_;
  std::optional<JetFn> graph_f_, graph_g_;
};

/// Intersection of the tangent lines at gamma_L(s) and gamma_K(t).
std::array<double, 2> tangent_intersection(const TangentLineModel& m, double s, double t);
/// Jet (order `order` in (s, t)) of the ds^dt coefficient of dx^dy.
Jet tangent_omega_coeff(const TangentLineModel& m, double s, double t, int order = 2);
/// Closed-form kappa (six determinant terms).
double tangent_kappa(const TangentLineModel& m, double s, double t);

struct TangentC00Check {
  double lhs = 0.0;       // normalizing monomial times kappa(s, s), kappa from jets
  double rhs = 0.0;       // 4 rho1^2 rho2 + 3 rho (rho2^2 - sigma2^2)
  double ratio = 0.0;     // rhs / lhs
  std::array<int, 3> exponents{};  // of rho, rho1, rho2^2 - sigma2^2 in the monomial
};
/// `exponents` defaults to the fitted normalization (see fit_tangent_normalization).
TangentC00Check tangent_c00_check(const TangentLineModel& graphs, double s,
                                  std::optional<std::array<int, 3>> exponents = std::nullopt);

/// Fits integer exponents (a, b, c) so that kappa(s,s) * rho^a rho1^b (rho2^2-sigma2^2)^c
/// is proportional to the c_00 polynomial, by least squares on log-ratios at the probes.
struct NormalizationFit {
  std::array<int, 3> exponents{};
  std::array<double, 3> raw{};
  double constant = 0.0;
  double spread = 0.0;  // max relative deviation of the ratio across probes
};
NormalizationFit fit_tangent_normalization(const TangentLineModel& graphs, std::span<const double> probes);

/// The normalization the toolkit ships with: rho^1 rho1^2 (rho2^2-sigma2^2)^0, constant 4.
inline constexpr std::array<int, 3> kTangentC00Exponents = {1, 2, 0};
inline constexpr double kTangentC00Constant = 4.0;

}  // namespace biweb
