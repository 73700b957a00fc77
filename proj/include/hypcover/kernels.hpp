#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hypcover/characters.hpp"
#include "hypcover/covers.hpp"
#include "hypcover/hyperbolic.hpp"

namespace hypcover {

/// Radial kernel k(rho) on H with support [0, support].
struct KernelProfile {
  std::function<double(double)> k;
  double support = 0.0;
  /// Set when k = height * 1{rho <= support}; enables the closed-form
  /// angular integral in kernel_selfconv.
  std::optional<double> indicator_height;
  /// Interior radii where k is not smooth; quadratures split there.
  std::vector<double> breakpoints;

  double operator()(double rho) const { return rho <= support ? k(rho) : 0.0; }

  /// k_t(rho) = 1{rho <= t} / sqrt(cosh t).
  static KernelProfile kt(double t);
  static KernelProfile zero(double support);
};

/// Abel step g(s) = 2 sqrt2 int_0^{sqrt(cosh T - cosh s)} k(acosh(cosh s + v^2)) dv,
/// T the support; the substitution removes the square-root endpoint singularity.
double selberg_g(const KernelProfile& k, double s);

/// h(r) = 2 int_0^T cos(r s) g(s) ds for real r; with `imaginary`, r stands
/// for i*r and cos becomes cosh.
double selberg_h(const KernelProfile& k, double r, bool imaginary);

/// h(i s) for each s (s = sqrt(1/4 - lambda) for lambda in [0, 1/4]).
std::vector<double> selberg_transform(const KernelProfile& k, const std::vector<double>& s_grid);

/// Closed forms used as oracles: h_t(i/2) = int_H k_t dmu and K_t(0).
double kt_h_at_zero(double t);
double kt_selfconv_at_zero(double t);

/// K = k * k as a radial kernel with support 2T. Indicator kernels use the
/// angular closed form (measure of a disc intersection); others integrate
/// over geodesic polar coordinates numerically.
KernelProfile kernel_selfconv(const KernelProfile& k);
/// Always the full 2D quadrature, for cross-checking the indicator route.
double kernel_selfconv_2d(const KernelProfile& k, double rho);

struct RatioReport {
  double min_ratio = 0.0;
  double arg_t = 0.0;
  double arg_lambda = 0.0;
  std::vector<std::vector<double>> table;  ///< [t index][lambda index]
};

/// min over the grid of h_t(r(lambda)) / sinh(t sqrt(1/4 - lambda)). Requires
/// t >= 3 and lambda < 1/4.
RatioReport lower_bound_ratio(const std::vector<double>& t_grid, const std::vector<double>& lambda_grid);

struct PretraceTerm {
  Word word;
  double distance = 0.0;  ///< d(z, gamma z)
  int sign = 1;           ///< chi_i(gamma)
  double value = 0.0;     ///< sign * K(distance)
};

struct PretraceRhs {
  double value = 0.0;
  HPoint centre;  ///< z moved into F
  int fiber = 0;  ///< the fiber index after that move
  std::vector<PretraceTerm> terms;  ///< gamma fixing `fiber` with d(centre, gamma centre) <= support
};

/// sum over gamma in Gamma with i.gamma = i of chi_i(gamma) K(d(z, gamma z)),
/// the orbit taken from lattice_ball(z, support). z is in the coordinates of
/// tile i; points outside F are first reduced into F. Requires a connected cover and support <= 12.
PretraceRhs pretrace_rhs(const HPoint& z, const PermutationPair& p, const SpanningBasis& basis,
                         const CoverCharacter& chi, const KernelProfile& K, int fiber,
                         const LatticeOptions& opts = {});

// Bumps. psi is the smooth step exp(-1/x) / (exp(-1/x) + exp(-1/(1-x))).
double smooth_step(double x);
double smooth_step_derivative(double x);

/// J(r) = sin(pi/2 psi(r - 2)): 0 for r <= 2, 1 for r >= 3.
double bump_J(double r);
double bump_J_derivative(double r);
/// sqrt(1 - J^2) evaluated as cos(pi/2 psi(r - 2)), smooth by construction.
double bump_J_complement(double r);
double bump_J_complement_derivative(double r);

/// kappa = asinh(1/8) / 2.
double collar_kappa();

enum class Bump { J, J0, J1, J2, JStar };

/// Point where a bump is evaluated. For J0/J1/J2: cusp index (0 = compact
/// part, 1 or 2) and the standard cusp coordinates (x, y). For JStar: Fermi
/// coordinates (rho, t) passed as (x = rho, y = t). For J: x is r.
struct BumpPoint {
  int cusp = 0;
  double x = 0.0;
  double y = 0.0;
};

struct BumpValue {
  double value = 0.0;
  double dx = 0.0;  ///< partial derivative in the first chart coordinate
  double dy = 0.0;
};

struct BumpFamily {
  double L1 = 1.0;
  double L2 = 1.0;
  double kappa = collar_kappa();
  double omega = 1.0;

  /// J_i(z) = J(y / L_i) in cusp i, J0 = sqrt(1 - J1^2 - J2^2),
  /// J*(rho, t) = J(2 |rho| / kappa).
  BumpValue eval(Bump which, const BumpPoint& p) const;
};

/// Smooth test function with analytic first derivatives in a 2D chart.
struct TestFunction {
  std::function<double(double, double)> f;
  std::function<double(double, double)> fx;
  std::function<double(double, double)> fy;
};

enum class ImsChart { Cusp, Fermi };

struct ImsResult {
  std::vector<double> residuals;  ///< relative to int |grad f|^2 (absolute when that is 0)
  double max_residual = 0.0;
};

/// Quadratic-form IMS residual int |grad f|^2 - sum int |grad(J_i f)|^2 +
/// int (sum |grad J_i|^2) f^2 in the hyperbolic metric. Cusp chart: strip
/// 0 <= x <= L1, y in [y_lo, y_hi], family {J0, J1}. Fermi chart: rho in
/// [y_lo, y_hi] (as a range), t in [0, 1], family {J*, sqrt(1 - J*^2)}.
/// Composite 20-point Gauss-Legendre with `panels` panels per axis; the
/// residual is identically zero, which defeats relative-error adaptivity.
ImsResult ims_identity_check(const BumpFamily& fam, ImsChart chart, const std::vector<TestFunction>& fns,
                             double lo, double hi, int panels = 16);

/// ||frakJ||_1 over both cusp strips by 2D quadrature of the hyperbolic
/// density; `constant_profile` replaces J by a constant (zero gradient).
double frakJ_l1(double L1, double L2, bool constant_profile = false);
/// 2 (pi^2 / 4) int_0^1 psi'(u)^2 du, the exact value (independent of L).
double frakJ_l1_exact();

/// (2 Omega + log 4 L1 + log 4 L2) * 2 sinh kappa.
double tube_area(double omega, double L1, double L2);
/// The same area by 2D quadrature of cosh(rho) drho dt.
double tube_area_quadrature(double omega, double L1, double L2);

}  // namespace hypcover
