#include "hypcover/kernels.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "hypcover/error.hpp"

namespace hypcover {

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
double gk(F f, double a, double b, double tol = 1e-12, unsigned depth = 15) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, depth, tol, &err);
  if (!std::isfinite(v)) fail(ErrorKind::Numeric, "quadrature produced a non-finite value");
  return v;
}

// Endpoint-singular integrands.
template <class F>
double ts(F f, double a, double b, double tol = 1e-12) {
  if (!(b > a)) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  double err = 0.0;
  double l1 = 0.0;
  const double v = integrator.integrate(f, a, b, tol, &err, &l1);
  if (!std::isfinite(v)) fail(ErrorKind::Numeric, "quadrature produced a non-finite value");
  if (err > 1e-6 * std::max(1.0, l1)) fail(ErrorKind::Numeric, "quadrature error estimate too large");
  return v;
}

// Angular measure of {phi : d(u, w) <= T} for u at distance r from z and
// d(z, w) = rho.
double arc_measure(double r, double rho, double T) {
  const double c = (std::cosh(r) * std::cosh(rho) - std::cosh(T)) / (std::sinh(r) * std::sinh(rho));
  return 2.0 * std::acos(std::clamp(c, -1.0, 1.0));
}

double indicator_selfconv(double height, double T, double rho) {
  if (rho > 2.0 * T) return 0.0;
  const double h2 = height * height;
  if (rho == 0.0) return h2 * 2.0 * kPi * (std::cosh(T) - 1.0);
  double full = 0.0;
  double lo = rho - T;
  if (rho < T) {
    full = 2.0 * kPi * (std::cosh(T - rho) - 1.0);
    lo = T - rho;
  }
  const double partial = ts([&](double r) { return arc_measure(r, rho, T) * std::sinh(r); }, lo, T, 1e-11);
  return h2 * (full + partial);
}

template <class F>
double composite_gl(F f, double a, double b, int panels) {
  using Gl = boost::math::quadrature::gauss<double, 20>;
  const double w = (b - a) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) total += Gl::integrate(f, a + k * w, a + (k + 1) * w);
  return total;
}

double e_minus_inv(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

}  // namespace

KernelProfile KernelProfile::kt(double t) {
  if (!(t > 0.0)) fail(ErrorKind::Precondition, "t must be positive");
  const double h = 1.0 / std::sqrt(std::cosh(t));
  return {[h](double) { return h; }, t, h, {}};
}

KernelProfile KernelProfile::zero(double support) { return {[](double) { return 0.0; }, support, 0.0, {}}; }

double selberg_g(const KernelProfile& k, double s) {
  const double T = k.support;
  s = std::abs(s);
  if (s >= T) return 0.0;
  const double cs = std::cosh(s);
  const double V = std::sqrt(std::cosh(T) - cs);
  if (k.indicator_height) return 2.0 * std::numbers::sqrt2 * *k.indicator_height * V;
  auto f = [&](double v) { return k(std::acosh(cs + v * v)); };
  using Gl = boost::math::quadrature::gauss<double, 30>;
  double total = 0.0;
  double a = 0.0;
  for (double bp : k.breakpoints) {
    if (bp <= s || bp >= T) continue;
    const double vb = std::sqrt(std::cosh(bp) - cs);
    total += Gl::integrate(f, a, vb);
    a = vb;
  }
  return 2.0 * std::numbers::sqrt2 * (total + Gl::integrate(f, a, V));
}

double selberg_h(const KernelProfile& k, double r, bool imaginary) {
  auto f = [&](double s) {
    const double w = imaginary ? std::cosh(r * s) : std::cos(r * s);
    return w * selberg_g(k, s);
  };
  // g is itself a quadrature, so the outer rule is fixed rather than
  // adaptive: adaptivity would chase the inner rounding noise.
  using Gl = boost::math::quadrature::gauss<double, 64>;
  double total = 0.0;
  double a = 0.0;
  for (double bp : k.breakpoints) {
    if (bp <= a || bp >= k.support) continue;
    total += Gl::integrate(f, a, bp);
    a = bp;
  }
  // g has a square-root edge at the support; s = T - u^2 removes it.
  const double T = k.support;
  const double U = std::sqrt(T - a);
  total += Gl::integrate([&](double u) { return 2.0 * u * f(T - u * u); }, 0.0, U);
  return 2.0 * total;
}

std::vector<double> selberg_transform(const KernelProfile& k, const std::vector<double>& s_grid) {
  std::vector<double> out;
  out.reserve(s_grid.size());
  for (double s : s_grid) out.push_back(selberg_h(k, s, true));
  return out;
}

double kt_h_at_zero(double t) { return 2.0 * kPi * (std::cosh(t) - 1.0) / std::sqrt(std::cosh(t)); }

double kt_selfconv_at_zero(double t) { return 2.0 * kPi * (std::cosh(t) - 1.0) / std::cosh(t); }

KernelProfile kernel_selfconv(const KernelProfile& k) {
  const double T = k.support;
  KernelProfile out;
  out.support = 2.0 * T;
  out.breakpoints = {T};
  if (k.indicator_height) {
    const double h = *k.indicator_height;
    out.k = [h, T](double rho) { return indicator_selfconv(h, T, rho); };
  } else {
    out.k = [k](double rho) { return kernel_selfconv_2d(k, rho); };
  }
  return out;
}

double kernel_selfconv_2d(const KernelProfile& k, double rho) {
  const double T = k.support;
  if (rho > 2.0 * T) return 0.0;
  const double chr = std::cosh(rho);
  const double shr = std::sinh(rho);
  const double chT = std::cosh(T);
  auto radial = [&](double r) {
    const double ch = std::cosh(r);
    const double sh = std::sinh(r);
    // The second factor vanishes for phi beyond the angle where the distance
    // reaches T; integrate only up to that edge.
    double edge = kPi;
    if (sh * shr > 0.0) {
      const double c = (ch * chr - chT) / (sh * shr);
      if (c >= 1.0) return 0.0;
      if (c > -1.0) edge = std::acos(c);
    } else if (ch * chr > chT) {
      return 0.0;
    }
    auto angular = [&](double phi) {
      const double c = std::max(1.0, ch * chr - sh * shr * std::cos(phi));
      return k(std::min(T, std::acosh(c)));
    };
    return k(r) * sh * 2.0 * gk(angular, 0.0, edge, 1e-11, 10);
  };
  // The angular range saturates at pi below |T - rho|.
  const double kink = std::abs(T - rho);
  if (kink > 0.0 && kink < T) return gk(radial, 0.0, kink, 1e-10, 12) + gk(radial, kink, T, 1e-10, 12);
  return gk(radial, 0.0, T, 1e-10, 12);
}

RatioReport lower_bound_ratio(const std::vector<double>& t_grid, const std::vector<double>& lambda_grid) {
  RatioReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    if (t < 3.0) fail(ErrorKind::Precondition, "lower_bound_ratio needs t >= 3");
    const auto kt = KernelProfile::kt(t);
    std::vector<double> row;
    for (double lam : lambda_grid) {
      if (!(lam < 0.25) || lam < 0.0) fail(ErrorKind::Precondition, "lambda must lie in [0, 1/4)");
      const double s = std::sqrt(0.25 - lam);
      const double ratio = selberg_h(kt, s, true) / std::sinh(t * s);
      row.push_back(ratio);
      if (ratio < rep.min_ratio) {
        rep.min_ratio = ratio;
        rep.arg_t = t;
        rep.arg_lambda = lam;
      }
    }
    rep.table.push_back(row);
  }
  return rep;
}

PretraceRhs pretrace_rhs(const HPoint& z, const PermutationPair& p, const SpanningBasis& basis,
                         const CoverCharacter& chi, const KernelProfile& K, int fiber, const LatticeOptions& opts) {
  if (!is_connected(p)) fail(ErrorKind::Precondition, "pre-trace sum needs a connected cover");
  if (fiber < 0 || fiber >= p.n) fail(ErrorKind::InvalidSize, "fiber index out of range");
  if (!(K.support > 0.0) || K.support > 12.0) fail(ErrorKind::Precondition, "kernel support must lie in (0, 12]");
  // (g z0, i) ~ (z0, i.g): move the centre into F and follow the fiber.
  const auto red = reduce_to_domain(z);
  fiber = p.act(fiber, red.word.inverse());
  PretraceRhs out;
  out.centre = red.point;
  out.fiber = fiber;
  double comp = 0.0;  // Kahan compensation
  for (const auto& el : lattice_ball(red.point, K.support, opts)) {
    if (p.act(fiber, el.word) != fiber) continue;
    PretraceTerm t;
    t.word = el.word;
    t.distance = el.distance;
    t.sign = holonomy(p, basis, chi, fiber, el.word);
    t.value = t.sign * K(el.distance);
    const double y = t.value - comp;
    const double s = out.value + y;
    comp = (s - out.value) - y;
    out.value = s;
    out.terms.push_back(std::move(t));
  }
  return out;
}

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = e_minus_inv(x);
  const double b = e_minus_inv(1.0 - x);
  return a / (a + b);
}

double smooth_step_derivative(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double a = e_minus_inv(x);
  const double b = e_minus_inv(1.0 - x);
  const double da = a / (x * x);
  const double db = -b / ((1.0 - x) * (1.0 - x));
  return (da * b - a * db) / ((a + b) * (a + b));
}

double bump_J(double r) { return std::sin(0.5 * kPi * smooth_step(r - 2.0)); }

double bump_J_derivative(double r) {
  return std::cos(0.5 * kPi * smooth_step(r - 2.0)) * 0.5 * kPi * smooth_step_derivative(r - 2.0);
}

double bump_J_complement(double r) { return std::cos(0.5 * kPi * smooth_step(r - 2.0)); }

double bump_J_complement_derivative(double r) {
  return -std::sin(0.5 * kPi * smooth_step(r - 2.0)) * 0.5 * kPi * smooth_step_derivative(r - 2.0);
}

double collar_kappa() { return 0.5 * std::asinh(1.0 / 8.0); }

BumpValue BumpFamily::eval(Bump which, const BumpPoint& p) const {
  BumpValue v;
  auto cusp_scale = [&](int c) { return c == 1 ? L1 : L2; };
  switch (which) {
    case Bump::J:
      v.value = bump_J(p.x);
      v.dx = bump_J_derivative(p.x);
      break;
    case Bump::J1:
    case Bump::J2: {
      const int want = which == Bump::J1 ? 1 : 2;
      if (p.cusp == want) {
        const double L = cusp_scale(want);
        v.value = bump_J(p.y / L);
        v.dy = bump_J_derivative(p.y / L) / L;
      }
      break;
    }
    case Bump::J0:
      if (p.cusp == 1 || p.cusp == 2) {
        const double L = cusp_scale(p.cusp);
        v.value = bump_J_complement(p.y / L);
        v.dy = bump_J_complement_derivative(p.y / L) / L;
      } else {
        v.value = 1.0;
      }
      break;
    case Bump::JStar: {
      const double u = 2.0 * std::abs(p.x) / kappa;
      v.value = bump_J(u);
      v.dx = bump_J_derivative(u) * 2.0 / kappa * (p.x < 0.0 ? -1.0 : 1.0);
      break;
    }
  }
  return v;
}

ImsResult ims_identity_check(const BumpFamily& fam, ImsChart chart, const std::vector<TestFunction>& fns, double lo,
                             double hi, int panels) {
  if (panels < 1) fail(ErrorKind::InvalidConfig, "need at least one panel");
  if (!(hi > lo)) fail(ErrorKind::InvalidConfig, "empty chart range");
  ImsResult res;
  for (const auto& fn : fns) {
    // Integrands combine the metric weight with the area form:
    // cusp chart (x, y): |grad u|^2 dmu = (u_x^2 + u_y^2) dx dy;
    // Fermi chart (rho, t): (u_rho^2 + u_t^2 / cosh^2 rho) cosh rho drho dt.
    auto grad2 = [&](double a, double b, double ux, double uy) {
      if (chart == ImsChart::Cusp) return ux * ux + uy * uy;
      const double c = std::cosh(a);
      (void)b;
      return (ux * ux + uy * uy / (c * c)) * c;
    };
    auto family = [&](double a, double b) {
      std::array<BumpValue, 2> J{};
      if (chart == ImsChart::Cusp) {
        const BumpPoint p{1, a, b};
        J[0] = fam.eval(Bump::J0, p);
        J[1] = fam.eval(Bump::J1, p);
      } else {
        const BumpPoint p{0, a, b};
        const BumpValue s = fam.eval(Bump::JStar, p);
        const double u = 2.0 * std::abs(a) / fam.kappa;
        J[0] = s;
        J[1].value = bump_J_complement(u);
        J[1].dx = bump_J_complement_derivative(u) * 2.0 / fam.kappa * (a < 0.0 ? -1.0 : 1.0);
      }
      return J;
    };
    // The residual density, evaluated term by term as the identity states it.
    auto residual_density = [&](double a, double b) {
      const double f = fn.f(a, b);
      const double fa = fn.fx(a, b);
      const double fb = fn.fy(a, b);
      double r = grad2(a, b, fa, fb);
      const auto J = family(a, b);
      for (const auto& j : J) {
        const double ga = j.value * fa + f * j.dx;
        const double gb = j.value * fb + f * j.dy;
        r -= grad2(a, b, ga, gb);
        r += grad2(a, b, j.dx, j.dy) * f * f;
      }
      return r;
    };
    auto energy_density = [&](double a, double b) { return grad2(a, b, fn.fx(a, b), fn.fy(a, b)); };
    double a0 = 0.0;
    double a1 = fam.L1;
    double b0 = lo;
    double b1 = hi;
    if (chart == ImsChart::Fermi) {
      a0 = lo;
      a1 = hi;
      b0 = 0.0;
      b1 = 1.0;
    }
    auto integrate2 = [&](auto density) {
      return composite_gl([&](double b) { return composite_gl([&](double a) { return density(a, b); }, a0, a1, panels); },
                          b0, b1, panels);
    };
    const double resid = integrate2(residual_density);
    const double energy = integrate2(energy_density);
    res.residuals.push_back(energy > 0.0 ? std::abs(resid) / energy : std::abs(resid));
    res.max_residual = std::max(res.max_residual, res.residuals.back());
  }
  return res;
}

double frakJ_l1(double L1, double L2, bool constant_profile) {
  if (L1 < 1.0 || L2 < 1.0) fail(ErrorKind::Precondition, "cusp lengths must be >= 1");
  const BumpFamily fam{L1, L2};
  double total = 0.0;
  for (int c = 1; c <= 2; ++c) {
    const double L = c == 1 ? L1 : L2;
    // frakJ dmu = y^2 (dJ0^2 + dJ1^2 + dJ2^2) dx dy / y^2 on the strip.
    auto density = [&](double x, double y) {
      if (constant_profile) return 0.0;
      const BumpPoint p{c, x, y};
      const double d0 = fam.eval(Bump::J0, p).dy;
      const double d1 = fam.eval(Bump::J1, p).dy;
      const double d2 = fam.eval(Bump::J2, p).dy;
      const double y2 = y * y;
      return y2 * (d0 * d0 + d1 * d1 + d2 * d2) / y2;
    };
    total += gk([&](double y) { return gk([&](double x) { return density(x, y); }, 0.0, L, 1e-12, 8); }, 2.0 * L,
                3.0 * L, 1e-12, 15);
  }
  return total;
}

double frakJ_l1_exact() {
  const double I = gk([](double u) {
    const double d = smooth_step_derivative(u);
    return d * d;
  }, 0.0, 1.0, 1e-14, 20);
  return 2.0 * (kPi * kPi / 4.0) * I;
}

double tube_area(double omega, double L1, double L2) {
  if (!(omega > 0.0) || L1 < 1.0 || L2 < 1.0) fail(ErrorKind::Precondition, "tube_area needs omega > 0, L >= 1");
  return (2.0 * omega + std::log(4.0 * L1) + std::log(4.0 * L2)) * 2.0 * std::sinh(collar_kappa());
}

double tube_area_quadrature(double omega, double L1, double L2) {
  if (!(omega > 0.0) || L1 < 1.0 || L2 < 1.0) fail(ErrorKind::Precondition, "tube_area needs omega > 0, L >= 1");
  const double T = 2.0 * omega + std::log(4.0 * L1) + std::log(4.0 * L2);
  const double kappa = collar_kappa();
  return gk([&](double) { return gk([](double rho) { return std::cosh(rho); }, -kappa, kappa, 1e-14); }, 0.0, T,
            1e-14);
}

}  // namespace hypcover
