#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hypcover/error.hpp"
#include "hypcover/kernels.hpp"
#include "hypcover/rng.hpp"

using namespace hypcover;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// int_H k dmu in geodesic polar coordinates, independent of the Abel chain.
double area_integral(const KernelProfile& k) {
  return 2.0 * kPi *
         boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
             [&](double r) { return k(r) * std::sinh(r); }, 0.0, k.support, 12, 1e-12);
}

TestFunction gaussian(double x0, double y0, double s, double amp) {
  TestFunction f;
  f.f = [=](double x, double y) { return amp * std::exp(-((x - x0) * (x - x0) + (y - y0) * (y - y0)) / (s * s)); };
  f.fx = [=](double x, double y) { return -2.0 * (x - x0) / (s * s) * f.f(x, y); };
  f.fy = [=](double x, double y) { return -2.0 * (y - y0) / (s * s) * f.f(x, y); };
  return f;
}

TestFunction trig(double p, double q, double c) {
  TestFunction f;
  f.f = [=](double x, double y) { return std::sin(p * x + c) * std::cos(q * y); };
  f.fx = [=](double x, double y) { return p * std::cos(p * x + c) * std::cos(q * y); };
  f.fy = [=](double x, double y) { return -q * std::sin(p * x + c) * std::sin(q * y); };
  return f;
}

std::vector<TestFunction> random_functions(std::uint64_t seed, double a0, double a1, double b0, double b1) {
  Rng rng(seed);
  auto u = [&](double lo, double hi) { return lo + (hi - lo) * 0.5 * (rng.symmetric() + 1.0); };
  std::vector<TestFunction> out;
  for (int k = 0; k < 3; ++k) out.push_back(gaussian(u(a0, a1), u(b0, b1), u(0.3, 1.0) * (b1 - b0), u(0.5, 2.0)));
  for (int k = 0; k < 2; ++k) out.push_back(trig(u(0.5, 4.0), u(0.5, 4.0), u(0.0, 3.0)));
  return out;
}

}  // namespace

TEST_CASE("Selberg transform of k_t at lambda = 0") {
  for (double t : {3.0, 4.0, 5.0}) {
    const auto kt = KernelProfile::kt(t);
    const double want = 2.0 * kPi * (std::cosh(t) - 1.0) / std::sqrt(std::cosh(t));
    CHECK(rel(selberg_h(kt, 0.5, true), want) <= 1e-6);
    CHECK(rel(kt_h_at_zero(t), area_integral(kt)) <= 1e-10);
  }
  CHECK(selberg_transform(KernelProfile::zero(3.0), {0.0, 0.2, 0.5}) == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("generic kernel goes through the Abel chain") {
  // k = cosh T - cosh rho has int_H k = pi (cosh T - 1)^2.
  const double T = 2.5;
  KernelProfile k{[T](double r) { return std::cosh(T) - std::cosh(r); }, T, std::nullopt, {}};
  const double want = kPi * (std::cosh(T) - 1.0) * (std::cosh(T) - 1.0);
  CHECK(rel(selberg_h(k, 0.5, true), want) <= 1e-8);
  // Real and imaginary arguments agree at r = 0.
  CHECK(selberg_h(k, 0.0, true) == doctest::Approx(selberg_h(k, 0.0, false)).epsilon(1e-12));
}

TEST_CASE("self-convolution") {
  const double t = 3.0;
  const auto kt = KernelProfile::kt(t);
  const auto K = kernel_selfconv(kt);
  CHECK(K.support == 2.0 * t);
  CHECK(rel(K(0.0), 2.0 * kPi * (std::cosh(t) - 1.0) / std::cosh(t)) <= 1e-12);
  CHECK(rel(kt_selfconv_at_zero(t), K(0.0)) <= 1e-12);
  CHECK(K(6.01) == 0.0);
  CHECK(K(100.0) == 0.0);
  double A = 0.0;
  for (int j = 0; j <= 120; ++j) {
    const double rho = 6.0 * j / 120.0;
    CHECK(K(rho) >= 0.0);
    A = std::max(A, K(rho));
  }
  CHECK(A == doctest::Approx(K(0.0)));
  // Indicator closed form against the generic polar-coordinate quadrature.
  for (double rho : {0.0, 0.4, 1.0, 2.99, 3.0, 3.5, 5.0, 5.9}) {
    CHECK(std::abs(kernel_selfconv_2d(kt, rho) - K(rho)) <= 1e-8 * K(0.0));
  }
  // Mass of a convolution is the product of masses.
  CHECK(rel(area_integral(K), kt_h_at_zero(t) * kt_h_at_zero(t)) <= 1e-8);
}

TEST_CASE("Selberg transform is multiplicative on convolutions") {
  const auto kt = KernelProfile::kt(3.0);
  const auto K = kernel_selfconv(kt);
  for (double lam : {0.0, 0.06, 0.12, 0.18, 0.24}) {
    const double s = std::sqrt(0.25 - lam);
    const double h = selberg_h(kt, s, true);
    CHECK(rel(selberg_h(K, s, true), h * h) <= 1e-6);
  }
  // Tempered side: H(r) = h(r)^2 >= 0.
  for (double r : {0.5, 1.3, 2.0}) {
    const double h = selberg_h(kt, r, false);
    const double H = selberg_h(K, r, false);
    CHECK(H >= -1e-8);
    CHECK(std::abs(H - h * h) <= 1e-6 * std::max(1.0, h * h));
  }
}

TEST_CASE("lower bound ratio") {
  const auto rep = lower_bound_ratio({3.0, 4.0, 6.0, 8.0, 10.0}, {0.0, 0.08, 0.16, 0.24});
  CHECK(rep.min_ratio > 0.0);
  CHECK(rep.table.size() == 5);
  CHECK(rel(rep.table[0][0], kt_h_at_zero(3.0) / std::sinh(1.5)) <= 1e-6);
  // Doubling t keeps the ratio in a bounded band.
  for (std::size_t l = 0; l < 4; ++l) {
    const double q1 = rep.table[0][l] / rep.table[2][l];
    const double q2 = rep.table[1][l] / rep.table[3][l];
    CHECK(q1 > 0.5);
    CHECK(q1 < 2.0);
    CHECK(q2 > 0.5);
    CHECK(q2 < 2.0);
  }
  CHECK_THROWS_AS(lower_bound_ratio({2.0}, {0.0}), Error);
  CHECK_THROWS_AS(lower_bound_ratio({3.0}, {0.25}), Error);
}

TEST_CASE("smooth step and J") {
  CHECK(bump_J(2.0) == 0.0);
  CHECK(bump_J(3.0) == 1.0);
  CHECK(bump_J(-5.0) == 0.0);
  CHECK(bump_J(9.0) == 1.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  for (int j = 0; j <= 200; ++j) {
    const double r = 1.5 + 2.0 * j / 200.0;
    const double J = bump_J(r);
    const double C = bump_J_complement(r);
    CHECK(std::abs(J * J + C * C - 1.0) <= 1e-15);
    const double eps = 1e-6;
    CHECK(bump_J_derivative(r) == doctest::Approx((bump_J(r + eps) - bump_J(r - eps)) / (2 * eps)).epsilon(1e-6));
    CHECK(bump_J_complement_derivative(r) ==
          doctest::Approx((bump_J_complement(r + eps) - bump_J_complement(r - eps)) / (2 * eps)).epsilon(1e-6));
  }
}

TEST_CASE("partition of unity") {
  const BumpFamily fam{3.0, 17.0};
  double worst = 0.0;
  for (int c = 1; c <= 2; ++c) {
    const double L = c == 1 ? fam.L1 : fam.L2;
    for (int i = 0; i < 100; ++i) {
      for (int j = 0; j < 50; ++j) {
        const BumpPoint p{c, L * i / 100.0, L * (1.0 + 3.0 * j / 49.0)};
        double s = 0.0;
        for (Bump b : {Bump::J0, Bump::J1, Bump::J2}) s += std::pow(fam.eval(b, p).value, 2);
        worst = std::max(worst, std::abs(s - 1.0));
      }
    }
  }
  CHECK(worst <= 1e-12);
  CHECK(fam.eval(Bump::J0, {0, 0.3, 0.7}).value == 1.0);
  CHECK(fam.eval(Bump::J1, {2, 0.3, 100.0}).value == 0.0);
}

TEST_CASE("tube bump scaling") {
  const BumpFamily fam;
  const double k = fam.kappa;
  // asinh written out as a logarithm: kappa = 0.0623387...
  CHECK(std::abs(k - 0.5 * std::log(0.125 + std::sqrt(1.0 + 1.0 / 64.0))) <= 1e-15);
  for (double rho : {0.0, 0.3 * k, -0.99 * k, k}) CHECK(fam.eval(Bump::JStar, {0, rho, 0.2}).value == 0.0);
  for (double rho : {1.5 * k, -1.5 * k, 4.0 * k}) CHECK(fam.eval(Bump::JStar, {0, rho, 0.2}).value == 1.0);
  const double mid = fam.eval(Bump::JStar, {0, 1.25 * k, 0.0}).value;
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
}

TEST_CASE("IMS identity") {
  const BumpFamily fam{2.0, 2.0};
  const auto zero = TestFunction{[](double, double) { return 0.0; }, [](double, double) { return 0.0; },
                                 [](double, double) { return 0.0; }};
  CHECK(ims_identity_check(fam, ImsChart::Cusp, {zero}, 3.0, 7.0).max_residual == 0.0);
  const auto cusp = random_functions(5, 0.0, 2.0, 3.0, 7.0);
  const auto r1 = ims_identity_check(fam, ImsChart::Cusp, cusp, 3.0, 7.0);
  CHECK(r1.residuals.size() == 5);
  CHECK(r1.max_residual <= 1e-6);
  // Two resolutions agree.
  const auto g = gaussian(1.0, 5.0, 0.8, 1.0);
  const double fine = ims_identity_check(fam, ImsChart::Cusp, {g}, 3.0, 7.0, 32).max_residual;
  const double coarse = ims_identity_check(fam, ImsChart::Cusp, {g}, 3.0, 7.0, 8).max_residual;
  CHECK(fine <= 1e-6);
  CHECK(coarse <= 1e-6);
  const auto fermi = random_functions(6, -0.15, 0.15, 0.0, 1.0);
  CHECK(ims_identity_check(fam, ImsChart::Fermi, fermi, -0.15, 0.15).max_residual <= 1e-6);
}

TEST_CASE("frakJ is bounded independently of L") {
  const double exact = frakJ_l1_exact();
  CHECK(exact > 0.0);
  double lo = 1e300;
  double hi = 0.0;
  for (double L = 1.0; L <= 256.0; L *= 2.0) {
    const double v = frakJ_l1(L, L);
    CHECK(rel(v, exact) <= 1e-8);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi <= 2.0 * lo);
  CHECK(frakJ_l1(1.0, 1.0, true) == 0.0);
  CHECK(rel(frakJ_l1(3.0, 200.0), exact) <= 1e-8);
  CHECK_THROWS_AS(frakJ_l1(0.5, 1.0), Error);
  // Support: gradients vanish outside 2L <= y <= 3L.
  const BumpFamily fam{5.0, 9.0};
  for (int c = 1; c <= 2; ++c) {
    const double L = c == 1 ? fam.L1 : fam.L2;
    for (double y : {0.5 * L, 1.9 * L, 2.0 * L, 3.0 * L, 3.1 * L, 10.0 * L}) {
      for (Bump b : {Bump::J0, Bump::J1, Bump::J2}) CHECK(std::abs(fam.eval(b, {c, 0.1, y}).dy) <= 1e-14);
    }
  }
}

TEST_CASE("tube area") {
  const double two_sinh = 2.0 * std::sinh(collar_kappa());
  // sinh(asinh(x) / 2) = sqrt((sqrt(1 + x^2) - 1) / 2); the value is 0.124757...
  CHECK(std::abs(two_sinh - 2.0 * std::sqrt((std::sqrt(1.0 + 1.0 / 64.0) - 1.0) / 2.0)) <= 1e-15);
  CHECK(std::abs(two_sinh - 0.124757) <= 1e-6);
  CHECK(rel(tube_area(1.0, 1.0, 1.0), (2.0 + 2.0 * std::log(4.0)) * two_sinh) <= 1e-15);
  for (double om : {0.5, 1.0, 7.0}) {
    for (double L : {1.0, 3.0, 64.0}) CHECK(rel(tube_area_quadrature(om, L, 2.0 * L), tube_area(om, L, 2.0 * L)) <= 1e-8);
  }
  CHECK_THROWS_AS(tube_area(0.0, 1.0, 1.0), Error);
}

TEST_CASE("pre-trace sums") {
  const auto p1 = make_pair({0}, {0});
  const auto g1 = SchreierGraph::from(p1);
  const auto b1 = spanning_basis(g1);
  const auto K = kernel_selfconv(KernelProfile::kt(1.5));
  const HPoint z{0.3, 1.4};
  const auto triv = pretrace_rhs(z, p1, b1, CoverCharacter::constant(b1, 1), K, 0);
  CHECK(triv.value >= K(0.0));
  CHECK(K(0.0) > 0.0);
  const auto shifted = pretrace_rhs({2.3, 1.4}, p1, b1, CoverCharacter::constant(b1, 1), K, 0);
  CHECK(shifted.value == doctest::Approx(triv.value).epsilon(1e-10));

  // Signs follow the exponent sums for a restricted base character on any cover.
  const auto p = sample_hom(5, 3);
  REQUIRE(is_connected(p));
  const auto g = SchreierGraph::from(p);
  const auto b = spanning_basis(g);
  const BaseCharacter theta{-1, 1};
  const auto chi = restrict(theta, b);
  for (int fiber : {0, 3}) {
    const auto r = pretrace_rhs(z, p, b, chi, K, fiber);
    REQUIRE_FALSE(r.terms.empty());
    for (const auto& t : r.terms) {
      CHECK(p.act(fiber, t.word) == fiber);
      int ea = 0;
      for (Letter l : t.word.letters()) ea += is_a(l) ? 1 : 0;
      CHECK(t.sign == (ea % 2 == 0 ? 1 : -1));
    }
  }
}

TEST_CASE("pre-trace deep in the cusp") {
  // y(z) = e^{2t} L with L = 1: Im z = 2 e^{2t}.
  const double t = 1.0;
  const auto p1 = make_pair({0}, {0});
  const auto g1 = SchreierGraph::from(p1);
  const auto b1 = spanning_basis(g1);
  const auto K = kernel_selfconv(KernelProfile::kt(t));
  const double y = std::exp(2.0 * t);
  const auto r = pretrace_rhs({0.1, 2.0 * y}, p1, b1, CoverCharacter::constant(b1, 1), K, 0);
  const double bound = 2.0 * y * std::exp(2.0 * t);
  CHECK(r.terms.size() > 1);
  for (const auto& term : r.terms) {
    const auto& m = term.word.letters();
    bool power_of_a = true;
    for (Letter l : m) power_of_a = power_of_a && is_a(l);
    CHECK(power_of_a);
    CHECK(static_cast<double>(m.size()) <= bound);
  }
}
