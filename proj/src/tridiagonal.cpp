#include "tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hypcover::detail {

int sturm_count(const std::vector<double>& alpha, const std::vector<double>& beta, double x) {
  const double tiny = std::numeric_limits<double>::min();
  int count = 0;
  double d = 1.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    const double b2 = j == 0 ? 0.0 : beta[j - 1] * beta[j - 1];
    d = alpha[j] - x - (j == 0 ? 0.0 : b2 / d);
    if (d == 0.0) d = -tiny;
    if (d < 0.0) ++count;
  }
  return count;
}

double tridiag_eigenvalue(const std::vector<double>& alpha, const std::vector<double>& beta, int j) {
  // Gershgorin interval.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const std::size_t k = alpha.size();
  for (std::size_t i = 0; i < k; ++i) {
    const double r = (i > 0 ? std::abs(beta[i - 1]) : 0.0) + (i + 1 < k ? std::abs(beta[i]) : 0.0);
    lo = std::min(lo, alpha[i] - r);
    hi = std::max(hi, alpha[i] + r);
  }
  const double scale = std::max(std::abs(lo), std::abs(hi));
  lo -= 1e-12 * scale + 1e-300;
  hi += 1e-12 * scale + 1e-300;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(alpha, beta, mid) > j) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> tridiag_eigenvector(const std::vector<double>& alpha, const std::vector<double>& beta,
                                        double theta) {
  const std::size_t k = alpha.size();
  if (k == 1) return {1.0};
  double scale = 0.0;
  for (std::size_t i = 0; i < k; ++i) scale = std::max(scale, std::abs(alpha[i]));
  for (double b : beta) scale = std::max(scale, std::abs(b));
  const double eps = std::numeric_limits<double>::epsilon() * std::max(scale, 1.0);
  // LU with partial pivoting of T - theta I: rows keep diag d, super du, and
  // a second superdiagonal du2 created by row swaps.
  std::vector<double> d(k);
  std::vector<double> du(k, 0.0);
  std::vector<double> du2(k, 0.0);
  std::vector<double> dl(k, 0.0);
  std::vector<char> swapped(k, 0);
  for (std::size_t i = 0; i < k; ++i) d[i] = alpha[i] - theta;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    du[i] = beta[i];
    dl[i] = beta[i];
  }
  std::vector<double> mult(k, 0.0);
  for (std::size_t i = 0; i + 1 < k; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) d[i] = eps;
      const double m = dl[i] / d[i];
      mult[i] = m;
      d[i + 1] -= m * du[i];
      du2[i] = 0.0;
    } else {
      // Swap rows i and i + 1.
      swapped[i] = 1;
      const double m = d[i] / dl[i];
      mult[i] = m;
      d[i] = dl[i];
      const double t = d[i + 1];
      d[i + 1] = du[i] - m * t;
      du2[i] = i + 2 < k ? du[i + 1] : 0.0;
      if (i + 2 < k) du[i + 1] = -m * du2[i];
      du[i] = t;
    }
  }
  if (d[k - 1] == 0.0) d[k - 1] = eps;
  for (std::size_t i = 0; i < k; ++i) {
    if (std::abs(d[i]) < eps) d[i] = d[i] < 0.0 ? -eps : eps;
  }
  std::vector<double> x(k, 1.0);
  for (int pass = 0; pass < 3; ++pass) {
    // Forward: apply the row operations.
    for (std::size_t i = 0; i + 1 < k; ++i) {
      if (swapped[i]) {
        const double t = x[i];
        x[i] = x[i + 1];
        x[i + 1] = t - mult[i] * x[i];
      } else {
        x[i + 1] -= mult[i] * x[i];
      }
    }
    // Back substitution with U (d, du, du2).
    for (std::size_t ii = k; ii-- > 0;) {
      double s = x[ii];
      if (ii + 1 < k) s -= du[ii] * x[ii + 1];
      if (ii + 2 < k) s -= du2[ii] * x[ii + 2];
      x[ii] = s / d[ii];
    }
    double norm = 0.0;
    for (double v : x) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : x) v /= norm;
  }
  return x;
}

}  // namespace hypcover::detail
