#pragma once

// Symmetric tridiagonal helpers for the Lanczos drivers. alpha holds the
// diagonal (size k) and beta the off-diagonal (size k - 1, beta[j] couples j
// and j + 1).

#include <vector>

namespace hypcover::detail {

/// Number of eigenvalues strictly below x (Sturm sequence).
int sturm_count(const std::vector<double>& alpha, const std::vector<double>& beta, double x);

/// j-th smallest eigenvalue (0-based) by bisection to near machine precision.
double tridiag_eigenvalue(const std::vector<double>& alpha, const std::vector<double>& beta, int j);

/// Unit eigenvector for eigenvalue theta by inverse iteration with partial
/// pivoting.
std::vector<double> tridiag_eigenvector(const std::vector<double>& alpha, const std::vector<double>& beta,
                                        double theta);

}  // namespace hypcover::detail
