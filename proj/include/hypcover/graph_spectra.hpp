#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/SparseCore>

#include "hypcover/characters.hpp"
#include "hypcover/covers.hpp"

namespace hypcover {

/// Signed adjacency A_xi of the Schreier graph; the Laplacian is 4I - A_xi.
struct SignedOperator {
  int n = 0;
  Eigen::SparseMatrix<double> adjacency;  ///< symmetric, loops contribute 2 * sign
  bool trivial_character = false;
  bool connected = true;

  Eigen::SparseMatrix<double> laplacian() const;
};

/// Tree edges carry +1, non-tree edge e carries chi(e).
SignedOperator assemble_signed(const SchreierGraph& g, const SpanningBasis& basis, const CoverCharacter& chi);
/// Arbitrary +-1 signs on all 2n Schreier edges (used for gauge checks).
SignedOperator assemble_from_edge_signs(const SchreierGraph& g, const std::vector<int>& signs);

struct LanczosOptions {
  double tol = 1e-9;              ///< residual bound |beta_{k+1} s_k| on the Ritz pair
  int max_iter = 0;               ///< 0 means 10 n
  std::uint64_t seed = 0;         ///< start vector seed
  int check_every = 10;
};

struct EigenEstimate {
  double value = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Smallest eigenvalue of L (after removing the constant vector when
/// `remove_zero`), by Lanczos on 9I - L without reorthogonalization. Throws
/// Numeric with the iteration count and final residual on non-convergence.
EigenEstimate lanczos_bottom(const SignedOperator& op, bool remove_zero, const LanczosOptions& opts = {});

/// Bass note of L: the bottom eigenvalue, with the multiplicity-one zero
/// removed when the character is trivial. Empty when nothing remains (n = 1
/// trivial). A trivial character on a disconnected graph is a Precondition error.
std::optional<double> lambda1(const SignedOperator& op, const LanczosOptions& opts = {});
/// Dense reference (Eigen SelfAdjointEigenSolver), same conventions.
std::optional<double> lambda1_dense(const SignedOperator& op);
/// Bottom of the spectrum of L without any removal.
double bottom_eigenvalue(const SignedOperator& op, const LanczosOptions& opts = {});

struct SeriesPoint {
  int step = 0;
  int flipped_edge = -1;  ///< basis coordinate flipped at this step; -1 at step 0
  double lambda1 = 0.0;
};

struct SpectralSeries {
  std::vector<SeriesPoint> points;
  double max_step = 0.0;
  /// lambda1 of the end character with the trivial-character convention.
  std::optional<double> endpoint_gap;
};

/// Records the bottom eigenvalue (no removal) along hamming_geodesic(start, end).
SpectralSeries continuity_walk(const SchreierGraph& g, const SpanningBasis& basis, const CoverCharacter& start,
                               const CoverCharacter& end, const LanczosOptions& opts = {});

/// Every y in [0, last value] lies within eta of some recorded value.
bool density_report(const SpectralSeries& s, double eta);

/// "step,flipped_edge,lambda1" then one row per point; step 0 writes "-".
void write_series_csv(std::ostream& os, const SpectralSeries& s);

}  // namespace hypcover
