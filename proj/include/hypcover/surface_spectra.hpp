#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hypcover/characters.hpp"
#include "hypcover/covers.hpp"
#include "hypcover/graph_spectra.hpp"
#include "hypcover/hyperbolic.hpp"

namespace hypcover {

/// Vertex boundary tags (bitmask). Left sides are the sources of the pairings:
/// a maps the line x = -1 onto x = 1 and b maps the semicircle |z + 1/2| = 1/2
/// onto |z - 1/2| = 1/2.
enum SideTag : std::uint8_t {
  kALeft = 1,
  kARight = 2,
  kBLeft = 4,
  kBRight = 8,
  kHorocycle = 16,
};

/// Triangulation of F truncated at chart height Y in each of its cusps.
/// F is the union of six isometric kites (two ideal triangles, each cut at
/// its centre); one kite is meshed in layers of hyperbolic thickness about h
/// and carried to the others, so paired sides agree node for node.
struct TileMesh {
  double h = 0.0;
  double Y = 0.0;
  std::vector<HPoint> vertices;
  std::vector<std::array<int, 3>> triangles;  ///< counter-clockwise
  std::vector<std::uint8_t> tags;
  /// For right-side vertices, the left-side vertex they are the image of
  /// (a or b applied to partner gives the vertex); -1 elsewhere.
  std::vector<int> partner;
  /// Lumped hyperbolic mass: sum over incident triangles of area / (3 y^2).
  std::vector<double> node_mass;
  double min_angle_deg = 0.0;  ///< Euclidean
  double pairing_error = 0.0;  ///< max |g(partner) - vertex|

  double area() const;
};

/// h in (0, 0.2], Y >= 4. Throws Mesh on a quality or pairing failure.
TileMesh build_tile_mesh(double h, double Y);

// Text snapshot, first line "hypcover-mesh v1", then "h <h> Y <Y>",
// "vertices <count>" with "x y tag partner" rows, "triangles <count>" with
// "i j k" rows. Doubles are written with 17 significant digits.
void write_mesh(std::ostream& os, const TileMesh& m);
TileMesh read_mesh(std::istream& is);

/// Twisted stiffness and mass on the degree-n cover. Node v of tile i holds
/// coef * x[dof] with (dof, coef) = lookup(i, v); right-side nodes of tile i
/// are slaved to their partners in tile i.g with the sign of the Schreier
/// edge (i -> i.g), which realises f_i(g w) = s(e) f_{i.g}(w).
struct TwistedPair {
  int n = 0;
  int nodes_per_tile = 0;
  int dofs_per_tile = 0;
  bool trivial_character = false;
  Eigen::SparseMatrix<double> S;
  Eigen::SparseMatrix<double> M;  ///< diagonal
  std::vector<int> node_dof;           ///< n * nodes_per_tile
  std::vector<std::int8_t> node_coef;  ///< +-1

  int size() const { return static_cast<int>(S.rows()); }
  std::pair<int, int> lookup(int tile, int node) const {
    const auto k = static_cast<std::size_t>(tile) * static_cast<std::size_t>(nodes_per_tile) +
                   static_cast<std::size_t>(node);
    return {node_dof[k], node_coef[k]};
  }
};

/// Requires a connected cover (NotConnected otherwise) and chi on `basis`.
/// Element work is split over `threads` tiles at a time; the assembled
/// matrices do not depend on the thread count.
TwistedPair assemble_twisted(const TileMesh& mesh, const PermutationPair& p, const SpanningBasis& basis,
                             const CoverCharacter& chi, int threads = 1);

struct FemSolverOptions {
  double shift = -0.05;  ///< sigma < 0; factorizes S - sigma M (supernodal Cholesky)
  double tol = 1e-9;     ///< relative residual target
  int max_steps = 200;   ///< subspace iterations
  std::uint64_t seed = 0;
};

struct LowestModes {
  std::vector<double> values;  ///< ascending
  Eigen::MatrixXd vectors;     ///< columns, M-orthonormal
  std::vector<double> residuals;
  int steps = 0;
};

/// k smallest eigenpairs of S v = lambda M v by shift-invert subspace
/// iteration with Rayleigh-Ritz (a block of k + max(8, k) vectors, so repeated
/// eigenvalues from symmetries of the surface are not lost). Residuals are
/// |S v - lambda M v| / |M v|; Numeric error when they miss 1e-7.
LowestModes solve_lowest(const TwistedPair& tp, int k, const FemSolverOptions& opts = {});
/// Dense generalized solver, for small problems and cross-checks.
std::vector<double> solve_dense(const TwistedPair& tp, int k);

double rayleigh(const TwistedPair& tp, const Eigen::VectorXd& v);

/// Value of the discrete function at z in tile i (z inside the mesh).
double evaluate(const TileMesh& mesh, const TwistedPair& tp, const Eigen::VectorXd& v, int tile, const HPoint& z);

/// One-flip walk as in graph_spectra with the FEM bottom eigenvalue at every
/// step. Requires a connected cover certified GTF at gtf_radius(n).
SpectralSeries fem_continuity_walk(const TileMesh& mesh, const PermutationPair& p, const SpanningBasis& basis,
                                   const CoverCharacter& start, const CoverCharacter& end,
                                   const FemSolverOptions& opts = {}, int threads = 1);

/// CSV with header "index,lambda,residual".
void write_eigen_csv(std::ostream& os, const LowestModes& modes);

}  // namespace hypcover
