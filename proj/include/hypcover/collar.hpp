#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hypcover/covers.hpp"
#include "hypcover/hyperbolic.hpp"
#include "hypcover/kernels.hpp"
#include "hypcover/surface_spectra.hpp"

namespace hypcover {

/// Mass of f in the two collar bands of one cusp of the cover: lower is
/// L <= y < 2L, upper is y >= 2L (up to the truncation), y the standard
/// height (chart height / 2).
struct CollarBand {
  std::string cusp;   ///< base cusp class: "a", "b" or "aB"
  int cycle_start = 0;
  int width = 0;      ///< cycle length
  double lower = 0.0;
  double upper = 0.0;
  double ratio = 0.0;      ///< lower / upper
  bool unbounded = false;  ///< upper == 0; ratio is +inf by convention
};

/// One row per cusp of X_phi. Requires Y >= 4L (InvalidBand otherwise).
std::vector<CollarBand> collar_mass_ratio(const TileMesh& mesh, const TwistedPair& tp, const PermutationPair& p,
                                          const Eigen::VectorXd& f, double L = 1.0);

/// Closed geodesic of the cover: the axis of `word` lifted through the
/// sigma_word-cycle of `cycle_point`. `lifts` are the words w for which
/// w . axis passes within 2 kappa of F.
struct FermiTube {
  Word word;
  int cycle_point = 0;
  std::vector<Word> lifts;
  double alpha = 0.0;  ///< repelling endpoint
  double beta = 0.0;   ///< attracting endpoint
};

/// Smallest point of a shortest sigma_word-cycle; the closed geodesic of the
/// cover through it is the shortest lift of the base geodesic.
int shortest_cycle_point(const PermutationPair& p, const Word& word);

/// Requires a hyperbolic word (|trace| > 2).
FermiTube fermi_tube(const Word& word, int cycle_point, double kappa = collar_kappa());

/// Distance from (z, tile) to the closed geodesic, or +inf when no lift
/// sits within 2 kappa.
double tube_distance(const FermiTube& tube, const PermutationPair& p, int tile, const HPoint& z);

struct CutoffReport {
  double rayleigh_f = 0.0;
  double rayleigh_cusp = 0.0;  ///< for f' = J0 f
  double rayleigh_cut = 0.0;   ///< for f'' = J0 J* f
  double cusp_mass = 0.0;      ///< |J0 f|^2 / |f|^2
  double cut_mass = 0.0;       ///< |f''|^2 / |f|^2
  double collar_min_ratio = 0.0;
  Eigen::VectorXd cut;
};

/// Applies the cusp cutoff J0 (scale L in every cusp) and the tube cutoff J*
/// to f nodally.
CutoffReport cutoff_chain(const TileMesh& mesh, const TwistedPair& tp, const PermutationPair& p,
                          const Eigen::VectorXd& f, const FermiTube& tube, double L = 1.0);

struct PretracePoint {
  HPoint z;
  double lhs = 0.0;  ///< sum over modes with lambda < 1/4 of H_t(r(lambda)) |f(z)|^2
  double rhs = 0.0;  ///< pretrace_rhs with K = k_t * k_t
  int modes = 0;     ///< number of modes below 1/4 that entered lhs
};

/// Ten fixed points of the compact part of F used by the consistency check.
std::vector<HPoint> pretrace_sample_points();

/// Discrete side of the pre-trace inequality on tile 0 of the cover from the
/// `modes` lowest FEM eigenpairs, against the lattice side. H_t = h_t^2 is
/// the transform of the self-convolved kernel.
std::vector<PretracePoint> pretrace_consistency(const TileMesh& mesh, const PermutationPair& p,
                                                const SpanningBasis& basis, const CoverCharacter& chi, double t,
                                                const std::vector<HPoint>& points, int modes = 8);

}  // namespace hypcover
