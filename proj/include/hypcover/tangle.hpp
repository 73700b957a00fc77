#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hypcover/covers.hpp"
#include "hypcover/hyperbolic.hpp"

namespace hypcover {

struct GtfWitness {
  int vertex = 0;
  int cycle_rank = 0;
};

struct GtfReport {
  int n = 0;
  int rho = 0;
  bool pass = true;
  std::vector<GtfWitness> witnesses;  ///< sorted by vertex

  /// {"n":..,"rho":..,"pass":..,"witnesses":[{"vertex":..,"cycle_rank":..}]}
  std::string to_json() const;
};

/// Induced sub-multigraph on the vertices within graph distance rho of v.
/// Loops count as one edge; parallel edges are kept.
struct Ball {
  std::vector<int> vertices;  ///< BFS order, center first
  std::vector<int> edges;     ///< Schreier edge indices with both ends inside
};

Ball induced_ball(const SchreierGraph& g, int v, int rho);
/// |E| - |V| + components.
int cycle_rank_by_counting(const SchreierGraph& g, const Ball& b);
/// Number of edges left over after a spanning forest.
int cycle_rank_by_forest(const SchreierGraph& g, const Ball& b);

/// rho(n) = max(1, floor(c_g log2 n)).
int gtf_radius(int n, double c_g = 0.25);

/// Checks every vertex ball; the per-vertex work is split across `threads`
/// and the report is assembled in vertex order.
GtfReport certify_gtf_graph(const SchreierGraph& g, int rho, int threads = 1);

struct ShortPair {
  Word g1;
  Word g2;
  double r = 0.0;  ///< radius bound: both d(o, g_i o) <= r
};

/// Unordered pairs of non-identity elements of lattice_ball(o, r) whose
/// Stallings fold has rank 2. Pairs are listed in shortlex order of (g1, g2).
std::vector<ShortPair> enumerate_short_pairs(double r, const HPoint& o, const LatticeOptions& opts = {});

struct CommonFixedPoint {
  std::size_t pair = 0;  ///< index into the scanned list
  int point = 0;
};

/// Every (pair, i) with i.g1 = i and i.g2 = i.
std::vector<CommonFixedPoint> scan_common_fixed_points(const PermutationPair& p, const std::vector<ShortPair>& pairs);

/// Two independent loops at v inside its tangled ball, as a rank-2 pair fixing
/// v. `r` is set to the larger displacement d(i, g i). Throws Precondition if
/// the ball at v has cycle rank below 2.
ShortPair failure_witness_pair(const PermutationPair& p, int v, int rho);

struct TrendRow {
  int n = 0;
  int rho = 0;
  int seeds = 0;
  int failures = 0;
  double rate = 0.0;
  double std_error = 0.0;  ///< binomial sqrt(rate (1 - rate) / seeds)
};

struct TangleTrend {
  std::vector<TrendRow> rows;
  /// Each rate at most the previous one plus two pooled standard errors.
  bool non_increasing = true;
};

/// Monte Carlo failure rate of certify_gtf_graph at rho = gtf_radius(n, c_g).
/// Seed s of size n uses sample_hom(n, derive_seed(base_seed, s)).
TangleTrend tangle_probability_trend(const std::vector<int>& n_list, int seeds, double c_g = 0.25,
                                     std::uint64_t base_seed = 0, int threads = 1);

struct ConditionedSample {
  PermutationPair p;
  int tries = 0;  ///< rejected draws before p
};

/// First draw sample_hom(n, derive_seed(seed, k)), k = 0, 1, ..., that is
/// connected, certified GTF(rho) when rho >= 0, and accepted by `extra`.
/// NonTermination after max_tries draws.
ConditionedSample sample_conditioned(int n, std::uint64_t seed, int rho = -1,
                                     const std::function<bool(const PermutationPair&)>& extra = {},
                                     int max_tries = 100000, int threads = 1);

}  // namespace hypcover
