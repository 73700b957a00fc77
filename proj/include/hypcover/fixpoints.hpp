#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hypcover/covers.hpp"
#include "hypcover/hyperbolic.hpp"

namespace hypcover {

struct CoreEdge {
  int tail = 0;
  int head = 0;
  Letter label = Letter::A;  ///< A or B
};

/// Basepointed labeled graph; after folding no vertex has two outgoing or two
/// incoming edges with the same label. Vertices are numbered in BFS order
/// from the basepoint 0.
struct CoreGraph {
  int vertices = 1;
  std::vector<CoreEdge> edges;

  int rank() const { return static_cast<int>(edges.size()) - vertices + 1; }
  bool is_folded() const;
  /// Free basis of the subgroup read off a BFS spanning tree.
  std::vector<Word> generators() const;
};

/// Wedge of the word loops at the basepoint, folded to completion.
CoreGraph stallings_fold(const std::vector<Word>& words);
/// Folds an arbitrary labeled graph (basepoint 0).
CoreGraph fold(const CoreGraph& g);

struct LengthProfile {
  int ell = 0;        ///< BFS-tree surrogate for the minimal total basis length
  int rank = 0;
  std::optional<int> tree_minimum;  ///< minimum over all spanning trees (cores with <= 12 edges)
};

/// Sum over non-tree edges of depth(tail) + 1 + depth(head) for the BFS tree.
LengthProfile basis_length(const CoreGraph& cg);

/// Points i such that every element of H fixes i: the core graph immerses
/// into the Schreier graph with the basepoint sent to i.
int fix_count(const PermutationPair& p, const CoreGraph& cg);

/// Points fixed by every word (the definition, used as an oracle).
int fix_count_bruteforce(const PermutationPair& p, const std::vector<Word>& words);

enum class FixMode { Exact, MonteCarlo };

struct FixStatistic {
  int n = 0;
  FixMode mode = FixMode::Exact;
  std::uint64_t samples = 0;  ///< (n!)^2 in exact mode
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t total = 0;    ///< sum of fix over all samples; mean = total / samples
};

/// Exact mode enumerates all (n!)^2 pairs and requires n <= 6 (Overflow
/// otherwise). Monte Carlo splits samples into fixed chunks with seeds
/// derive_seed(seed, chunk), so results do not depend on `threads`.
FixStatistic expected_fix(const CoreGraph& cg, int n, FixMode mode, std::uint64_t samples = 0,
                          std::uint64_t seed = 0, int threads = 1);

/// Histogram of fix over all (n!)^2 pairs, n <= 6.
std::vector<std::uint64_t> fix_distribution(const CoreGraph& cg, int n);

struct PropA1Row {
  int n = 0;
  FixStatistic stat;
  double ratio = 0.0;  ///< mean * n / ell^6
};

struct PropA1Report {
  int ell = 0;
  int rank = 0;
  std::vector<PropA1Row> rows;
  double max_ratio = 0.0;
  bool finite = false;
  /// Last ratio within twice the first plus three standard errors.
  bool non_exploding = false;
};

/// Requires rank >= 2 and n >= ell^3 for every grid point (Precondition).
/// Uses exact mode for n <= 6, Monte Carlo otherwise.
PropA1Report verify_prop_a1(const CoreGraph& cg, const std::vector<int>& n_grid, std::uint64_t samples,
                            std::uint64_t seed, int threads = 1);

struct PochhammerReport {
  bool pass = true;
  std::uint64_t checked = 0;
  int fail_n = -1;
  int fail_a = -1;
};

/// n^a (1 - a^2/n) <= (n)_a <= n^a for 1 <= n <= n_max, 0 <= a <= min(a_max, n/2),
/// in exact integer arithmetic.
PochhammerReport pochhammer_check(int n_max, int a_max);

/// Edge list text: "hypcover-core v1", "vertices V", "edges E", then "tail label head".
void write_core_graph(std::ostream& os, const CoreGraph& cg);

}  // namespace hypcover
