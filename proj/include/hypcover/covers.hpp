#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hypcover/hyperbolic.hpp"

namespace hypcover {

/// phi: Gamma -> S_n given by the images of a and b. Points are 0-based and
/// the distinguished vertex is 0. Permutations act on the right and words are
/// read left to right: i.(g1 g2) = (i.g1).g2, so i.a = sigma_a[i].
struct PermutationPair {
  int n = 0;
  std::vector<int> sigma_a;
  std::vector<int> sigma_b;
  std::uint64_t seed = 0;

  int act(int i, Letter l) const;
  int act(int i, const Word& w) const;
  /// Validates that both are bijections of {0..n-1}; throws InvalidSize.
  void validate() const;
};

/// Two independent uniform permutations (Fisher-Yates over Rng(seed)).
PermutationPair sample_hom(int n, std::uint64_t seed);
PermutationPair make_pair(std::vector<int> sigma_a, std::vector<int> sigma_b);

/// Transitivity of <sigma_a, sigma_b>.
bool is_connected(const PermutationPair& p);

struct SchreierEdge {
  int tail = 0;
  int head = 0;
  Letter label = Letter::A;  ///< A or B
};

/// Edge k is (k/2 -> sigma(k/2)) with label a for even k, b for odd k.
struct SchreierGraph {
  int n = 0;
  int root = 0;
  std::vector<SchreierEdge> edges;

  static SchreierGraph from(const PermutationPair& p);
  static int edge_index(int tail, Letter label) { return 2 * tail + (is_a(label) ? 0 : 1); }
};

struct BasisElement {
  int edge = 0;  ///< Schreier edge index
  int tail = 0;
  int head = 0;
  Letter label = Letter::A;
  Word word;  ///< tree path to tail, label, tree path from head back to the root
};

struct SpanningBasis {
  int n = 0;
  int root = 0;
  std::vector<int> tree_edges;        ///< sorted edge indices
  std::vector<int> parent_edge;       ///< per vertex, -1 at the root
  std::vector<int> depth;             ///< tree depth per vertex
  std::vector<Word> path;             ///< word of the tree path root -> v
  std::vector<BasisElement> elements; ///< non-tree edges in increasing edge index
  std::vector<int> coordinate;        ///< per edge: basis coordinate, or -1 on tree edges

  std::size_t size() const { return elements.size(); }
  /// Stable 64-bit digest of the serialized basis, used to tag characters.
  /// Filled in by spanning_basis.
  std::string digest;
  const std::string& hash() const { return digest; }
  std::string compute_digest() const;
};

/// BFS tree from `root` (default: the distinguished vertex). Neighbours of a
/// vertex are visited by increasing vertex index, a before b, outgoing before
/// incoming. Non-tree edges keep the orientation of their label (tail -> tail.g)
/// so every basis word carries its label with exponent +1.
SpanningBasis spanning_basis(const SchreierGraph& g);
SpanningBasis spanning_basis(const SchreierGraph& g, int root);

struct CuspClass {
  std::string name;  ///< "a", "b", "aB"
  Word word;
  std::vector<std::vector<int>> cycles;  ///< each cycle starts at its smallest point

  std::vector<int> lengths() const;
};

/// Cusps of X_phi: cycles of phi(a), phi(b), phi(a b^-1). A cycle of length L
/// is a cusp whose bounding horocycle has length L.
struct CuspTable {
  std::array<CuspClass, 3> classes;
};

CuspTable cusp_table(const PermutationPair& p);

// Line-oriented text formats, versioned by their first line.
//   hypcover-cover v1
//   n <n>
//   seed <seed>
//   sigma_a <n integers>
//   sigma_b <n integers>
// and
//   hypcover-basis v1
//   n <n>
//   root <v>
//   tree <count>
//   t <edge> <tail> <label> <head>       (one per tree edge)
//   basis <count>
//   e <coord> <edge> <tail> <label> <head> <word>
void write_cover(std::ostream& os, const PermutationPair& p);
PermutationPair read_cover(std::istream& is);
void write_basis(std::ostream& os, const SpanningBasis& b);
/// Reads a basis and checks it against the graph it claims to describe.
SpanningBasis read_basis(std::istream& is, const SchreierGraph& g);

}  // namespace hypcover
