#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypcover/covers.hpp"

namespace hypcover {

/// theta in Hom(Gamma, mu_2), given by theta(a), theta(b) in {+1, -1}.
struct BaseCharacter {
  int a = 1;
  int b = 1;

  bool trivial() const { return a == 1 && b == 1; }
  int eval(const Word& w) const;
  static BaseCharacter from(int a, int b);
};

/// mu_2-character of Gamma_phi, as signs on the basis elements of one
/// spanning basis (tagged by that basis's hash).
struct CoverCharacter {
  std::vector<std::int8_t> signs;
  std::string basis_hash;

  std::size_t size() const { return signs.size(); }
  bool trivial() const;
  /// "+-+..." form.
  std::string str() const;
  static CoverCharacter parse(const std::string& pm, const std::string& basis_hash);
  static CoverCharacter constant(const SpanningBasis& basis, int sign);

  friend bool operator==(const CoverCharacter&, const CoverCharacter&) = default;
};

/// xi(e) = theta_a^(#a letters) theta_b^(#b letters) on each basis word.
CoverCharacter restrict(const BaseCharacter& theta, const SpanningBasis& basis);

/// Coordinatewise product; same basis required.
CoverCharacter operator*(const CoverCharacter& l, const CoverCharacter& r);

/// Number of disagreeing coordinates; throws IncompatibleCharacter on a basis mismatch.
int hamming(const CoverCharacter& l, const CoverCharacter& r);

/// start, ..., end flipping differing coordinates in ascending order.
std::vector<CoverCharacter> hamming_geodesic(const CoverCharacter& start, const CoverCharacter& end);

/// Sign carried by Schreier edge k: +1 on tree edges, xi(e) otherwise.
int edge_sign(const SpanningBasis& basis, const CoverCharacter& chi, int edge);

/// Product of edge signs along the path that `w` traces from vertex i.
/// When the path closes up this is chi of the corresponding element of the
/// stabilizer of i (chi transported along the tree path from the root).
int holonomy(const PermutationPair& p, const SpanningBasis& basis, const CoverCharacter& chi, int i,
             const Word& w);

}  // namespace hypcover
