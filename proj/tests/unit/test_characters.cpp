#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hypcover/characters.hpp"
#include "hypcover/error.hpp"
#include "hypcover/rng.hpp"

using namespace hypcover;

namespace {

PermutationPair connected_sample(int n, std::uint64_t seed) {
  for (std::uint64_t s = seed;; ++s) {
    auto p = sample_hom(n, s);
    if (is_connected(p)) return p;
  }
}

// theta on a word via the matrix image: theta factors through Gamma/Gamma^2,
// which we read off abelianized exponent sums computed letter by letter.
int theta_by_exponents(const BaseCharacter& t, const Word& w) {
  int ea = 0;
  int eb = 0;
  for (Letter l : w.letters()) {
    const int s = is_inverse_letter(l) ? -1 : 1;
    (is_a(l) ? ea : eb) += s;
  }
  return ((ea % 2 != 0) ? t.a : 1) * ((eb % 2 != 0) ? t.b : 1);
}

CoverCharacter random_character(const SpanningBasis& b, Rng& rng) {
  auto c = CoverCharacter::constant(b, 1);
  for (auto& s : c.signs) s = rng.below(2) == 0 ? 1 : -1;
  return c;
}

}  // namespace

TEST_CASE("restrict examples") {
  auto b1 = spanning_basis(SchreierGraph::from(make_pair({0}, {0})));
  CHECK(restrict(BaseCharacter::from(1, 1), b1).str() == "++");
  CHECK(restrict(BaseCharacter::from(-1, 1), b1).str() == "-+");
  CHECK(BaseCharacter::from(-1, 1).eval(Word::parse("abA")) == 1);
  CHECK(BaseCharacter::from(1, -1).eval(Word::parse("abA")) == -1);
  CHECK_THROWS_AS(BaseCharacter::from(2, 1), Error);
}

TEST_CASE("restrict matches exponent sums and is multiplicative") {
  auto p = connected_sample(25, 4);
  auto b = spanning_basis(SchreierGraph::from(p));
  const BaseCharacter all[4] = {{1, 1}, {-1, 1}, {1, -1}, {-1, -1}};
  for (const auto& t1 : all) {
    auto r1 = restrict(t1, b);
    CHECK(r1.size() == 26);
    CHECK(r1.trivial() == t1.trivial());
    for (std::size_t k = 0; k < b.size(); ++k) {
      CHECK(r1.signs[k] == theta_by_exponents(t1, b.elements[k].word));
    }
    for (const auto& t2 : all) {
      const BaseCharacter t12{t1.a * t2.a, t1.b * t2.b};
      CHECK(restrict(t12, b) == r1 * restrict(t2, b));
    }
  }
}

TEST_CASE("restrict on products of basis words") {
  auto p = connected_sample(10, 8);
  auto b = spanning_basis(SchreierGraph::from(p));
  Rng rng(123);
  const BaseCharacter t{-1, -1};
  const auto xi = restrict(t, b);
  for (int trial = 0; trial < 200; ++trial) {
    const int len = 1 + static_cast<int>(rng.below(6));
    Word w;
    int expected = 1;
    for (int k = 0; k < len; ++k) {
      const auto idx = rng.below(b.size());
      const bool inv = rng.below(2) == 1;
      w = w * (inv ? b.elements[idx].word.inverse() : b.elements[idx].word);
      expected *= xi.signs[idx];
    }
    CHECK(t.eval(w.reduced()) == expected);
    // Holonomy of chi along the closed path from the root agrees as well.
    CHECK(holonomy(p, b, xi, 0, w) == expected);
  }
}

TEST_CASE("hamming metric") {
  auto b1 = spanning_basis(SchreierGraph::from(make_pair({0}, {0})));
  CHECK(hamming(CoverCharacter::constant(b1, 1), CoverCharacter::constant(b1, -1)) == 2);

  auto p = connected_sample(10, 2);
  auto b = spanning_basis(SchreierGraph::from(p));
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    auto x = random_character(b, rng);
    auto y = random_character(b, rng);
    auto z = random_character(b, rng);
    int brute = 0;
    for (std::size_t k = 0; k < x.size(); ++k) brute += x.signs[k] != y.signs[k] ? 1 : 0;
    CHECK(hamming(x, y) == brute);
    CHECK(hamming(x, x) == 0);
    CHECK(hamming(x, y) == hamming(y, x));
    CHECK(hamming(x, z) <= hamming(x, y) + hamming(y, z));
    if (hamming(x, y) == 0) CHECK(x == y);
  }

  auto other = CoverCharacter::constant(b1, 1);
  other.signs.resize(11, 1);
  try {
    hamming(other, CoverCharacter::constant(b, 1));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IncompatibleCharacter);
  }
}

TEST_CASE("hamming geodesics") {
  auto b1 = spanning_basis(SchreierGraph::from(make_pair({0}, {0})));
  auto s = CoverCharacter::constant(b1, 1);
  CHECK(hamming_geodesic(s, s).size() == 1);
  auto path = hamming_geodesic(s, CoverCharacter::constant(b1, -1));
  REQUIRE(path.size() == 3);
  CHECK(path[1].str() == "-+");

  auto p = connected_sample(30, 6);
  auto b = spanning_basis(SchreierGraph::from(p));
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    auto x = random_character(b, rng);
    auto y = random_character(b, rng);
    auto g = hamming_geodesic(x, y);
    CHECK(static_cast<int>(g.size()) == hamming(x, y) + 1);
    CHECK(g.front() == x);
    CHECK(g.back() == y);
    for (std::size_t k = 1; k < g.size(); ++k) CHECK(hamming(g[k - 1], g[k]) == 1);
  }
}

TEST_CASE("character text form") {
  auto b = spanning_basis(SchreierGraph::from(make_pair({1, 0}, {0, 1})));
  auto c = CoverCharacter::parse("+-+", b.hash());
  CHECK(c.str() == "+-+");
  CHECK(c.basis_hash == b.hash());
  CHECK_THROWS_AS(CoverCharacter::parse("+x+", b.hash()), Error);
}

TEST_CASE("edge signs and holonomy around cusps") {
  auto p = connected_sample(12, 40);
  auto b = spanning_basis(SchreierGraph::from(p));
  auto xi = restrict(BaseCharacter{-1, 1}, b);
  for (int e : b.tree_edges) CHECK(edge_sign(b, xi, e) == 1);
  // theta is a character of Gamma, so the pulled-back holonomy of a closed
  // loop from any vertex equals theta on the word.
  for (int i = 0; i < p.n; ++i) {
    for (const char* w : {"aaa", "ab", "aBAb", "abab"}) {
      const Word word = Word::parse(w);
      if (p.act(i, word) != i) continue;
      CHECK(holonomy(p, b, xi, i, word) == BaseCharacter{-1, 1}.eval(word));
    }
  }
}
