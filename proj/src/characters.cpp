#include "hypcover/characters.hpp"

#include "hypcover/error.hpp"

namespace hypcover {

namespace {

void require_same_basis(const CoverCharacter& l, const CoverCharacter& r) {
  if (l.basis_hash != r.basis_hash || l.size() != r.size()) {
    fail(ErrorKind::IncompatibleCharacter, "characters live on different bases");
  }
}

}  // namespace

BaseCharacter BaseCharacter::from(int a, int b) {
  if ((a != 1 && a != -1) || (b != 1 && b != -1)) fail(ErrorKind::InvalidConfig, "theta entries must be +1 or -1");
  return {a, b};
}

int BaseCharacter::eval(const Word& w) const {
  const int sa = (w.a_count() % 2 == 0) ? 1 : a;
  const int sb = (w.b_count() % 2 == 0) ? 1 : b;
  return sa * sb;
}

bool CoverCharacter::trivial() const {
  for (auto s : signs) {
    if (s != 1) return false;
  }
  return true;
}

std::string CoverCharacter::str() const {
  std::string s;
  s.reserve(signs.size());
  for (auto v : signs) s.push_back(v > 0 ? '+' : '-');
  return s;
}

CoverCharacter CoverCharacter::parse(const std::string& pm, const std::string& basis_hash) {
  CoverCharacter c;
  c.basis_hash = basis_hash;
  for (char ch : pm) {
    if (ch == '+') {
      c.signs.push_back(1);
    } else if (ch == '-') {
      c.signs.push_back(-1);
    } else {
      fail(ErrorKind::InvalidConfig, "character string must be made of + and -");
    }
  }
  return c;
}

CoverCharacter CoverCharacter::constant(const SpanningBasis& basis, int sign) {
  CoverCharacter c;
  c.basis_hash = basis.hash();
  c.signs.assign(basis.size(), static_cast<std::int8_t>(sign > 0 ? 1 : -1));
  return c;
}

CoverCharacter restrict(const BaseCharacter& theta, const SpanningBasis& basis) {
  CoverCharacter c;
  c.basis_hash = basis.hash();
  c.signs.reserve(basis.size());
  for (const auto& e : basis.elements) c.signs.push_back(static_cast<std::int8_t>(theta.eval(e.word)));
  return c;
}

CoverCharacter operator*(const CoverCharacter& l, const CoverCharacter& r) {
  require_same_basis(l, r);
  CoverCharacter c = l;
  for (std::size_t i = 0; i < c.signs.size(); ++i) c.signs[i] = static_cast<std::int8_t>(l.signs[i] * r.signs[i]);
  return c;
}

int hamming(const CoverCharacter& l, const CoverCharacter& r) {
  require_same_basis(l, r);
  int d = 0;
  for (std::size_t i = 0; i < l.signs.size(); ++i) d += (l.signs[i] != r.signs[i]) ? 1 : 0;
  return d;
}

std::vector<CoverCharacter> hamming_geodesic(const CoverCharacter& start, const CoverCharacter& end) {
  require_same_basis(start, end);
  std::vector<CoverCharacter> out{start};
  CoverCharacter cur = start;
  for (std::size_t i = 0; i < cur.signs.size(); ++i) {
    if (cur.signs[i] == end.signs[i]) continue;
    cur.signs[i] = end.signs[i];
    out.push_back(cur);
  }
  return out;
}

int edge_sign(const SpanningBasis& basis, const CoverCharacter& chi, int edge) {
  const int c = basis.coordinate[static_cast<std::size_t>(edge)];
  return c < 0 ? 1 : chi.signs[static_cast<std::size_t>(c)];
}

int holonomy(const PermutationPair& p, const SpanningBasis& basis, const CoverCharacter& chi, int i,
             const Word& w) {
  if (chi.size() != basis.size()) fail(ErrorKind::IncompatibleCharacter, "character does not match the basis");
  int sign = 1;
  for (Letter l : w.letters()) {
    if (is_inverse_letter(l)) {
      const int prev = p.act(i, l);
      sign *= edge_sign(basis, chi, SchreierGraph::edge_index(prev, l));
      i = prev;
    } else {
      sign *= edge_sign(basis, chi, SchreierGraph::edge_index(i, l));
      i = p.act(i, l);
    }
  }
  return sign;
}

}  // namespace hypcover
