#include "hypcover/hyperbolic.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>

#include "hypcover/error.hpp"

namespace hypcover {

namespace {

constexpr double kDetTol = 1e-9;

// Side geodesics of F, indexed by the letter whose translate lies across them:
// crossing side s of gamma F lands in gamma * letter(s) F.
//   A    : x = +1           (a F is the strip 1 < x < 3)
//   AInv : x = -1
//   B    : |z - 1/2| = 1/2  (b F lies inside this disk)
//   BInv : |z + 1/2| = 1/2
// sinh of the distance from w to the side geodesic.
double sinh_distance_to_side(Letter side, Complex w) {
  const double x = w.real();
  const double y = w.imag();
  switch (side) {
    case Letter::A: return std::abs(x - 1.0) / y;
    case Letter::AInv: return std::abs(x + 1.0) / y;
    case Letter::B: {
      const double dx = x - 0.5;
      return std::abs(dx * dx + y * y - 0.25) / y;  // |.|/(2 R y) with R = 1/2
    }
    case Letter::BInv: {
      const double dx = x + 0.5;
      return std::abs(dx * dx + y * y - 0.25) / y;
    }
  }
  return 0.0;
}

constexpr Letter kLetters[4] = {Letter::A, Letter::AInv, Letter::B, Letter::BInv};

}  // namespace

HPoint mobius_apply(const MobiusMatrix& m, const HPoint& z) {
  if (!z.valid()) fail(ErrorKind::InvalidElement, "point not in the upper half-plane");
  const double scale = std::max({std::abs(m.a() * m.d()), std::abs(m.b() * m.c()), 1.0});
  if (std::abs(m.det() - 1.0) > kDetTol * scale) {
    fail(ErrorKind::InvalidElement, "matrix determinant is not 1");
  }
  const Complex denom = m.c() * z.z() + m.d();
  if (std::abs(denom) == 0.0) fail(ErrorKind::InvalidElement, "cz + d vanishes");
  const HPoint w = HPoint::from(m.apply(z.z()));
  if (!(w.y > 0.0)) fail(ErrorKind::InvalidElement, "image left the upper half-plane");
  return w;
}

// ---------------------------------------------------------------------------

char letter_char(Letter l) {
  switch (l) {
    case Letter::A: return 'a';
    case Letter::AInv: return 'A';
    case Letter::B: return 'b';
    case Letter::BInv: return 'B';
  }
  return '?';
}

MobiusMatrix letter_matrix(Letter l) {
  switch (l) {
    case Letter::A: return MobiusMatrix::gen_a();
    case Letter::AInv: return MobiusMatrix::gen_a().inverse();
    case Letter::B: return MobiusMatrix::gen_b();
    case Letter::BInv: return MobiusMatrix::gen_b().inverse();
  }
  return MobiusMatrix::identity();
}

Word Word::parse(std::string_view text) {
  std::vector<Letter> out;
  for (char ch : text) {
    switch (ch) {
      case 'a': out.push_back(Letter::A); break;
      case 'A': out.push_back(Letter::AInv); break;
      case 'b': out.push_back(Letter::B); break;
      case 'B': out.push_back(Letter::BInv); break;
      case ' ': case '1': break;  // "1" is the empty word
      default: fail(ErrorKind::InvalidConfig, std::string("bad letter in word: ") + ch);
    }
  }
  return Word(std::move(out));
}

bool Word::is_reduced() const {
  for (std::size_t i = 1; i < letters_.size(); ++i) {
    if (letters_[i] == hypcover::inverse(letters_[i - 1])) return false;
  }
  return true;
}

Word Word::reduced() const {
  std::vector<Letter> stack;
  stack.reserve(letters_.size());
  for (Letter l : letters_) {
    if (!stack.empty() && stack.back() == hypcover::inverse(l)) {
      stack.pop_back();
    } else {
      stack.push_back(l);
    }
  }
  return Word(std::move(stack));
}

Word Word::inverse() const {
  std::vector<Letter> out(letters_.rbegin(), letters_.rend());
  for (Letter& l : out) l = hypcover::inverse(l);
  return Word(std::move(out));
}

Word operator*(const Word& l, const Word& r) {
  std::vector<Letter> out = l.letters_;
  out.insert(out.end(), r.letters_.begin(), r.letters_.end());
  return Word(std::move(out)).reduced();
}

MobiusMatrix Word::matrix() const {
  MobiusMatrix m = MobiusMatrix::identity();
  for (Letter l : letters_) m = m * letter_matrix(l);
  return m;
}

int Word::a_count() const {
  return static_cast<int>(std::count_if(letters_.begin(), letters_.end(), is_a));
}

int Word::b_count() const { return static_cast<int>(letters_.size()) - a_count(); }

std::string Word::str() const {
  if (letters_.empty()) return "1";
  std::string s;
  for (Letter l : letters_) s.push_back(letter_char(l));
  return s;
}

std::strong_ordering operator<=>(const Word& l, const Word& r) {
  if (l.size() != r.size()) return l.size() <=> r.size();
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (l[i] != r[i]) return static_cast<int>(l[i]) <=> static_cast<int>(r[i]);
  }
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------

double hyp_distance(const HPoint& z, const HPoint& w) {
  if (!z.valid() || !w.valid()) fail(ErrorKind::InvalidElement, "point not in the upper half-plane");
  const double chord = std::abs(z.z() - w.z());
  return 2.0 * std::asinh(chord / (2.0 * std::sqrt(z.y * w.y)));
}

bool in_fundamental_domain(const HPoint& z) {
  if (!z.valid()) return false;
  if (z.x < -1.0 || z.x >= 1.0) return false;
  const double left = std::norm(z.z() + 0.5);
  const double right = std::norm(z.z() - 0.5);
  return left >= 0.25 && right > 0.25;
}

Reduction reduce_to_domain(const HPoint& z, int max_steps) {
  if (!z.valid()) fail(ErrorKind::InvalidElement, "point not in the upper half-plane");
  Complex w = z.z();
  std::vector<Letter> applied;  // g_1, g_2, ... in order of application
  for (int step = 0; step < max_steps; ++step) {
    const HPoint p = HPoint::from(w);
    Letter g;
    if (p.x >= 1.0) {
      // Jump straight over many strips at once.
      const double k = std::floor((p.x + 1.0) / 2.0);
      for (int i = 0; i < static_cast<int>(k); ++i) applied.push_back(Letter::AInv);
      w -= 2.0 * k;
      continue;
    } else if (p.x < -1.0) {
      const double k = std::ceil((-1.0 - p.x) / 2.0);
      for (int i = 0; i < static_cast<int>(k); ++i) applied.push_back(Letter::A);
      w += 2.0 * k;
      continue;
    } else if (std::norm(w - 0.5) <= 0.25) {
      g = Letter::BInv;
    } else if (std::norm(w + 0.5) < 0.25) {
      g = Letter::B;
    } else {
      // word = g_m ... g_1
      std::vector<Letter> rev(applied.rbegin(), applied.rend());
      return {p, Word(std::move(rev)).reduced()};
    }
    applied.push_back(g);
    w = letter_matrix(g).apply(w);
  }
  fail(ErrorKind::NonTermination, "reduce_to_domain exceeded its iteration cap");
}

// ---------------------------------------------------------------------------

std::vector<LatticeElement> lattice_ball(const HPoint& o, double r, const LatticeOptions& opts) {
  if (!(r >= 0.0)) fail(ErrorKind::Precondition, "lattice_ball needs r >= 0");
  if (!in_fundamental_domain(o)) fail(ErrorKind::Precondition, "lattice_ball centre must lie in F");

  const double cap_real = std::exp(opts.safety_factor * opts.growth_exponent * r);
  const std::size_t cap = cap_real > 1e15 ? std::numeric_limits<std::size_t>::max()
                                          : static_cast<std::size_t>(std::floor(cap_real));
  const double sinh_r = std::sinh(r);
  const double tol = 1e-12 * std::max(1.0, r);

  struct Node {
    MobiusMatrix inv;  // gamma^-1
    Word word;
  };
  std::vector<LatticeElement> out;
  std::deque<Node> frontier;
  frontier.push_back({MobiusMatrix::identity(), Word()});
  std::size_t visited = 0;
  while (!frontier.empty()) {
    Node node = std::move(frontier.front());
    frontier.pop_front();
    if (++visited > opts.max_tiles) fail(ErrorKind::Overflow, "lattice_ball tile budget exceeded");

    const MobiusMatrix gamma = node.inv.inverse();
    const HPoint image = HPoint::from(gamma.apply(o.z()));
    const double d = hyp_distance(o, image);
    if (d <= r + tol) out.push_back({gamma, node.word, d});

    const Complex pulled = node.inv.apply(o.z());  // gamma^-1 o
    for (Letter side : kLetters) {
      if (!node.word.empty() && side == inverse(node.word.back())) continue;  // parent
      if (sinh_distance_to_side(side, pulled) > sinh_r * (1.0 + 1e-12) + 1e-14) continue;
      if (node.word.size() + 1 > cap) {
        fail(ErrorKind::Calibration,
             "word-length bound exp(C r) too small: frontier still meets the ball");
      }
      Word next = node.word;
      next.push_back(side);
      frontier.push_back({letter_matrix(side).inverse() * node.inv, std::move(next)});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const LatticeElement& l, const LatticeElement& rr) { return l.word < rr.word; });
  return out;
}

WordLengthGrowth word_length_growth(const HPoint& o, const std::vector<double>& r_grid,
                                    const LatticeOptions& opts) {
  WordLengthGrowth g;
  double prev = -1.0;
  for (double r : r_grid) {
    if (!(r >= 0.0) || r < prev) fail(ErrorKind::Precondition, "r_grid must be increasing and >= 0");
    prev = r;
    const auto ball = lattice_ball(o, r, opts);
    std::size_t maxlen = 0;
    for (const auto& e : ball) maxlen = std::max(maxlen, e.word.size());
    g.rows.push_back({r, ball.size(), maxlen});
    if (r > 0.0 && maxlen > 0) {
      g.measured_exponent = std::max(g.measured_exponent, std::log(static_cast<double>(maxlen)) / r);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

void DomainConstants::validate() const {
  if (!(core_radius > 0 && core_diameter > 0 && systole > 0 && growth_exponent > 0 && epsilon > 0)) {
    fail(ErrorKind::Precondition, "domain constants must be strictly positive");
  }
  if (!(6.0 * growth_exponent * epsilon < 0.25 && 2.0 * epsilon < 0.25)) {
    fail(ErrorKind::Precondition, "epsilon violates 6 C eps < 1/4 or 2 eps < 1/4");
  }
}

MobiusMatrix cusp_chart(int which) {
  switch (which) {
    case 0: return MobiusMatrix::identity();
    case 1: return {0, -1, 1, 0};   // z -> -1/z
    case 2: return {1, -1, 1, 0};   // z -> 1 - 1/z
    case 3: return {-1, -1, 1, 0};  // z -> -1 - 1/z
    default: fail(ErrorKind::Precondition, "cusp chart index out of range");
  }
}

double cusp_height(const HPoint& z, int which) {
  return cusp_chart(which).inverse().apply(z.z()).imag();
}

namespace {

bool in_core_closure(const HPoint& p) {
  constexpr double tol = 1e-12;
  if (p.x < -1.0 - tol || p.x > 1.0 + tol) return false;
  if (std::norm(p.z() + 0.5) < 0.25 - tol || std::norm(p.z() - 0.5) < 0.25 - tol) return false;
  for (int c = 0; c < 4; ++c) {
    if (cusp_height(p, c) > kCoreHeight + 1e-9) return false;
  }
  return true;
}

}  // namespace

std::vector<HPoint> core_boundary_samples(int per_curve) {
  std::vector<HPoint> raw;
  const double pi = std::acos(-1.0);
  const auto n = static_cast<double>(per_curve);
  for (int k = 0; k <= per_curve; ++k) {
    const double s = k / n;
    raw.push_back({-1.0 + 2.0 * s, kCoreHeight});           // top horocycle
    raw.push_back({-1.0, 2.0 * s + 1e-9});                  // sides
    raw.push_back({1.0, 2.0 * s + 1e-9});
    const double th = pi * s;                               // semicircles
    raw.push_back({-0.5 + 0.5 * std::cos(th), 0.5 * std::sin(th) + 1e-300});
    raw.push_back({0.5 + 0.5 * std::cos(th), 0.5 * std::sin(th) + 1e-300});
    // Horocycles of the finite cusps: images of the line Im = kCoreHeight.
    for (int c = 1; c < 4; ++c) {
      const double x = -1.0 + 2.0 * s;
      for (double shift : {-2.0, 0.0, 2.0}) {
        const Complex w = cusp_chart(c).apply(Complex(x + shift, kCoreHeight));
        raw.push_back(HPoint::from(w));
      }
    }
  }
  std::vector<HPoint> out;
  for (const auto& p : raw) {
    if (p.valid() && p.y > 1e-6 && in_core_closure(p)) out.push_back(p);
  }
  return out;
}

DomainConstants measure_domain_constants(const HPoint& o, const std::vector<double>& r_grid,
                                         int samples_per_curve) {
  DomainConstants dc;
  const auto boundary = core_boundary_samples(samples_per_curve);
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    dc.core_radius = std::max(dc.core_radius, hyp_distance(o, boundary[i]));
    for (std::size_t j = i + 1; j < boundary.size(); ++j) {
      dc.core_diameter = std::max(dc.core_diameter, hyp_distance(boundary[i], boundary[j]));
    }
  }
  dc.systole = std::numeric_limits<double>::infinity();
  for (const auto& e : lattice_ball(o, 6.0)) {
    if (e.matrix.is_hyperbolic()) {
      dc.systole = std::min(dc.systole, 2.0 * std::acosh(std::abs(e.matrix.trace()) / 2.0));
    }
  }
  dc.growth_exponent = word_length_growth(o, r_grid).measured_exponent;
  dc.epsilon = 0.9 * std::min(1.0 / (24.0 * dc.growth_exponent), 1.0 / 8.0);
  dc.validate();
  return dc;
}

}  // namespace hypcover
