#pragma once

#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hypcover {

using Complex = std::complex<double>;

/// Point of the upper half-plane.
struct HPoint {
  double x = 0.0;
  double y = 1.0;

  Complex z() const { return {x, y}; }
  static HPoint from(Complex w) { return {w.real(), w.imag()}; }
  bool valid() const { return y > 0.0 && std::isfinite(x) && std::isfinite(y); }
};

/// Element of PSL2(R). Entries are integer-valued for elements of Gamma(2);
/// m and -m are the same element.
class MobiusMatrix {
 public:
  constexpr MobiusMatrix() = default;
  constexpr MobiusMatrix(double a, double b, double c, double d)
      : a_(a), b_(b), c_(c), d_(d) {}

  static constexpr MobiusMatrix identity() { return {1, 0, 0, 1}; }
  /// z -> z + 2
  static constexpr MobiusMatrix gen_a() { return {1, 2, 0, 1}; }
  /// z -> z / (2z + 1)
  static constexpr MobiusMatrix gen_b() { return {1, 0, 2, 1}; }

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }

  double det() const { return a_ * d_ - b_ * c_; }
  double trace() const { return a_ + d_; }
  MobiusMatrix inverse() const { return {d_, -b_, -c_, a_}; }

  /// |trace| > 2.
  bool is_hyperbolic() const { return std::abs(trace()) > 2.0 + 1e-9; }

  Complex apply(Complex z) const { return (a_ * z + b_) / (c_ * z + d_); }

  friend MobiusMatrix operator*(const MobiusMatrix& l, const MobiusMatrix& r) {
    return {l.a_ * r.a_ + l.b_ * r.c_, l.a_ * r.b_ + l.b_ * r.d_,
            l.c_ * r.a_ + l.d_ * r.c_, l.c_ * r.b_ + l.d_ * r.d_};
  }

  /// Equality in PSL2: exact entrywise comparison up to a global sign.
  friend bool operator==(const MobiusMatrix& l, const MobiusMatrix& r) {
    const bool same = l.a_ == r.a_ && l.b_ == r.b_ && l.c_ == r.c_ && l.d_ == r.d_;
    const bool neg = l.a_ == -r.a_ && l.b_ == -r.b_ && l.c_ == -r.c_ && l.d_ == -r.d_;
    return same || neg;
  }

 private:
  double a_ = 1, b_ = 0, c_ = 0, d_ = 1;
};

/// Moebius action with validation: throws InvalidElement for det != 1 (beyond
/// 1e-9 relative) or a point sent to the boundary.
HPoint mobius_apply(const MobiusMatrix& m, const HPoint& z);

// ---------------------------------------------------------------------------
// Words in the free basis {a, b} of Gamma(2).

enum class Letter : std::uint8_t { A = 0, AInv = 1, B = 2, BInv = 3 };

constexpr Letter inverse(Letter l) {
  return static_cast<Letter>(static_cast<std::uint8_t>(l) ^ 1U);
}
constexpr bool is_a(Letter l) { return l == Letter::A || l == Letter::AInv; }
constexpr bool is_inverse_letter(Letter l) { return (static_cast<std::uint8_t>(l) & 1U) != 0; }
char letter_char(Letter l);
MobiusMatrix letter_matrix(Letter l);

/// Word over {a, A=a^-1, b, B=b^-1}. Text form is compact: "abA" means a b a^-1.
/// Ordering is shortlex with a < A < b < B.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}

  static Word parse(std::string_view text);
  static Word single(Letter l) { return Word({l}); }

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  Letter back() const { return letters_.back(); }

  bool is_reduced() const;
  /// Free reduction (cancels adjacent inverse pairs).
  Word reduced() const;
  Word inverse() const;

  void push_back(Letter l) { letters_.push_back(l); }
  /// Product in the free group, freely reduced.
  friend Word operator*(const Word& l, const Word& r);

  /// Matrix of the product x1 x2 ... xk.
  MobiusMatrix matrix() const;
  /// Number of a-letters and b-letters (with multiplicity, either sign).
  int a_count() const;
  int b_count() const;

  std::string str() const;

  friend bool operator==(const Word&, const Word&) = default;
  friend std::strong_ordering operator<=>(const Word& l, const Word& r);

 private:
  std::vector<Letter> letters_;
};

// ---------------------------------------------------------------------------
// Metric and fundamental domain.

/// Hyperbolic distance; cosh d = 1 + |z - w|^2 / (2 Im z Im w).
double hyp_distance(const HPoint& z, const HPoint& w);

/// Membership in the ideal quadrilateral F with vertices -1, 0, 1, infinity.
/// Boundary convention: the left vertical side and the left semicircle belong
/// to F, the right vertical side and the right semicircle do not, so that
/// Gamma(2)-translates of F tile the plane without overlap:
///   -1 <= x < 1,  |z + 1/2| >= 1/2,  |z - 1/2| > 1/2.
bool in_fundamental_domain(const HPoint& z);

struct Reduction {
  HPoint point;
  Word word;  ///< word . z == point
};

/// Moves z into F by side pairings; throws NonTermination after `max_steps`.
Reduction reduce_to_domain(const HPoint& z, int max_steps = 100000);

// ---------------------------------------------------------------------------
// Lattice points.

struct LatticeElement {
  MobiusMatrix matrix;
  Word word;
  double distance = 0.0;  ///< d(o, gamma o)
};

struct LatticeOptions {
  /// Word-length exponent C in the bound |word| <= exp(C r).
  double growth_exponent = 2.0;
  double safety_factor = 1.5;
  std::size_t max_tiles = 20'000'000;
};

/// All gamma in Gamma(2) with d(o, gamma o) <= r, shortlex ordered by word.
/// Tiles gamma F are explored across sides that meet the closed ball, which
/// reaches exactly the tiles meeting the ball. A tile whose word exceeds
/// floor(exp(safety * C * r)) raises a Calibration error.
std::vector<LatticeElement> lattice_ball(const HPoint& o, double r,
                                         const LatticeOptions& opts = {});

struct WordLengthRow {
  double r = 0.0;
  std::size_t ball_size = 0;
  std::size_t max_word_length = 0;
};

struct WordLengthGrowth {
  std::vector<WordLengthRow> rows;
  /// max over rows with r > 0 of ln(max word length) / r.
  double measured_exponent = 0.0;
};

WordLengthGrowth word_length_growth(const HPoint& o, const std::vector<double>& r_grid,
                                    const LatticeOptions& opts = {});

// ---------------------------------------------------------------------------

/// Geometric constants of X = Gamma(2)\H, all measured rather than assumed.
struct DomainConstants {
  double core_radius = 0.0;      ///< R0: K inside B(o, R0)
  double core_diameter = 0.0;    ///< D: diameter of the compact core tile
  double systole = 0.0;          ///< l0: shortest closed geodesic
  double growth_exponent = 0.0;  ///< C
  double epsilon = 0.0;          ///< GTF calibration, 6 C eps < 1/4 and 2 eps < 1/4

  /// Throws Precondition unless all positive and the epsilon conditions hold.
  void validate() const;
};

/// Height of the compact core truncation in each cusp chart: the horocycles
/// of length one sit at chart height 2.
inline constexpr double kCoreHeight = 2.0;

/// Chart maps for the three cusps of X, sending infinity to the cusp and the
/// width-2 horoball {Im > Y} to the truncation region. Index 0: cusp at
/// infinity (stabilizer a), 1: cusp at 0 (stabilizer b), 2: cusp at 1
/// (stabilizer a b^-1), 3: the translate of cusp 2 at -1.
MobiusMatrix cusp_chart(int which);
/// Chart height Im(chart^-1 z) for the given cusp.
double cusp_height(const HPoint& z, int which);

/// Dense samples of the boundary of the compact core tile (F truncated at
/// chart height kCoreHeight in every cusp).
std::vector<HPoint> core_boundary_samples(int per_curve);

/// Measures R0 and D by boundary sampling, l0 from traces in the radius-6
/// lattice ball, C from word-length growth on r_grid, and picks
/// epsilon = 0.9 min(1/(24 C), 1/8).
DomainConstants measure_domain_constants(const HPoint& o, const std::vector<double>& r_grid,
                                         int samples_per_curve = 400);

}  // namespace hypcover
