#include "hypcover/collar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "hypcover/error.hpp"

namespace hypcover {

namespace {

struct DeepCusp {
  int chart = -1;  ///< 0..3 as in cusp_chart, -1 in the compact part
  double height = 0.0;
};

// The horoballs beyond chart height 1 are disjoint, so a point is deep in at
// most one cusp chart.
DeepCusp deepest(const HPoint& z) {
  DeepCusp d;
  for (int c = 0; c < 4; ++c) {
    const double hgt = cusp_height(z, c);
    if (hgt > d.height) d = {c, hgt};
  }
  if (d.height < 1.0) d.chart = -1;
  return d;
}

double nodal(const TwistedPair& tp, const Eigen::VectorXd& f, int tile, int node) {
  const auto [dof, coef] = tp.lookup(tile, node);
  return coef * f[dof];
}

void check_shapes(const TileMesh& mesh, const TwistedPair& tp, const PermutationPair& p, const Eigen::VectorXd& f) {
  if (tp.n != p.n || tp.nodes_per_tile != static_cast<int>(mesh.vertices.size()))
    fail(ErrorKind::Precondition, "twisted pair does not match the mesh and cover");
  if (f.size() != tp.size()) fail(ErrorKind::Precondition, "vector length does not match the discretisation");
}

// sinh of the distance from u to the geodesic (lo, hi): normalise the axis to
// the imaginary axis with u -> (u - lo) / (hi - u).
double distance_to_axis(double lo, double hi, const HPoint& u) {
  const Complex w = (u.z() - lo) / (hi - u.z());
  return std::asinh(std::abs(w.real()) / w.imag());
}

std::vector<char> cycle_members(const FermiTube& tube, const PermutationPair& p) {
  if (tube.cycle_point < 0 || tube.cycle_point >= p.n) fail(ErrorKind::Precondition, "cycle point out of range");
  std::vector<char> in(static_cast<std::size_t>(p.n), 0);
  int i = tube.cycle_point;
  do {
    in[static_cast<std::size_t>(i)] = 1;
    i = p.act(i, tube.word);
  } while (i != tube.cycle_point);
  return in;
}

double tube_distance_in(const FermiTube& tube, const std::vector<char>& members, const PermutationPair& p, int tile,
                        const HPoint& z) {
  const double lo = std::min(tube.alpha, tube.beta);
  const double hi = std::max(tube.alpha, tube.beta);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& w : tube.lifts) {
    if (!members[static_cast<std::size_t>(p.act(tile, w))]) continue;
    best = std::min(best, distance_to_axis(lo, hi, mobius_apply(w.inverse().matrix(), z)));
  }
  return best;
}

}  // namespace

std::vector<CollarBand> collar_mass_ratio(const TileMesh& mesh, const TwistedPair& tp, const PermutationPair& p,
                                          const Eigen::VectorXd& f, double L) {
  check_shapes(mesh, tp, p, f);
  if (!(L > 0.0) || mesh.Y < 4.0 * L)
    fail(ErrorKind::InvalidBand, "collar bands need 0 < L and truncation height Y >= 4L");
  const CuspTable table = cusp_table(p);
  std::array<std::vector<int>, 3> cycle_of;
  std::vector<CollarBand> rows;
  std::array<std::size_t, 3> first{};
  for (std::size_t k = 0; k < 3; ++k) {
    first[k] = rows.size();
    cycle_of[k].assign(static_cast<std::size_t>(p.n), -1);
    const auto& cls = table.classes[k];
    for (std::size_t c = 0; c < cls.cycles.size(); ++c) {
      for (int v : cls.cycles[c]) cycle_of[k][static_cast<std::size_t>(v)] = static_cast<int>(c);
      CollarBand row;
      row.cusp = cls.name;
      row.cycle_start = cls.cycles[c].front();
      row.width = static_cast<int>(cls.cycles[c].size());
      rows.push_back(row);
    }
  }
  // Chart heights are twice the standard height y, so the bands are
  // [2L, 4L) and [4L, Y] in chart units.
  for (int v = 0; v < tp.nodes_per_tile; ++v) {
    const DeepCusp d = deepest(mesh.vertices[static_cast<std::size_t>(v)]);
    if (d.chart < 0 || d.height < 2.0 * L) continue;
    const bool upper = d.height >= 4.0 * L;
    const double m = mesh.node_mass[static_cast<std::size_t>(v)];
    for (int i = 0; i < p.n; ++i) {
      std::size_t k = 0;
      int j = i;
      switch (d.chart) {
        case 0: k = 0; break;
        case 1: k = 1; break;
        case 2: k = 2; break;
        default: k = 2; j = p.act(i, Letter::AInv); break;
      }
      auto& row = rows[first[k] + static_cast<std::size_t>(cycle_of[k][static_cast<std::size_t>(j)])];
      const double val = nodal(tp, f, i, v);
      (upper ? row.upper : row.lower) += m * val * val;
    }
  }
  for (auto& row : rows) {
    row.unbounded = row.upper == 0.0;
    row.ratio = row.unbounded ? std::numeric_limits<double>::infinity() : row.lower / row.upper;
  }
  return rows;
}

int shortest_cycle_point(const PermutationPair& p, const Word& word) {
  p.validate();
  std::vector<char> seen(static_cast<std::size_t>(p.n), 0);
  int best = -1;
  int best_len = p.n + 1;
  for (int s = 0; s < p.n; ++s) {
    if (seen[static_cast<std::size_t>(s)]) continue;
    int len = 0;
    int i = s;
    do {
      seen[static_cast<std::size_t>(i)] = 1;
      ++len;
      i = p.act(i, word);
    } while (i != s);
    if (len < best_len) {
      best_len = len;
      best = s;
    }
  }
  return best;
}

FermiTube fermi_tube(const Word& word, int cycle_point, double kappa) {
  const MobiusMatrix m = word.matrix();
  if (!m.is_hyperbolic() || m.c() == 0.0) fail(ErrorKind::Precondition, "tube word must be hyperbolic");
  if (!(kappa > 0.0)) fail(ErrorKind::Precondition, "tube width must be positive");
  FermiTube tube;
  tube.word = word.reduced();
  tube.cycle_point = cycle_point;
  const double disc = std::sqrt(m.trace() * m.trace() - 4.0);
  const double z1 = (m.a() - m.d() + disc) / (2.0 * m.c());
  const double z2 = (m.a() - m.d() - disc) / (2.0 * m.c());
  // Attracting where |(c z + d)^-2| < 1.
  const bool z1_attracts = std::abs(m.c() * z1 + m.d()) > 1.0;
  tube.beta = z1_attracts ? z1 : z2;
  tube.alpha = z1_attracts ? z2 : z1;
  const double lo = std::min(z1, z2);
  const double hi = std::max(z1, z2);

  // Sample one period of the 2 kappa band around the axis (slightly
  // overlapped) and keep every tile it visits.
  const double ell = 2.0 * std::acosh(std::abs(m.trace()) / 2.0);
  constexpr double dt = 0.004;
  constexpr int offsets = 8;
  std::set<Word> lifts;
  for (double t = -0.05; t <= ell + 0.05; t += dt) {
    for (int k = -offsets; k <= offsets; ++k) {
      const double rho = 2.0 * kappa * k / offsets;
      const Complex w = std::exp(t) * Complex(std::tanh(rho), 1.0 / std::cosh(rho));
      const Complex u = (hi * w + lo) / (w + 1.0);
      const Reduction r = reduce_to_domain(HPoint::from(u));
      lifts.insert(r.word.reduced());
    }
  }
  tube.lifts.assign(lifts.begin(), lifts.end());
  return tube;
}

double tube_distance(const FermiTube& tube, const PermutationPair& p, int tile, const HPoint& z) {
  if (tile < 0 || tile >= p.n) fail(ErrorKind::Precondition, "tile out of range");
  return tube_distance_in(tube, cycle_members(tube, p), p, tile, z);
}

CutoffReport cutoff_chain(const TileMesh& mesh, const TwistedPair& tp, const PermutationPair& p,
                          const Eigen::VectorXd& f, const FermiTube& tube, double L) {
  check_shapes(mesh, tp, p, f);
  const auto members = cycle_members(tube, p);
  const BumpFamily fam{L, L, collar_kappa(), 1.0};
  CutoffReport rep;
  Eigen::VectorXd cusp = f;
  rep.cut = f;
  // Every dof has exactly one master node; the cutoffs are functions on the
  // surface, so evaluating them there is enough.
  for (int i = 0; i < p.n; ++i) {
    for (int v = 0; v < tp.nodes_per_tile; ++v) {
      if (mesh.partner[static_cast<std::size_t>(v)] >= 0) continue;
      const HPoint& z = mesh.vertices[static_cast<std::size_t>(v)];
      const DeepCusp d = deepest(z);
      const double j0 = d.chart < 0 ? 1.0 : bump_J_complement(0.5 * d.height / L);
      const double rho = tube_distance_in(tube, members, p, i, z);
      const double js = std::isfinite(rho) ? fam.eval(Bump::JStar, {0, rho, 0.0}).value : 1.0;
      const int dof = tp.lookup(i, v).first;
      cusp[dof] *= j0;
      rep.cut[dof] *= j0 * js;
    }
  }
  const double mass = f.dot(tp.M * f);
  if (!(mass > 0.0)) fail(ErrorKind::Precondition, "cutoff chain needs a nonzero function");
  rep.rayleigh_f = rayleigh(tp, f);
  rep.rayleigh_cusp = rayleigh(tp, cusp);
  rep.rayleigh_cut = rayleigh(tp, rep.cut);
  rep.cusp_mass = cusp.dot(tp.M * cusp) / mass;
  rep.cut_mass = rep.cut.dot(tp.M * rep.cut) / mass;
  double c = std::numeric_limits<double>::infinity();
  for (const auto& row : collar_mass_ratio(mesh, tp, p, f, L)) c = std::min(c, row.ratio);
  rep.collar_min_ratio = c;
  return rep;
}

std::vector<HPoint> pretrace_sample_points() {
  return {{-0.6, 0.9}, {-0.3, 1.2}, {0.0, 1.5}, {0.2, 0.95}, {0.45, 1.7},
          {0.7, 1.1},  {-0.85, 1.4}, {0.1, 1.9}, {-0.1, 0.75}, {0.8, 0.7}};
}

std::vector<PretracePoint> pretrace_consistency(const TileMesh& mesh, const PermutationPair& p,
                                                const SpanningBasis& basis, const CoverCharacter& chi, double t,
                                                const std::vector<HPoint>& points, int modes) {
  if (!(t > 0.0) || 2.0 * t > 12.0) fail(ErrorKind::Precondition, "pre-trace kernel radius must lie in (0, 6]");
  const TwistedPair tp = assemble_twisted(mesh, p, basis, chi);
  const LowestModes eig = solve_lowest(tp, modes);
  const KernelProfile kt = KernelProfile::kt(t);
  const KernelProfile K = kernel_selfconv(kt);
  std::vector<double> H;
  for (double lam : eig.values) {
    if (lam >= 0.25) break;
    const double h = selberg_h(kt, std::sqrt(0.25 - lam), true);
    H.push_back(h * h);
  }
  std::vector<PretracePoint> out;
  for (const auto& z : points) {
    if (!in_fundamental_domain(z)) fail(ErrorKind::Precondition, "pre-trace sample point must lie in F");
    PretracePoint row;
    row.z = z;
    row.modes = static_cast<int>(H.size());
    for (std::size_t j = 0; j < H.size(); ++j) {
      const double f = evaluate(mesh, tp, eig.vectors.col(static_cast<Eigen::Index>(j)), 0, z);
      row.lhs += H[j] * f * f;
    }
    row.rhs = pretrace_rhs(z, p, basis, chi, K, 0).value;
    out.push_back(row);
  }
  return out;
}

}  // namespace hypcover
