#include "hypcover/surface_spectra.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>

#include <Eigen/Eigenvalues>
#include <Eigen/CholmodSupport>

#include "hypcover/error.hpp"
#include "hypcover/rng.hpp"
#include "hypcover/tangle.hpp"

namespace hypcover {

namespace {

using C = std::complex<double>;

// Lower boundary of the kite over [-1, 0]: the arcs |z + 1| = 1 and |z| = 1
// meeting at the triangle centre -1/2 + i sqrt(3)/2.
double kite_bottom(double x) {
  const double u = x <= -0.5 ? x + 1.0 : x;
  return std::sqrt(std::max(0.0, 1.0 - u * u));
}

// Layer s in [0, 1] interpolates log y between the arcs and the horocycle Y.
HPoint layer_point(double x, double s, double Y) {
  return {x, std::exp((1.0 - s) * std::log(kite_bottom(x)) + s * std::log(Y))};
}

double layer_length(double s, double Y) {
  constexpr int kSamples = 400;
  double len = 0.0;
  HPoint prev = layer_point(-1.0, s, Y);
  for (int j = 1; j <= kSamples; ++j) {
    const HPoint q = layer_point(-1.0 + static_cast<double>(j) / kSamples, s, Y);
    len += std::hypot(q.x - prev.x, q.y - prev.y) / (0.5 * (q.y + prev.y));
    prev = q;
  }
  return len;
}

struct Kite {
  std::vector<HPoint> pts;
  std::vector<std::array<int, 3>> tri;
  std::vector<char> top;
};

Kite mesh_kite(double h, double Y) {
  Kite k;
  const int layers = std::max(2, static_cast<int>(std::ceil(std::log(Y / kite_bottom(-0.5)) / h)));
  std::vector<std::vector<int>> rows;
  for (int r = 0; r <= layers; ++r) {
    const double s = static_cast<double>(r) / layers;
    // Even column counts keep the centre -1/2 a node on every layer.
    const int m = std::max(2, 2 * static_cast<int>(std::ceil(layer_length(s, Y) / (2.0 * h))));
    std::vector<int> row;
    for (int j = 0; j <= m; ++j) {
      const double x = j == m ? 0.0 : -1.0 + static_cast<double>(j) / m;
      row.push_back(static_cast<int>(k.pts.size()));
      k.pts.push_back(layer_point(x, s, Y));
      k.top.push_back(r == layers ? 1 : 0);
    }
    if (r == layers) {
      for (int idx : row) k.pts[static_cast<std::size_t>(idx)].y = Y;
    }
    rows.push_back(std::move(row));
  }
  auto P = [&](int idx) { return k.pts[static_cast<std::size_t>(idx)]; };
  auto dist2 = [&](int a, int b) {
    const HPoint p = P(a);
    const HPoint q = P(b);
    return (p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y);
  };
  // Zip consecutive rows together.
  for (int r = 0; r < layers; ++r) {
    const auto& lo = rows[static_cast<std::size_t>(r)];
    const auto& up = rows[static_cast<std::size_t>(r + 1)];
    const std::size_t ma = lo.size() - 1;
    const std::size_t mb = up.size() - 1;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ma || j < mb) {
      bool lower;
      if (i == ma) {
        lower = false;
      } else if (j == mb) {
        lower = true;
      } else {
        const double xl = P(lo[i + 1]).x;
        const double xu = P(up[j + 1]).x;
        if (std::abs(xl - xu) < 1e-12) {
          lower = dist2(lo[i + 1], up[j]) <= dist2(lo[i], up[j + 1]);
        } else {
          lower = xl < xu;
        }
      }
      if (lower) {
        k.tri.push_back({lo[i], lo[i + 1], up[j]});
        ++i;
      } else {
        k.tri.push_back({lo[i], up[j + 1], up[j]});
        ++j;
      }
    }
  }
  return k;
}

struct PointIndex {
  double cell;
  std::unordered_map<std::uint64_t, std::vector<int>> buckets;

  static std::uint64_t key(long long a, long long b) {
    return (static_cast<std::uint64_t>(a) * 0x9E3779B97F4A7C15ULL) ^ static_cast<std::uint64_t>(b);
  }
  void insert(const HPoint& p, int id) {
    buckets[key(std::llround(p.x / cell), std::llround(p.y / cell))].push_back(id);
  }
  // Nearest stored point within `radius` (<= cell), or -1.
  int find(const std::vector<HPoint>& pts, const HPoint& p, double radius) const {
    const long long cx = std::llround(p.x / cell);
    const long long cy = std::llround(p.y / cell);
    int best = -1;
    double bd = radius;
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        const auto it = buckets.find(key(cx + dx, cy + dy));
        if (it == buckets.end()) continue;
        for (int id : it->second) {
          const HPoint q = pts[static_cast<std::size_t>(id)];
          const double d = std::hypot(q.x - p.x, q.y - p.y);
          if (d <= bd) {
            bd = d;
            best = id;
          }
        }
      }
    }
    return best;
  }
};

HPoint to_point(C z) { return {z.real(), z.imag()}; }
C to_c(const HPoint& p) { return {p.x, p.y}; }

double triangle_area(const HPoint& a, const HPoint& b, const HPoint& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double min_angle(const HPoint& a, const HPoint& b, const HPoint& c) {
  auto ang = [](const HPoint& p, const HPoint& q, const HPoint& r) {
    const double ux = q.x - p.x, uy = q.y - p.y, vx = r.x - p.x, vy = r.y - p.y;
    return std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
  };
  return std::min({ang(a, b, c), ang(b, c, a), ang(c, a, b)}) * 180.0 / std::numbers::pi;
}

void compute_masses(TileMesh& m) {
  m.node_mass.assign(m.vertices.size(), 0.0);
  for (const auto& t : m.triangles) {
    const double A = triangle_area(m.vertices[static_cast<std::size_t>(t[0])], m.vertices[static_cast<std::size_t>(t[1])],
                                   m.vertices[static_cast<std::size_t>(t[2])]);
    for (int v : t) {
      const double y = m.vertices[static_cast<std::size_t>(v)].y;
      m.node_mass[static_cast<std::size_t>(v)] += A / (3.0 * y * y);
    }
  }
}

}  // namespace

double TileMesh::area() const {
  double a = 0.0;
  for (double w : node_mass) a += w;
  return a;
}

TileMesh build_tile_mesh(double h, double Y) {
  if (!(h > 0.0) || h > 0.2) fail(ErrorKind::Mesh, "mesh size h must lie in (0, 0.2]");
  if (!(Y >= 4.0)) fail(ErrorKind::Mesh, "truncation height Y must be >= 4");
  const Kite kite = mesh_kite(h, Y);
  // The six kites: identity, the order-3 rotation R of the triangle
  // (-1, 0, oo) and its square, and their translates by 1.
  const std::array<std::function<C(C)>, 6> maps = {
      [](C z) { return z; },
      [](C z) { return -1.0 / (z + 1.0); },
      [](C z) { return -(z + 1.0) / z; },
      [](C z) { return z + 1.0; },
      [](C z) { return -1.0 / (z + 1.0) + 1.0; },
      [](C z) { return -(z + 1.0) / z + 1.0; },
  };
  TileMesh m;
  m.h = h;
  m.Y = Y;
  PointIndex index{1e-7, {}};
  std::vector<char> horo;
  for (const auto& f : maps) {
    std::vector<int> local(kite.pts.size());
    for (std::size_t v = 0; v < kite.pts.size(); ++v) {
      const HPoint q = to_point(f(to_c(kite.pts[v])));
      int id = index.find(m.vertices, q, 1e-9);
      if (id < 0) {
        id = static_cast<int>(m.vertices.size());
        m.vertices.push_back(q);
        horo.push_back(kite.top[v]);
        index.insert(q, id);
      }
      local[v] = id;
    }
    // Orientation-preserving maps keep the triangles counter-clockwise.
    for (const auto& t : kite.tri) {
      m.triangles.push_back({local[static_cast<std::size_t>(t[0])], local[static_cast<std::size_t>(t[1])],
                             local[static_cast<std::size_t>(t[2])]});
    }
  }
  const std::size_t nv = m.vertices.size();
  m.tags.assign(nv, 0);
  m.partner.assign(nv, -1);
  constexpr double kSideTol = 1e-9;
  for (std::size_t v = 0; v < nv; ++v) {
    const HPoint z = m.vertices[v];
    std::uint8_t t = horo[v] ? kHorocycle : 0;
    if (std::abs(z.x + 1.0) < kSideTol) t |= kALeft;
    if (std::abs(z.x - 1.0) < kSideTol) t |= kARight;
    if (std::abs(std::hypot(z.x + 0.5, z.y) - 0.5) < kSideTol) t |= kBLeft;
    if (std::abs(std::hypot(z.x - 0.5, z.y) - 0.5) < kSideTol) t |= kBRight;
    m.tags[v] = t;
  }
  // Partners: a^-1 z = z - 2 and b^-1 z = z / (1 - 2z).
  PointIndex left{1e-7, {}};
  for (std::size_t v = 0; v < nv; ++v) {
    if (m.tags[v] & (kALeft | kBLeft)) left.insert(m.vertices[v], static_cast<int>(v));
  }
  for (std::size_t v = 0; v < nv; ++v) {
    const std::uint8_t t = m.tags[v];
    if (!(t & (kARight | kBRight))) continue;
    const C z = to_c(m.vertices[v]);
    const bool side_a = (t & kARight) != 0;
    const C pre = side_a ? z - 2.0 : z / (1.0 - 2.0 * z);
    const int id = left.find(m.vertices, to_point(pre), 1e-7);
    if (id < 0 || !(m.tags[static_cast<std::size_t>(id)] & (side_a ? kALeft : kBLeft))) {
      std::ostringstream os;
      os << "no paired node for the " << (side_a ? "a" : "b") << "-side vertex at (" << z.real() << ", " << z.imag()
         << ")";
      fail(ErrorKind::Mesh, os.str());
    }
    m.partner[v] = id;
    const C l = to_c(m.vertices[static_cast<std::size_t>(id)]);
    const C img = side_a ? l + 2.0 : l / (2.0 * l + 1.0);
    m.pairing_error = std::max(m.pairing_error, std::abs(img - z));
  }
  std::size_t lefts = 0;
  std::size_t rights = 0;
  for (std::size_t v = 0; v < nv; ++v) {
    if (m.tags[v] & (kALeft | kBLeft)) ++lefts;
    if (m.partner[v] >= 0) ++rights;
  }
  if (lefts != rights) fail(ErrorKind::Mesh, "paired sides carry different node counts");
  m.min_angle_deg = 180.0;
  for (const auto& t : m.triangles) {
    const HPoint& a = m.vertices[static_cast<std::size_t>(t[0])];
    const HPoint& b = m.vertices[static_cast<std::size_t>(t[1])];
    const HPoint& c = m.vertices[static_cast<std::size_t>(t[2])];
    if (!(triangle_area(a, b, c) > 0.0)) fail(ErrorKind::Mesh, "degenerate or inverted triangle");
    const double ang = min_angle(a, b, c);
    if (ang < 20.0) {
      std::ostringstream os;
      os << "element quality below 20 degrees near (" << (a.x + b.x + c.x) / 3.0 << ", " << (a.y + b.y + c.y) / 3.0
         << ")";
      fail(ErrorKind::Mesh, os.str());
    }
    m.min_angle_deg = std::min(m.min_angle_deg, ang);
  }
  compute_masses(m);
  return m;
}

void write_mesh(std::ostream& os, const TileMesh& m) {
  char buf[96];
  os << "hypcover-mesh v1\n";
  std::snprintf(buf, sizeof buf, "h %.17g Y %.17g\n", m.h, m.Y);
  os << buf << "vertices " << m.vertices.size() << "\n";
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %d %d\n", m.vertices[v].x, m.vertices[v].y,
                  static_cast<int>(m.tags[v]), m.partner[v]);
    os << buf;
  }
  os << "triangles " << m.triangles.size() << "\n";
  for (const auto& t : m.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << "\n";
}

TileMesh read_mesh(std::istream& is) {
  auto bad = [](const std::string& what) { fail(ErrorKind::Io, "mesh snapshot: " + what); };
  std::string line;
  if (!std::getline(is, line) || line != "hypcover-mesh v1") bad("missing header");
  TileMesh m;
  std::string k1, k2;
  std::size_t count = 0;
  if (!(is >> k1 >> m.h >> k2 >> m.Y) || k1 != "h" || k2 != "Y") bad("missing h/Y line");
  if (!(is >> k1 >> count) || k1 != "vertices") bad("missing vertex count");
  m.vertices.resize(count);
  m.tags.resize(count);
  m.partner.resize(count);
  for (std::size_t v = 0; v < count; ++v) {
    int tag = 0;
    if (!(is >> m.vertices[v].x >> m.vertices[v].y >> tag >> m.partner[v])) bad("truncated vertex list");
    m.tags[v] = static_cast<std::uint8_t>(tag);
  }
  if (!(is >> k1 >> count) || k1 != "triangles") bad("missing triangle count");
  m.triangles.resize(count);
  for (auto& t : m.triangles) {
    if (!(is >> t[0] >> t[1] >> t[2])) bad("truncated triangle list");
    for (int v : t) {
      if (v < 0 || static_cast<std::size_t>(v) >= m.vertices.size()) bad("triangle index out of range");
    }
  }
  m.min_angle_deg = 180.0;
  for (const auto& t : m.triangles) {
    m.min_angle_deg = std::min(m.min_angle_deg, min_angle(m.vertices[static_cast<std::size_t>(t[0])],
                                                          m.vertices[static_cast<std::size_t>(t[1])],
                                                          m.vertices[static_cast<std::size_t>(t[2])]));
  }
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    const int l = m.partner[v];
    if (l < 0) continue;
    const C z = to_c(m.vertices[v]);
    const C lz = to_c(m.vertices[static_cast<std::size_t>(l)]);
    const C img = (m.tags[v] & kARight) ? lz + 2.0 : lz / (2.0 * lz + 1.0);
    m.pairing_error = std::max(m.pairing_error, std::abs(img - z));
  }
  compute_masses(m);
  return m;
}

TwistedPair assemble_twisted(const TileMesh& mesh, const PermutationPair& p, const SpanningBasis& basis,
                             const CoverCharacter& chi, int threads) {
  p.validate();
  if (!is_connected(p)) fail(ErrorKind::NotConnected, "FEM assembly needs a connected cover");
  if (basis.n != p.n || chi.size() != basis.size() || chi.basis_hash != basis.hash()) {
    fail(ErrorKind::IncompatibleCharacter, "character does not belong to this basis");
  }
  const int nv = static_cast<int>(mesh.vertices.size());
  if (nv == 0 || mesh.partner.size() != mesh.vertices.size() || mesh.node_mass.size() != mesh.vertices.size()) {
    fail(ErrorKind::Assembly, "mesh is incomplete");
  }
  TwistedPair tp;
  tp.n = p.n;
  tp.nodes_per_tile = nv;
  tp.trivial_character = chi.trivial();
  std::vector<int> master(static_cast<std::size_t>(nv), -1);
  int nm = 0;
  for (int v = 0; v < nv; ++v) {
    if (mesh.partner[static_cast<std::size_t>(v)] < 0) master[static_cast<std::size_t>(v)] = nm++;
  }
  for (int v = 0; v < nv; ++v) {
    const int l = mesh.partner[static_cast<std::size_t>(v)];
    if (l >= 0 && master[static_cast<std::size_t>(l)] < 0) fail(ErrorKind::Assembly, "pairing chains are not allowed");
  }
  tp.dofs_per_tile = nm;
  const std::size_t total_nodes = static_cast<std::size_t>(p.n) * static_cast<std::size_t>(nv);
  tp.node_dof.resize(total_nodes);
  tp.node_coef.resize(total_nodes);
  for (int i = 0; i < p.n; ++i) {
    const int sa = edge_sign(basis, chi, SchreierGraph::edge_index(i, Letter::A));
    const int sb = edge_sign(basis, chi, SchreierGraph::edge_index(i, Letter::B));
    const int ja = p.act(i, Letter::A);
    const int jb = p.act(i, Letter::B);
    for (int v = 0; v < nv; ++v) {
      const std::size_t k = static_cast<std::size_t>(i) * static_cast<std::size_t>(nv) + static_cast<std::size_t>(v);
      const int l = mesh.partner[static_cast<std::size_t>(v)];
      if (l < 0) {
        tp.node_dof[k] = i * nm + master[static_cast<std::size_t>(v)];
        tp.node_coef[k] = 1;
      } else {
        const bool side_a = (mesh.tags[static_cast<std::size_t>(v)] & kARight) != 0;
        tp.node_dof[k] = (side_a ? ja : jb) * nm + master[static_cast<std::size_t>(l)];
        tp.node_coef[k] = static_cast<std::int8_t>(side_a ? sa : sb);
      }
    }
  }
  // Euclidean P1 stiffness per triangle, shared by all tiles.
  const std::size_t nt = mesh.triangles.size();
  std::vector<std::array<double, 9>> ke(nt);
  for (std::size_t e = 0; e < nt; ++e) {
    const auto& t = mesh.triangles[e];
    std::array<double, 3> bx{};
    std::array<double, 3> cy{};
    const HPoint P[3] = {mesh.vertices[static_cast<std::size_t>(t[0])], mesh.vertices[static_cast<std::size_t>(t[1])],
                         mesh.vertices[static_cast<std::size_t>(t[2])]};
    for (int a = 0; a < 3; ++a) {
      const HPoint& q = P[(a + 1) % 3];
      const HPoint& r = P[(a + 2) % 3];
      bx[static_cast<std::size_t>(a)] = q.y - r.y;
      cy[static_cast<std::size_t>(a)] = r.x - q.x;
    }
    const double A = triangle_area(P[0], P[1], P[2]);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        ke[e][static_cast<std::size_t>(3 * a + b)] =
            (bx[static_cast<std::size_t>(a)] * bx[static_cast<std::size_t>(b)] +
             cy[static_cast<std::size_t>(a)] * cy[static_cast<std::size_t>(b)]) /
            (4.0 * A);
      }
    }
  }
  const int nthreads = std::max(1, std::min(threads, p.n));
  std::vector<std::vector<Eigen::Triplet<double>>> parts(static_cast<std::size_t>(p.n));
  auto work = [&](int first) {
    for (int i = first; i < p.n; i += nthreads) {
      auto& trip = parts[static_cast<std::size_t>(i)];
      trip.reserve(9 * nt);
      for (std::size_t e = 0; e < nt; ++e) {
        const auto& t = mesh.triangles[e];
        for (int a = 0; a < 3; ++a) {
          const auto [da, ca] = tp.lookup(i, t[static_cast<std::size_t>(a)]);
          for (int b = 0; b < 3; ++b) {
            const auto [db, cb] = tp.lookup(i, t[static_cast<std::size_t>(b)]);
            trip.emplace_back(da, db, ca * cb * ke[e][static_cast<std::size_t>(3 * a + b)]);
          }
        }
      }
    }
  };
  if (nthreads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  std::vector<Eigen::Triplet<double>> all;
  for (auto& part : parts) all.insert(all.end(), part.begin(), part.end());
  const int N = p.n * nm;
  tp.S.resize(N, N);
  tp.S.setFromTriplets(all.begin(), all.end());
  tp.S.makeCompressed();
  std::vector<double> mass(static_cast<std::size_t>(N), 0.0);
  for (int i = 0; i < p.n; ++i) {
    for (int v = 0; v < nv; ++v) mass[static_cast<std::size_t>(tp.lookup(i, v).first)] += mesh.node_mass[static_cast<std::size_t>(v)];
  }
  std::vector<Eigen::Triplet<double>> md;
  for (int d = 0; d < N; ++d) md.emplace_back(d, d, mass[static_cast<std::size_t>(d)]);
  tp.M.resize(N, N);
  tp.M.setFromTriplets(md.begin(), md.end());
  tp.M.makeCompressed();
  return tp;
}

namespace {

using Factor = Eigen::CholmodSupernodalLLT<Eigen::SparseMatrix<double>>;

// The sparsity pattern depends only on the mesh and the cover, so a walk
// analyzes it once and refactorizes per character.
LowestModes solve_with(const TwistedPair& tp, int k, const FemSolverOptions& opts, Factor& llt, bool analyzed) {
  const int N = tp.size();
  if (k < 1) fail(ErrorKind::Precondition, "k must be >= 1");
  if (k > N) fail(ErrorKind::Precondition, "k exceeds the number of degrees of freedom");
  if (!(opts.shift < 0.0)) fail(ErrorKind::InvalidConfig, "the shift must be negative");
  const Eigen::VectorXd mdiag = tp.M.diagonal();
  const Eigen::SparseMatrix<double> A = tp.S - opts.shift * tp.M;
  if (!analyzed) llt.analyzePattern(A);
  llt.factorize(A);
  if (llt.info() != Eigen::Success) fail(ErrorKind::Numeric, "factorization of S - sigma M failed");
  const int p = std::min(N, k + std::max(8, k));
  Rng rng(derive_seed(opts.seed, 0x66656dULL));
  Eigen::MatrixXd X(N, p);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < N; ++i) X(i, j) = rng.symmetric();
  }
  // M-orthonormalize the columns (modified Gram-Schmidt, two passes).
  auto orthonormalize = [&](Eigen::MatrixXd& Q) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < Q.cols(); ++j) {
        for (int i = 0; i < j; ++i) {
          const double c = Q.col(i).dot(mdiag.cwiseProduct(Q.col(j)));
          Q.col(j) -= c * Q.col(i);
        }
        const double nrm = std::sqrt(Q.col(j).dot(mdiag.cwiseProduct(Q.col(j))));
        if (!(nrm > 1e-300)) fail(ErrorKind::Numeric, "subspace collapsed");
        Q.col(j) /= nrm;
      }
    }
  };
  orthonormalize(X);
  LowestModes out;
  for (int it = 1; it <= opts.max_steps; ++it) {
    Eigen::MatrixXd Yb = llt.solve(Eigen::MatrixXd(mdiag.asDiagonal() * X));
    orthonormalize(Yb);
    const Eigen::MatrixXd SY = tp.S * Yb;
    Eigen::MatrixXd R = Yb.transpose() * SY;
    R = 0.5 * (R + R.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
    X = Yb * es.eigenvectors();
    const Eigen::MatrixXd SX = SY * es.eigenvectors();
    out.values.clear();
    out.residuals.clear();
    bool done = true;
    for (int j = 0; j < k; ++j) {
      const double lam = es.eigenvalues()[j];
      const Eigen::VectorXd mx = mdiag.cwiseProduct(X.col(j));
      const double res = (SX.col(j) - lam * mx).norm() / mx.norm();
      out.values.push_back(lam);
      out.residuals.push_back(res);
      done = done && res <= opts.tol;
    }
    out.steps = it;
    if (done) break;
  }
  const double worst = *std::max_element(out.residuals.begin(), out.residuals.end());
  if (!(worst <= 1e-7)) {
    fail(ErrorKind::Numeric, "FEM eigensolver did not converge: " + std::to_string(out.steps) + " iterations, residual " +
                                 std::to_string(worst));
  }
  out.vectors = X.leftCols(k);
  return out;
}

}  // namespace

LowestModes solve_lowest(const TwistedPair& tp, int k, const FemSolverOptions& opts) {
  Factor llt;
  return solve_with(tp, k, opts, llt, false);
}

std::vector<double> solve_dense(const TwistedPair& tp, int k) {
  const int N = tp.size();
  if (k < 1 || k > N) fail(ErrorKind::Precondition, "k out of range");
  if (N > 6000) fail(ErrorKind::Precondition, "dense solve limited to 6000 degrees of freedom");
  const Eigen::MatrixXd S = Eigen::MatrixXd(tp.S);
  const Eigen::MatrixXd M = Eigen::MatrixXd(tp.M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(S, M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail(ErrorKind::Numeric, "dense generalized eigensolver failed");
  std::vector<double> out;
  for (int j = 0; j < k; ++j) out.push_back(es.eigenvalues()[j]);
  return out;
}

double rayleigh(const TwistedPair& tp, const Eigen::VectorXd& v) {
  if (v.size() != tp.size()) fail(ErrorKind::InvalidSize, "vector size does not match the assembly");
  const double den = v.dot(tp.M * v);
  if (!(den > 0.0)) fail(ErrorKind::Precondition, "Rayleigh quotient of the zero vector");
  return v.dot(tp.S * v) / den;
}

double evaluate(const TileMesh& mesh, const TwistedPair& tp, const Eigen::VectorXd& v, int tile, const HPoint& z) {
  if (tile < 0 || tile >= tp.n) fail(ErrorKind::InvalidSize, "tile index out of range");
  for (const auto& t : mesh.triangles) {
    const HPoint& a = mesh.vertices[static_cast<std::size_t>(t[0])];
    const HPoint& b = mesh.vertices[static_cast<std::size_t>(t[1])];
    const HPoint& c = mesh.vertices[static_cast<std::size_t>(t[2])];
    const double A = triangle_area(a, b, c);
    const double l0 = triangle_area(z, b, c) / A;
    const double l1 = triangle_area(a, z, c) / A;
    const double l2 = 1.0 - l0 - l1;
    constexpr double eps = -1e-12;
    if (l0 < eps || l1 < eps || l2 < eps) continue;
    double val = 0.0;
    const double w[3] = {l0, l1, l2};
    for (int q = 0; q < 3; ++q) {
      const auto [d, cf] = tp.lookup(tile, t[static_cast<std::size_t>(q)]);
      val += w[q] * cf * v[d];
    }
    return val;
  }
  fail(ErrorKind::Precondition, "point lies outside the mesh");
}

SpectralSeries fem_continuity_walk(const TileMesh& mesh, const PermutationPair& p, const SpanningBasis& basis,
                                   const CoverCharacter& start, const CoverCharacter& end, const FemSolverOptions& opts,
                                   int threads) {
  if (!is_connected(p)) fail(ErrorKind::NotConnected, "FEM walk needs a connected cover");
  const auto g = SchreierGraph::from(p);
  if (!certify_gtf_graph(g, gtf_radius(p.n), threads).pass) {
    fail(ErrorKind::Precondition, "cover is not certified tangle-free at the default radius");
  }
  const auto path = hamming_geodesic(start, end);
  SpectralSeries s;
  Factor llt;
  bool analyzed = false;
  for (std::size_t k = 0; k < path.size(); ++k) {
    SeriesPoint pt;
    pt.step = static_cast<int>(k);
    if (k > 0) {
      for (std::size_t c = 0; c < path[k].size(); ++c) {
        if (path[k].signs[c] != path[k - 1].signs[c]) pt.flipped_edge = static_cast<int>(c);
      }
    }
    FemSolverOptions o = opts;
    o.seed = derive_seed(opts.seed, k);
    pt.lambda1 = solve_with(assemble_twisted(mesh, p, basis, path[k], threads), 1, o, llt, analyzed).values[0];
    analyzed = true;
    if (k > 0) s.max_step = std::max(s.max_step, std::abs(pt.lambda1 - s.points.back().lambda1));
    s.points.push_back(pt);
  }
  if (path.back().trivial()) {
    if (p.n * static_cast<int>(mesh.vertices.size()) > 1) {
      FemSolverOptions o = opts;
      o.seed = derive_seed(opts.seed, path.size());
      s.endpoint_gap = solve_with(assemble_twisted(mesh, p, basis, path.back(), threads), 2, o, llt, analyzed).values[1];
    }
  } else {
    s.endpoint_gap = s.points.back().lambda1;
  }
  return s;
}

void write_eigen_csv(std::ostream& os, const LowestModes& modes) {
  os << "index,lambda,residual\n";
  char buf[96];
  for (std::size_t j = 0; j < modes.values.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%zu,%.12e,%.6e\n", j, modes.values[j], modes.residuals[j]);
    os << buf;
  }
}

}  // namespace hypcover
