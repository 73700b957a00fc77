#include "hypcover/graph_spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hypcover/error.hpp"
#include "hypcover/rng.hpp"
#include "tridiagonal.hpp"

namespace hypcover {

namespace {

SignedOperator from_signs(const SchreierGraph& g, const std::vector<int>& sign, bool trivial) {
  SignedOperator op;
  op.n = g.n;
  op.trivial_character = trivial;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * g.edges.size());
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const auto& e = g.edges[k];
    const double s = sign[k];
    if (e.tail == e.head) {
      trip.emplace_back(e.tail, e.tail, 2.0 * s);
    } else {
      trip.emplace_back(e.tail, e.head, s);
      trip.emplace_back(e.head, e.tail, s);
    }
  }
  op.adjacency.resize(g.n, g.n);
  op.adjacency.setFromTriplets(trip.begin(), trip.end());
  op.adjacency.makeCompressed();
  // Connectivity by union-find on the edge list.
  std::vector<int> parent(static_cast<std::size_t>(g.n));
  for (int i = 0; i < g.n; ++i) parent[static_cast<std::size_t>(i)] = i;
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  int comps = g.n;
  for (const auto& e : g.edges) {
    const int a = find(e.tail);
    const int b = find(e.head);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      --comps;
    }
  }
  op.connected = comps == 1;
  return op;
}

void project_out_constants(Eigen::VectorXd& v) { v.array() -= v.mean(); }

}  // namespace

Eigen::SparseMatrix<double> SignedOperator::laplacian() const {
  Eigen::SparseMatrix<double> id(n, n);
  id.setIdentity();
  return 4.0 * id - adjacency;
}

SignedOperator assemble_signed(const SchreierGraph& g, const SpanningBasis& basis, const CoverCharacter& chi) {
  if (basis.n != g.n || chi.size() != basis.size() || chi.basis_hash != basis.hash()) {
    fail(ErrorKind::IncompatibleCharacter, "character does not belong to this basis");
  }
  std::vector<int> sign(g.edges.size(), 1);
  for (std::size_t k = 0; k < g.edges.size(); ++k) sign[k] = edge_sign(basis, chi, static_cast<int>(k));
  return from_signs(g, sign, chi.trivial());
}

SignedOperator assemble_from_edge_signs(const SchreierGraph& g, const std::vector<int>& signs) {
  if (signs.size() != g.edges.size()) fail(ErrorKind::InvalidSize, "one sign per Schreier edge expected");
  for (int s : signs) {
    if (s != 1 && s != -1) fail(ErrorKind::InvalidConfig, "edge signs must be +1 or -1");
  }
  const bool all_plus = std::all_of(signs.begin(), signs.end(), [](int s) { return s == 1; });
  return from_signs(g, signs, all_plus);
}

EigenEstimate lanczos_bottom(const SignedOperator& op, bool remove_zero, const LanczosOptions& opts) {
  const int n = op.n;
  if (n < 1) fail(ErrorKind::InvalidSize, "empty operator");
  if (remove_zero && n == 1) fail(ErrorKind::Precondition, "nothing left after removing the zero mode");
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : 10 * n;
  // M = 9I - L = 5I + A has spectrum in [1, 9]; its top is the bottom of L.
  auto apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return 5.0 * x + op.adjacency * x; };

  Rng rng(derive_seed(opts.seed, 0x6c616e63ULL));
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.symmetric();
  if (remove_zero) project_out_constants(v);
  v.normalize();
  Eigen::VectorXd v_prev = Eigen::VectorXd::Zero(n);
  std::vector<double> alpha;
  std::vector<double> beta;
  double beta_prev = 0.0;
  EigenEstimate est;
  const int limit = std::min(max_iter, remove_zero ? n - 1 : n);
  for (int j = 0; j < max_iter; ++j) {
    Eigen::VectorXd w = apply(v) - beta_prev * v_prev;
    const double a = w.dot(v);
    w -= a * v;
    if (remove_zero) project_out_constants(w);
    alpha.push_back(a);
    const double b = w.norm();
    const int k = static_cast<int>(alpha.size());
    const bool breakdown = b <= 1e-13 * 9.0;
    const bool check = breakdown || k % opts.check_every == 0 || k >= limit || j + 1 == max_iter;
    if (check) {
      const double theta = detail::tridiag_eigenvalue(alpha, beta, k - 1);
      const auto s = detail::tridiag_eigenvector(alpha, beta, theta);
      est.value = 9.0 - theta;
      est.residual = breakdown ? 0.0 : std::abs(b * s.back());
      est.iterations = k;
      if (est.residual <= opts.tol) return est;
    }
    if (breakdown) break;
    beta.push_back(b);
    beta_prev = b;
    v_prev = v;
    v = w / b;
  }
  fail(ErrorKind::Numeric, "Lanczos did not converge: " + std::to_string(est.iterations) +
                               " iterations, residual " + std::to_string(est.residual));
}

std::optional<double> lambda1(const SignedOperator& op, const LanczosOptions& opts) {
  if (op.trivial_character) {
    if (!op.connected) fail(ErrorKind::Precondition, "trivial character needs a connected graph");
    if (op.n == 1) return std::nullopt;
    return lanczos_bottom(op, true, opts).value;
  }
  return lanczos_bottom(op, false, opts).value;
}

double bottom_eigenvalue(const SignedOperator& op, const LanczosOptions& opts) {
  return lanczos_bottom(op, false, opts).value;
}

std::optional<double> lambda1_dense(const SignedOperator& op) {
  if (op.trivial_character && !op.connected) fail(ErrorKind::Precondition, "trivial character needs a connected graph");
  const Eigen::MatrixXd L = Eigen::MatrixXd(op.laplacian());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail(ErrorKind::Numeric, "dense eigensolver failed");
  const auto& ev = es.eigenvalues();
  if (op.trivial_character) {
    if (op.n == 1) return std::nullopt;
    return ev[1];
  }
  return ev[0];
}

SpectralSeries continuity_walk(const SchreierGraph& g, const SpanningBasis& basis, const CoverCharacter& start,
                               const CoverCharacter& end, const LanczosOptions& opts) {
  const auto path = hamming_geodesic(start, end);
  SpectralSeries s;
  for (std::size_t k = 0; k < path.size(); ++k) {
    SeriesPoint pt;
    pt.step = static_cast<int>(k);
    if (k > 0) {
      for (std::size_t c = 0; c < path[k].size(); ++c) {
        if (path[k].signs[c] != path[k - 1].signs[c]) pt.flipped_edge = static_cast<int>(c);
      }
    }
    LanczosOptions o = opts;
    o.seed = derive_seed(opts.seed, k);
    pt.lambda1 = bottom_eigenvalue(assemble_signed(g, basis, path[k]), o);
    if (k > 0) s.max_step = std::max(s.max_step, std::abs(pt.lambda1 - s.points.back().lambda1));
    s.points.push_back(pt);
  }
  const auto endop = assemble_signed(g, basis, path.back());
  if (endop.trivial_character) {
    if (endop.connected) s.endpoint_gap = lambda1(endop, opts);
  } else {
    s.endpoint_gap = s.points.back().lambda1;
  }
  return s;
}

bool density_report(const SpectralSeries& s, double eta) {
  if (s.points.empty()) fail(ErrorKind::Precondition, "empty series");
  if (!(eta >= 0.0)) fail(ErrorKind::InvalidConfig, "eta must be non-negative");
  const double lo = std::min(0.0, s.points.back().lambda1);
  const double hi = std::max(0.0, s.points.back().lambda1);
  std::vector<double> v;
  for (const auto& p : s.points) v.push_back(p.lambda1);
  std::sort(v.begin(), v.end());
  // Sweep the union of [x - eta, x + eta] from lo upwards.
  double covered = lo;
  bool reached = false;  // lo itself is covered
  for (double x : v) {
    if (x + eta < covered) continue;
    if (x - eta > covered) return false;
    reached = true;
    covered = std::max(covered, x + eta);
    if (covered >= hi) return true;
  }
  return reached && covered >= hi;
}

void write_series_csv(std::ostream& os, const SpectralSeries& s) {
  os << "step,flipped_edge,lambda1\n";
  char buf[64];
  for (const auto& p : s.points) {
    std::snprintf(buf, sizeof buf, "%.12e", p.lambda1);
    os << p.step << ',' << (p.flipped_edge < 0 ? std::string("-") : std::to_string(p.flipped_edge)) << ',' << buf
       << "\n";
  }
}

}  // namespace hypcover
