#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <functional>
#include <sstream>

#include <Eigen/Dense>

#include "hypcover/error.hpp"
#include "hypcover/graph_spectra.hpp"
#include "hypcover/rng.hpp"

using namespace hypcover;

namespace {

PermutationPair connected_sample(int n, std::uint64_t seed) {
  for (std::uint64_t s = seed;; ++s) {
    auto p = sample_hom(n, s);
    if (is_connected(p)) return p;
  }
}

Eigen::VectorXd dense_spectrum(const Eigen::MatrixXd& L) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Character induced by arbitrary edge signs: product of signs around each
// fundamental cycle, walking the tree through parent edges.
CoverCharacter cycle_values(const SchreierGraph& g, const SpanningBasis& b, const std::vector<int>& signs) {
  std::vector<int> to_root(static_cast<std::size_t>(g.n), 0);
  to_root[static_cast<std::size_t>(b.root)] = 1;
  std::function<int(int)> P = [&](int v) -> int {
    if (to_root[static_cast<std::size_t>(v)] != 0) return to_root[static_cast<std::size_t>(v)];
    const int e = b.parent_edge[static_cast<std::size_t>(v)];
    const auto& ed = g.edges[static_cast<std::size_t>(e)];
    const int parent = ed.tail == v ? ed.head : ed.tail;
    return to_root[static_cast<std::size_t>(v)] = signs[static_cast<std::size_t>(e)] * P(parent);
  };
  auto c = CoverCharacter::constant(b, 1);
  for (std::size_t k = 0; k < b.size(); ++k) {
    const auto& el = b.elements[k];
    c.signs[k] = static_cast<std::int8_t>(P(el.tail) * signs[static_cast<std::size_t>(el.edge)] * P(el.head));
  }
  return c;
}

}  // namespace

TEST_CASE("assemble examples") {
  auto g1 = SchreierGraph::from(make_pair({0}, {0}));
  auto b1 = spanning_basis(g1);
  CHECK(Eigen::MatrixXd(assemble_signed(g1, b1, CoverCharacter::parse("++", b1.hash())).adjacency)(0, 0) == 4.0);
  CHECK(Eigen::MatrixXd(assemble_signed(g1, b1, CoverCharacter::parse("-+", b1.hash())).adjacency)(0, 0) == 0.0);
  auto g2 = SchreierGraph::from(make_pair({1, 0}, {1, 0}));
  auto b2 = spanning_basis(g2);
  Eigen::MatrixXd A = assemble_signed(g2, b2, CoverCharacter::constant(b2, 1)).adjacency;
  Eigen::MatrixXd want(2, 2);
  want << 0, 4, 4, 0;
  CHECK(A == want);
  auto wrong = CoverCharacter::constant(b1, 1);
  CHECK_THROWS_AS(assemble_signed(g2, b2, wrong), Error);
}

TEST_CASE("lambda1 examples") {
  auto g1 = SchreierGraph::from(make_pair({0}, {0}));
  auto b1 = spanning_basis(g1);
  CHECK_FALSE(lambda1(assemble_signed(g1, b1, CoverCharacter::constant(b1, 1))).has_value());
  CHECK(*lambda1(assemble_signed(g1, b1, CoverCharacter::parse("-+", b1.hash()))) == doctest::Approx(4.0).epsilon(1e-12));
  auto g2 = SchreierGraph::from(make_pair({1, 0}, {1, 0}));
  auto b2 = spanning_basis(g2);
  CHECK(*lambda1(assemble_signed(g2, b2, CoverCharacter::constant(b2, 1))) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(*lambda1_dense(assemble_signed(g2, b2, CoverCharacter::constant(b2, 1))) == doctest::Approx(8.0));
}

TEST_CASE("signed operator invariants") {
  auto p = connected_sample(80, 2);
  auto g = SchreierGraph::from(p);
  auto b = spanning_basis(g);
  Rng rng(4);
  auto chi = CoverCharacter::constant(b, 1);
  for (auto& s : chi.signs) s = rng.below(2) ? 1 : -1;
  Eigen::MatrixXd A = assemble_signed(g, b, chi).adjacency;
  CHECK((A - A.transpose()).cwiseAbs().maxCoeff() == 0.0);
  Eigen::MatrixXd A0 = assemble_signed(g, b, CoverCharacter::constant(b, 1)).adjacency;
  for (int i = 0; i < 80; ++i) CHECK(A0.row(i).sum() == 4.0);
  // Entries bounded by the number of parallel edges.
  CHECK((A.cwiseAbs() - A0.cwiseAbs()).maxCoeff() <= 0.0);
}

TEST_CASE("Lanczos matches the dense solver") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 20 + static_cast<int>(rng.below(181));
    auto p = connected_sample(n, 500 + static_cast<std::uint64_t>(trial));
    auto g = SchreierGraph::from(p);
    auto b = spanning_basis(g);
    auto chi = CoverCharacter::constant(b, 1);
    for (auto& s : chi.signs) s = rng.below(2) ? 1 : -1;
    auto op = assemble_signed(g, b, chi);
    LanczosOptions o;
    o.seed = static_cast<std::uint64_t>(trial);
    const double dense = dense_spectrum(Eigen::MatrixXd(op.laplacian()))[0];
    CHECK(std::abs(*lambda1(op, o) - dense) <= 1e-9);
    CHECK(std::abs(*lambda1_dense(op) - dense) <= 1e-12);
  }
  // Trivial character: spectral gap of the Schreier graph.
  for (int n : {30, 120, 200}) {
    auto p = connected_sample(n, 7);
    auto g = SchreierGraph::from(p);
    auto b = spanning_basis(g);
    auto op = assemble_signed(g, b, CoverCharacter::constant(b, 1));
    const auto ev = dense_spectrum(Eigen::MatrixXd(op.laplacian()));
    CHECK(std::abs(ev[0]) <= 1e-10);
    CHECK(std::abs(*lambda1(op) - ev[1]) <= 1e-9);
    CHECK(std::abs(bottom_eigenvalue(op)) <= 1e-9);
  }
}

TEST_CASE("gauge invariance") {
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    auto p = connected_sample(10 + 10 * trial, 40 + static_cast<std::uint64_t>(trial));
    auto g = SchreierGraph::from(p);
    auto b = spanning_basis(g);
    std::vector<int> signs(g.edges.size());
    for (auto& s : signs) s = rng.below(2) ? 1 : -1;
    const Eigen::MatrixXd L1 = assemble_from_edge_signs(g, signs).laplacian();
    // Diagonal +-1 conjugation flips the signs of edges across a vertex cut.
    Eigen::VectorXd d(g.n);
    for (int i = 0; i < g.n; ++i) d[i] = rng.below(2) ? 1.0 : -1.0;
    const Eigen::MatrixXd L2 = d.asDiagonal() * L1 * d.asDiagonal();
    std::vector<int> flipped = signs;
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
      flipped[k] *= static_cast<int>(d[g.edges[k].tail] * d[g.edges[k].head]);
    }
    const Eigen::MatrixXd L3 = assemble_from_edge_signs(g, flipped).laplacian();
    CHECK((L2 - L3).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::MatrixXd L4 = assemble_signed(g, b, cycle_values(g, b, signs)).laplacian();
    const auto s1 = dense_spectrum(L1);
    CHECK((s1 - dense_spectrum(L3)).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((s1 - dense_spectrum(L4)).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("continuity walk examples") {
  auto g1 = SchreierGraph::from(make_pair({0}, {0}));
  auto b1 = spanning_basis(g1);
  auto s = continuity_walk(g1, b1, CoverCharacter::constant(b1, 1), CoverCharacter::constant(b1, -1));
  REQUIRE(s.points.size() == 3);
  CHECK(s.points[0].lambda1 == doctest::Approx(0.0));
  CHECK(s.points[1].lambda1 == doctest::Approx(4.0));
  CHECK(s.points[2].lambda1 == doctest::Approx(8.0));
  CHECK(s.max_step == doctest::Approx(4.0));
  CHECK(density_report(s, 4.0));
  CHECK_FALSE(density_report(s, 1.0));

  auto single = continuity_walk(g1, b1, CoverCharacter::constant(b1, 1), CoverCharacter::constant(b1, 1));
  CHECK(single.points.size() == 1);
  CHECK(single.max_step == 0.0);
  CHECK(density_report(single, 0.0));
  CHECK_FALSE(single.endpoint_gap.has_value());
}

TEST_CASE("walk series invariants") {
  auto p = connected_sample(150, 3);
  auto g = SchreierGraph::from(p);
  auto b = spanning_basis(g);
  auto start = CoverCharacter::constant(b, 1);
  auto end = restrict(BaseCharacter{-1, -1}, b);
  auto s = continuity_walk(g, b, start, end);
  CHECK(static_cast<int>(s.points.size()) == hamming(start, end) + 1);
  CHECK(std::abs(s.points[0].lambda1) <= 1e-9);
  double max_step = 0.0;
  for (std::size_t k = 1; k < s.points.size(); ++k) {
    max_step = std::max(max_step, std::abs(s.points[k].lambda1 - s.points[k - 1].lambda1));
    CHECK(s.points[k].flipped_edge > s.points[k - 1].flipped_edge);
  }
  CHECK(s.max_step == max_step);
  CHECK(density_report(s, s.max_step));
  REQUIRE(s.endpoint_gap.has_value());
  CHECK(*s.endpoint_gap == s.points.back().lambda1);

  std::ostringstream csv;
  write_series_csv(csv, s);
  const std::string text = csv.str();
  CHECK(text.rfind("step,flipped_edge,lambda1\n0,-,", 0) == 0);
  std::ostringstream again;
  write_series_csv(again, continuity_walk(g, b, start, end));
  CHECK(again.str() == text);
}

TEST_CASE("non-convergence is reported") {
  auto p = connected_sample(100, 1);
  auto g = SchreierGraph::from(p);
  auto b = spanning_basis(g);
  LanczosOptions o;
  o.max_iter = 3;
  o.check_every = 1;
  try {
    lambda1(assemble_signed(g, b, restrict(BaseCharacter{-1, 1}, b)), o);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Numeric);
    CHECK(std::string(e.what()).find("iterations") != std::string::npos);
  }
}

TEST_CASE("density report") {
  SpectralSeries s;
  s.points = {{0, -1, 0.0}, {1, 0, 0.5}, {2, 1, 0.2}, {3, 2, 1.0}};
  CHECK(density_report(s, 0.25));
  CHECK_FALSE(density_report(s, 0.2));
  CHECK_THROWS_AS(density_report(SpectralSeries{}, 1.0), Error);
}
