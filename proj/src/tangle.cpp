#include "hypcover/tangle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "json.hpp"

#include "hypcover/error.hpp"
#include "hypcover/fixpoints.hpp"
#include "hypcover/rng.hpp"

namespace hypcover {

namespace {

// Incident edge lists (each edge once per endpoint, loops once).
struct Adjacency {
  std::vector<std::vector<int>> incident;

  explicit Adjacency(const SchreierGraph& g) : incident(static_cast<std::size_t>(g.n)) {
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
      const auto& e = g.edges[k];
      incident[static_cast<std::size_t>(e.tail)].push_back(static_cast<int>(k));
      if (e.head != e.tail) incident[static_cast<std::size_t>(e.head)].push_back(static_cast<int>(k));
    }
  }
};

// Scratch buffers reused across balls; `mark` holds BFS distance + 1.
struct BallScratch {
  std::vector<int> mark;
  explicit BallScratch(int n) : mark(static_cast<std::size_t>(n), 0) {}
};

Ball ball_with(const SchreierGraph& g, const Adjacency& adj, BallScratch& s, int v, int rho) {
  Ball b;
  b.vertices.push_back(v);
  s.mark[static_cast<std::size_t>(v)] = 1;
  for (std::size_t k = 0; k < b.vertices.size(); ++k) {
    const int u = b.vertices[k];
    const int d = s.mark[static_cast<std::size_t>(u)] - 1;
    if (d == rho) continue;
    for (int e : adj.incident[static_cast<std::size_t>(u)]) {
      const auto& ed = g.edges[static_cast<std::size_t>(e)];
      const int w = ed.tail == u ? ed.head : ed.tail;
      if (s.mark[static_cast<std::size_t>(w)] == 0) {
        s.mark[static_cast<std::size_t>(w)] = d + 2;
        b.vertices.push_back(w);
      }
    }
  }
  // Induced edges: every edge out of a ball vertex whose head is inside.
  for (int u : b.vertices) {
    for (int l = 0; l < 2; ++l) {
      const int e = 2 * u + l;
      if (s.mark[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].head)] != 0) b.edges.push_back(e);
    }
  }
  std::sort(b.edges.begin(), b.edges.end());
  for (int u : b.vertices) s.mark[static_cast<std::size_t>(u)] = 0;
  return b;
}

int ball_rank(const SchreierGraph& g, const Adjacency& adj, BallScratch& s, int v, int rho) {
  const Ball b = ball_with(g, adj, s, v, rho);
  // A ball is connected, so components = 1.
  return static_cast<int>(b.edges.size()) - static_cast<int>(b.vertices.size()) + 1;
}

}  // namespace

std::string GtfReport::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["rho"] = rho;
  j["pass"] = pass;
  j["witnesses"] = nlohmann::json::array();
  for (const auto& w : witnesses) j["witnesses"].push_back({{"vertex", w.vertex}, {"cycle_rank", w.cycle_rank}});
  return j.dump();
}

Ball induced_ball(const SchreierGraph& g, int v, int rho) {
  if (v < 0 || v >= g.n) fail(ErrorKind::Precondition, "ball center out of range");
  if (rho < 0) fail(ErrorKind::Precondition, "rho must be non-negative");
  const Adjacency adj(g);
  BallScratch s(g.n);
  return ball_with(g, adj, s, v, rho);
}

int cycle_rank_by_counting(const SchreierGraph& g, const Ball& b) {
  // Components by union-find over the listed edges; independent of BFS.
  std::vector<int> idx(static_cast<std::size_t>(g.n), -1);
  for (std::size_t k = 0; k < b.vertices.size(); ++k) idx[static_cast<std::size_t>(b.vertices[k])] = static_cast<int>(k);
  std::vector<int> parent(b.vertices.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  int components = static_cast<int>(b.vertices.size());
  for (int e : b.edges) {
    const int x = find(idx[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].tail)]);
    const int y = find(idx[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].head)]);
    if (x != y) {
      parent[static_cast<std::size_t>(x)] = y;
      --components;
    }
  }
  return static_cast<int>(b.edges.size()) - static_cast<int>(b.vertices.size()) + components;
}

int cycle_rank_by_forest(const SchreierGraph& g, const Ball& b) {
  // Grow a spanning forest by DFS; count edges not used by it.
  std::vector<int> seen(static_cast<std::size_t>(g.n), 0);
  std::vector<char> used(b.edges.size(), 0);
  std::vector<std::vector<std::size_t>> inc(static_cast<std::size_t>(g.n));
  for (std::size_t k = 0; k < b.edges.size(); ++k) {
    const auto& e = g.edges[static_cast<std::size_t>(b.edges[k])];
    inc[static_cast<std::size_t>(e.tail)].push_back(k);
    inc[static_cast<std::size_t>(e.head)].push_back(k);
  }
  int forest = 0;
  for (int root : b.vertices) {
    if (seen[static_cast<std::size_t>(root)]) continue;
    seen[static_cast<std::size_t>(root)] = 1;
    std::vector<int> stack{root};
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (std::size_t k : inc[static_cast<std::size_t>(u)]) {
        const auto& e = g.edges[static_cast<std::size_t>(b.edges[k])];
        const int w = e.tail == u ? e.head : e.tail;
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          used[k] = 1;
          ++forest;
          stack.push_back(w);
        }
      }
    }
  }
  return static_cast<int>(b.edges.size()) - forest;
}

int gtf_radius(int n, double c_g) {
  if (n < 1) fail(ErrorKind::InvalidSize, "n must be positive");
  if (!(c_g >= 0.0)) fail(ErrorKind::InvalidConfig, "c_g must be non-negative");
  // Small guard so exact powers of two are not lost to rounding. Radius 0
  // balls carry no edges, so the certificate starts at radius 1.
  const int r = static_cast<int>(std::floor(c_g * std::log2(static_cast<double>(n)) + 1e-12));
  return std::max(1, r);
}

GtfReport certify_gtf_graph(const SchreierGraph& g, int rho, int threads) {
  if (rho < 0) fail(ErrorKind::Precondition, "rho must be non-negative");
  const Adjacency adj(g);
  std::vector<int> rank(static_cast<std::size_t>(g.n), 0);
  const int workers = std::max(1, std::min(threads, g.n));
  auto run = [&](int w) {
    BallScratch s(g.n);
    for (int v = w; v < g.n; v += workers) rank[static_cast<std::size_t>(v)] = ball_rank(g, adj, s, v, rho);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  GtfReport r;
  r.n = g.n;
  r.rho = rho;
  for (int v = 0; v < g.n; ++v) {
    if (rank[static_cast<std::size_t>(v)] > 1) r.witnesses.push_back({v, rank[static_cast<std::size_t>(v)]});
  }
  r.pass = r.witnesses.empty();
  return r;
}

std::vector<ShortPair> enumerate_short_pairs(double r, const HPoint& o, const LatticeOptions& opts) {
  if (!(r >= 0.0)) fail(ErrorKind::Precondition, "r must be non-negative");
  const auto ball = lattice_ball(o, r, opts);
  std::vector<Word> elems;
  for (const auto& e : ball) {
    if (!e.word.empty()) elems.push_back(e.word);
  }
  std::vector<ShortPair> out;
  for (std::size_t i = 0; i < elems.size(); ++i) {
    for (std::size_t j = i + 1; j < elems.size(); ++j) {
      if (stallings_fold({elems[i], elems[j]}).rank() == 2) out.push_back({elems[i], elems[j], r});
    }
  }
  return out;
}

std::vector<CommonFixedPoint> scan_common_fixed_points(const PermutationPair& p, const std::vector<ShortPair>& pairs) {
  std::vector<CommonFixedPoint> out;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    for (int i = 0; i < p.n; ++i) {
      if (p.act(i, pairs[k].g1) == i && p.act(i, pairs[k].g2) == i) out.push_back({k, i});
    }
  }
  return out;
}

ShortPair failure_witness_pair(const PermutationPair& p, int v, int rho) {
  const auto g = SchreierGraph::from(p);
  const Ball b = induced_ball(g, v, rho);
  // BFS tree inside the ball from v, recording the word of each tree path.
  std::vector<int> pos(static_cast<std::size_t>(g.n), -1);
  for (std::size_t k = 0; k < b.vertices.size(); ++k) pos[static_cast<std::size_t>(b.vertices[k])] = static_cast<int>(k);
  std::vector<Word> path(b.vertices.size());
  std::vector<char> reached(b.vertices.size(), 0);
  std::vector<char> tree(b.edges.size(), 0);
  reached[0] = 1;
  std::vector<int> queue{v};
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const int u = queue[q];
    for (std::size_t k = 0; k < b.edges.size(); ++k) {
      const auto& e = g.edges[static_cast<std::size_t>(b.edges[k])];
      int w = -1;
      Letter step = e.label;
      if (e.tail == u) {
        w = e.head;
      } else if (e.head == u) {
        w = e.tail;
        step = inverse(e.label);
      }
      if (w < 0 || reached[static_cast<std::size_t>(pos[static_cast<std::size_t>(w)])]) continue;
      const auto pw = static_cast<std::size_t>(pos[static_cast<std::size_t>(w)]);
      reached[pw] = 1;
      tree[k] = 1;
      path[pw] = path[static_cast<std::size_t>(pos[static_cast<std::size_t>(u)])];
      path[pw].push_back(step);
      queue.push_back(w);
    }
  }
  std::vector<Word> loops;
  for (std::size_t k = 0; k < b.edges.size() && loops.size() < 2; ++k) {
    if (tree[k]) continue;
    const auto& e = g.edges[static_cast<std::size_t>(b.edges[k])];
    loops.push_back((path[static_cast<std::size_t>(pos[static_cast<std::size_t>(e.tail)])] * Word::single(e.label) *
                     path[static_cast<std::size_t>(pos[static_cast<std::size_t>(e.head)])].inverse())
                        .reduced());
  }
  if (loops.size() < 2) fail(ErrorKind::Precondition, "ball is not tangled at this vertex");
  ShortPair sp{loops[0], loops[1], 0.0};
  const HPoint o{0.0, 1.0};
  for (const auto& w : loops) sp.r = std::max(sp.r, hyp_distance(o, mobius_apply(w.matrix(), o)));
  return sp;
}

TangleTrend tangle_probability_trend(const std::vector<int>& n_list, int seeds, double c_g, std::uint64_t base_seed,
                                     int threads) {
  if (seeds < 1) fail(ErrorKind::InvalidConfig, "seeds must be positive");
  for (std::size_t k = 1; k < n_list.size(); ++k) {
    if (n_list[k] <= n_list[k - 1]) fail(ErrorKind::Precondition, "n_list must be increasing");
  }
  TangleTrend t;
  for (int n : n_list) {
    TrendRow row;
    row.n = n;
    row.rho = gtf_radius(n, c_g);
    row.seeds = seeds;
    for (int s = 0; s < seeds; ++s) {
      const auto p = sample_hom(n, derive_seed(base_seed, static_cast<std::uint64_t>(s)));
      if (!certify_gtf_graph(SchreierGraph::from(p), row.rho, threads).pass) ++row.failures;
    }
    row.rate = static_cast<double>(row.failures) / seeds;
    row.std_error = std::sqrt(row.rate * (1.0 - row.rate) / seeds);
    t.rows.push_back(row);
  }
  for (std::size_t k = 1; k < t.rows.size(); ++k) {
    const auto& a = t.rows[k - 1];
    const auto& b = t.rows[k];
    const double pooled = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
    if (b.rate > a.rate + 2.0 * pooled) t.non_increasing = false;
  }
  return t;
}

ConditionedSample sample_conditioned(int n, std::uint64_t seed, int rho,
                                     const std::function<bool(const PermutationPair&)>& extra, int max_tries,
                                     int threads) {
  if (max_tries < 1) fail(ErrorKind::Precondition, "max_tries must be positive");
  for (int k = 0; k < max_tries; ++k) {
    auto p = sample_hom(n, derive_seed(seed, static_cast<std::uint64_t>(k)));
    if (!is_connected(p)) continue;
    if (rho >= 0 && !certify_gtf_graph(SchreierGraph::from(p), rho, threads).pass) continue;
    if (extra && !extra(p)) continue;
    return {std::move(p), k};
  }
  fail(ErrorKind::NonTermination, "no admissible cover in " + std::to_string(max_tries) + " draws");
}

}  // namespace hypcover
