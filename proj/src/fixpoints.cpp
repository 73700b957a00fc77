#include "hypcover/fixpoints.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numeric>
#include <ostream>
#include <queue>
#include <thread>

#include <boost/multiprecision/cpp_int.hpp>

#include "hypcover/error.hpp"
#include "hypcover/rng.hpp"

namespace hypcover {

namespace {

int label_index(Letter l) { return is_a(l) ? 0 : 1; }
Letter label_letter(int k) { return k == 0 ? Letter::A : Letter::B; }

// Incremental folding with union-find. Slots out[v][l] / in[v][l] hold the
// unique neighbour along label l; a second edge on an occupied slot forces
// its endpoint to merge with the occupant.
class Folder {
 public:
  explicit Folder(int vertices)
      : parent_(static_cast<std::size_t>(vertices)),
        out_(static_cast<std::size_t>(vertices), {-1, -1}),
        in_(static_cast<std::size_t>(vertices), {-1, -1}) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  void add_edge(int u, int v, int l) {
    pending_edges_.push_back({u, v, l});
    drain();
  }

  CoreGraph result() {
    const int base = find(0);
    std::vector<int> order(parent_.size(), -1);
    std::vector<int> bfs{base};
    order[static_cast<std::size_t>(base)] = 0;
    for (std::size_t k = 0; k < bfs.size(); ++k) {
      const auto v = static_cast<std::size_t>(bfs[k]);
      for (int l = 0; l < 2; ++l) {
        for (int w : {out_[v][static_cast<std::size_t>(l)], in_[v][static_cast<std::size_t>(l)]}) {
          if (w >= 0 && order[static_cast<std::size_t>(w)] < 0) {
            order[static_cast<std::size_t>(w)] = static_cast<int>(bfs.size());
            bfs.push_back(w);
          }
        }
      }
    }
    CoreGraph g;
    g.vertices = static_cast<int>(bfs.size());
    for (int v : bfs) {
      for (int l = 0; l < 2; ++l) {
        const int w = out_[static_cast<std::size_t>(v)][static_cast<std::size_t>(l)];
        if (w >= 0) {
          g.edges.push_back({order[static_cast<std::size_t>(v)], order[static_cast<std::size_t>(w)], label_letter(l)});
        }
      }
    }
    std::sort(g.edges.begin(), g.edges.end(), [](const CoreEdge& x, const CoreEdge& y) {
      return std::tuple(x.tail, label_index(x.label), x.head) < std::tuple(y.tail, label_index(y.label), y.head);
    });
    return g;
  }

 private:
  struct PendingEdge {
    int u, v, l;
  };

  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      parent_[static_cast<std::size_t>(x)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
      x = parent_[static_cast<std::size_t>(x)];
    }
    return x;
  }

  void drain() {
    while (!pending_edges_.empty() || !pending_merges_.empty()) {
      if (!pending_merges_.empty()) {
        auto [x, y] = pending_merges_.front();
        pending_merges_.pop_front();
        merge(x, y);
        continue;
      }
      const PendingEdge e = pending_edges_.front();
      pending_edges_.pop_front();
      place(e);
    }
  }

  void place(const PendingEdge& e) {
    const int u = find(e.u);
    const int v = find(e.v);
    const auto l = static_cast<std::size_t>(e.l);
    int& ou = out_[static_cast<std::size_t>(u)][l];
    int& iv = in_[static_cast<std::size_t>(v)][l];
    if (ou >= 0 && find(ou) == v) return;  // duplicate edge
    if (ou >= 0) {
      pending_merges_.push_back({ou, v});
      return;  // the edge coincides with u -> ou after the merge
    }
    if (iv >= 0) {
      pending_merges_.push_back({iv, u});
      return;
    }
    ou = v;
    iv = u;
  }

  void merge(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return;
    const int keep = std::min(x, y);
    const int gone = std::max(x, y);
    // Detach every edge at `gone`, union, then re-place them at `keep`.
    for (int l = 0; l < 2; ++l) {
      const auto li = static_cast<std::size_t>(l);
      const int t = out_[static_cast<std::size_t>(gone)][li];
      if (t >= 0) {
        in_[static_cast<std::size_t>(t)][li] = -1;
        out_[static_cast<std::size_t>(gone)][li] = -1;
        pending_edges_.push_front({gone, t, l});
      }
      const int s = in_[static_cast<std::size_t>(gone)][li];
      if (s >= 0) {
        out_[static_cast<std::size_t>(s)][li] = -1;
        in_[static_cast<std::size_t>(gone)][li] = -1;
        pending_edges_.push_front({s, gone, l});
      }
    }
    parent_[static_cast<std::size_t>(gone)] = keep;
  }

  std::vector<int> parent_;
  std::vector<std::array<int, 2>> out_;
  std::vector<std::array<int, 2>> in_;
  std::deque<PendingEdge> pending_edges_;
  std::deque<std::pair<int, int>> pending_merges_;
};

// BFS depths and tree flags for the core graph, neighbours in edge order.
struct CoreTree {
  std::vector<int> depth;
  std::vector<char> in_tree;
  std::vector<Word> path;
};

CoreTree bfs_tree(const CoreGraph& g) {
  const auto V = static_cast<std::size_t>(g.vertices);
  std::vector<std::vector<std::pair<int, int>>> inc(V);  // (edge, +1 out / -1 in)
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    inc[static_cast<std::size_t>(g.edges[k].tail)].push_back({static_cast<int>(k), 1});
    inc[static_cast<std::size_t>(g.edges[k].head)].push_back({static_cast<int>(k), -1});
  }
  CoreTree t;
  t.depth.assign(V, -1);
  t.in_tree.assign(g.edges.size(), 0);
  t.path.assign(V, Word());
  std::queue<int> q;
  q.push(0);
  t.depth[0] = 0;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (auto [k, dir] : inc[static_cast<std::size_t>(u)]) {
      const auto& e = g.edges[static_cast<std::size_t>(k)];
      const int w = dir > 0 ? e.head : e.tail;
      if (t.depth[static_cast<std::size_t>(w)] >= 0) continue;
      t.depth[static_cast<std::size_t>(w)] = t.depth[static_cast<std::size_t>(u)] + 1;
      t.in_tree[static_cast<std::size_t>(k)] = 1;
      t.path[static_cast<std::size_t>(w)] = t.path[static_cast<std::size_t>(u)];
      t.path[static_cast<std::size_t>(w)].push_back(dir > 0 ? e.label : inverse(e.label));
      q.push(w);
    }
  }
  return t;
}

// Image of the basepoint-anchored immersion, or false on a conflict.
bool immerses_at(const CoreGraph& g, const std::vector<int>& sa, const std::vector<int>& sb,
                 const std::vector<int>& ia, const std::vector<int>& ib, int i, std::vector<int>& img) {
  std::fill(img.begin(), img.end(), -1);
  img[0] = i;
  // Vertices are in BFS order and edges sorted by tail, so a few sweeps settle
  // every image; loop until no change.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : g.edges) {
      const auto t = static_cast<std::size_t>(e.tail);
      const auto h = static_cast<std::size_t>(e.head);
      const auto& fwd = is_a(e.label) ? sa : sb;
      const auto& bwd = is_a(e.label) ? ia : ib;
      if (img[t] >= 0) {
        const int want = fwd[static_cast<std::size_t>(img[t])];
        if (img[h] < 0) {
          img[h] = want;
          changed = true;
        } else if (img[h] != want) {
          return false;
        }
      } else if (img[h] >= 0) {
        img[t] = bwd[static_cast<std::size_t>(img[h])];
        changed = true;
      }
    }
  }
  return true;
}

std::vector<int> inverse_of(const std::vector<int>& s) {
  std::vector<int> inv(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) inv[static_cast<std::size_t>(s[i])] = static_cast<int>(i);
  return inv;
}

int fix_count_raw(const CoreGraph& g, const std::vector<int>& sa, const std::vector<int>& sb,
                  std::vector<int>& img) {
  const auto ia = inverse_of(sa);
  const auto ib = inverse_of(sb);
  int count = 0;
  for (int i = 0; i < static_cast<int>(sa.size()); ++i) {
    if (immerses_at(g, sa, sb, ia, ib, i, img)) ++count;
  }
  return count;
}

std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace

bool CoreGraph::is_folded() const {
  std::vector<std::array<int, 2>> out(static_cast<std::size_t>(vertices), {0, 0});
  std::vector<std::array<int, 2>> in(static_cast<std::size_t>(vertices), {0, 0});
  for (const auto& e : edges) {
    const auto l = static_cast<std::size_t>(label_index(e.label));
    if (++out[static_cast<std::size_t>(e.tail)][l] > 1) return false;
    if (++in[static_cast<std::size_t>(e.head)][l] > 1) return false;
  }
  return true;
}

std::vector<Word> CoreGraph::generators() const {
  const CoreTree t = bfs_tree(*this);
  std::vector<Word> out;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (t.in_tree[k]) continue;
    const auto& e = edges[k];
    out.push_back(t.path[static_cast<std::size_t>(e.tail)] * Word::single(e.label) *
                  t.path[static_cast<std::size_t>(e.head)].inverse());
  }
  return out;
}

CoreGraph stallings_fold(const std::vector<Word>& words) {
  if (words.empty()) fail(ErrorKind::Precondition, "stallings_fold needs at least one word");
  int vertices = 1;
  for (const auto& w : words) {
    if (!w.is_reduced()) fail(ErrorKind::Precondition, "stallings_fold needs reduced words");
    if (w.size() > 1) vertices += static_cast<int>(w.size()) - 1;
  }
  Folder f(vertices);
  int next = 1;
  for (const auto& w : words) {
    int cur = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const int to = (k + 1 == w.size()) ? 0 : next++;
      const Letter l = w[k];
      if (is_inverse_letter(l)) {
        f.add_edge(to, cur, label_index(l));
      } else {
        f.add_edge(cur, to, label_index(l));
      }
      cur = to;
    }
  }
  return f.result();
}

CoreGraph fold(const CoreGraph& g) {
  Folder f(g.vertices);
  for (const auto& e : g.edges) f.add_edge(e.tail, e.head, label_index(e.label));
  return f.result();
}

LengthProfile basis_length(const CoreGraph& cg) {
  LengthProfile lp;
  lp.rank = cg.rank();
  const CoreTree t = bfs_tree(cg);
  for (std::size_t k = 0; k < cg.edges.size(); ++k) {
    if (t.in_tree[k]) continue;
    lp.ell += t.depth[static_cast<std::size_t>(cg.edges[k].tail)] + 1 +
              t.depth[static_cast<std::size_t>(cg.edges[k].head)];
  }
  const std::size_t E = cg.edges.size();
  const auto V = static_cast<std::size_t>(cg.vertices);
  if (E <= 12 && V >= 1) {
    int best = -1;
    for (std::uint32_t mask = 0; mask < (1U << E); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) != V - 1) continue;
      std::vector<int> par(V);
      std::iota(par.begin(), par.end(), 0);
      auto find = [&](int x) {
        while (par[static_cast<std::size_t>(x)] != x) x = par[static_cast<std::size_t>(x)];
        return x;
      };
      bool tree = true;
      std::vector<std::vector<int>> adj(V);
      for (std::size_t k = 0; k < E && tree; ++k) {
        if (!(mask >> k & 1U)) continue;
        const int a = find(cg.edges[k].tail);
        const int b = find(cg.edges[k].head);
        if (a == b) tree = false;
        par[static_cast<std::size_t>(a)] = b;
        adj[static_cast<std::size_t>(cg.edges[k].tail)].push_back(cg.edges[k].head);
        adj[static_cast<std::size_t>(cg.edges[k].head)].push_back(cg.edges[k].tail);
      }
      if (!tree) continue;
      std::vector<int> depth(V, -1);
      std::vector<int> stack{0};
      depth[0] = 0;
      while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int w : adj[static_cast<std::size_t>(u)]) {
          if (depth[static_cast<std::size_t>(w)] < 0) {
            depth[static_cast<std::size_t>(w)] = depth[static_cast<std::size_t>(u)] + 1;
            stack.push_back(w);
          }
        }
      }
      int ell = 0;
      for (std::size_t k = 0; k < E; ++k) {
        if (mask >> k & 1U) continue;
        ell += depth[static_cast<std::size_t>(cg.edges[k].tail)] + 1 + depth[static_cast<std::size_t>(cg.edges[k].head)];
      }
      if (best < 0 || ell < best) best = ell;
    }
    if (best >= 0) lp.tree_minimum = best;
  }
  return lp;
}

int fix_count(const PermutationPair& p, const CoreGraph& cg) {
  std::vector<int> img(static_cast<std::size_t>(cg.vertices));
  return fix_count_raw(cg, p.sigma_a, p.sigma_b, img);
}

int fix_count_bruteforce(const PermutationPair& p, const std::vector<Word>& words) {
  int count = 0;
  for (int i = 0; i < p.n; ++i) {
    bool all = true;
    for (const auto& w : words) all = all && p.act(i, w) == i;
    if (all) ++count;
  }
  return count;
}

std::vector<std::uint64_t> fix_distribution(const CoreGraph& cg, int n) {
  if (n < 1) fail(ErrorKind::InvalidSize, "n must be positive");
  if (n > 6) fail(ErrorKind::Overflow, "exact enumeration is capped at n = 6");
  const auto perms = all_permutations(n);
  std::vector<std::uint64_t> hist(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> img(static_cast<std::size_t>(cg.vertices));
  for (const auto& sa : perms) {
    for (const auto& sb : perms) ++hist[static_cast<std::size_t>(fix_count_raw(cg, sa, sb, img))];
  }
  return hist;
}

FixStatistic expected_fix(const CoreGraph& cg, int n, FixMode mode, std::uint64_t samples, std::uint64_t seed,
                          int threads) {
  if (n < 1) fail(ErrorKind::InvalidSize, "n must be positive");
  FixStatistic st;
  st.n = n;
  st.mode = mode;
  if (mode == FixMode::Exact) {
    const auto hist = fix_distribution(cg, n);
    for (std::size_t k = 0; k < hist.size(); ++k) {
      st.samples += hist[k];
      st.total += k * hist[k];
    }
    st.mean = static_cast<double>(st.total) / static_cast<double>(st.samples);
    return st;
  }
  if (samples == 0) fail(ErrorKind::Precondition, "Monte Carlo needs samples > 0");
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> sum(chunks, 0);
  std::vector<std::uint64_t> sum_sq(chunks, 0);
  auto run_chunk = [&](std::uint64_t c) {
    Rng rng(derive_seed(seed, c));
    std::vector<int> img(static_cast<std::size_t>(cg.vertices));
    const std::uint64_t count = std::min(kChunk, samples - c * kChunk);
    for (std::uint64_t s = 0; s < count; ++s) {
      const auto sa = rng.permutation(n);
      const auto sb = rng.permutation(n);
      const auto f = static_cast<std::uint64_t>(fix_count_raw(cg, sa, sb, img));
      sum[c] += f;
      sum_sq[c] += f * f;
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(chunks)));
  if (workers == 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t c = static_cast<std::uint64_t>(w); c < chunks; c += static_cast<std::uint64_t>(workers)) {
          run_chunk(c);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  std::uint64_t total = 0;
  std::uint64_t total_sq = 0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    total += sum[c];
    total_sq += sum_sq[c];
  }
  st.samples = samples;
  st.total = total;
  const auto N = static_cast<double>(samples);
  st.mean = static_cast<double>(total) / N;
  const double var = samples > 1 ? (static_cast<double>(total_sq) - N * st.mean * st.mean) / (N - 1.0) : 0.0;
  st.std_error = std::sqrt(std::max(0.0, var) / N);
  return st;
}

PropA1Report verify_prop_a1(const CoreGraph& cg, const std::vector<int>& n_grid, std::uint64_t samples,
                            std::uint64_t seed, int threads) {
  PropA1Report r;
  r.rank = cg.rank();
  if (r.rank < 2) fail(ErrorKind::Precondition, "verify_prop_a1 needs rank(H) >= 2");
  r.ell = basis_length(cg).ell;
  const double ell6 = std::pow(static_cast<double>(r.ell), 6);
  for (int n : n_grid) {
    if (static_cast<long long>(n) < static_cast<long long>(r.ell) * r.ell * r.ell) {
      fail(ErrorKind::Precondition, "verify_prop_a1 needs n >= ell^3");
    }
    PropA1Row row;
    row.n = n;
    row.stat = n <= 6 ? expected_fix(cg, n, FixMode::Exact)
                      : expected_fix(cg, n, FixMode::MonteCarlo, samples, derive_seed(seed, static_cast<std::uint64_t>(n)), threads);
    row.ratio = row.stat.mean * n / ell6;
    r.max_ratio = std::max(r.max_ratio, row.ratio);
    r.rows.push_back(row);
  }
  r.finite = std::isfinite(r.max_ratio);
  if (!r.rows.empty()) {
    const auto& first = r.rows.front();
    const auto& last = r.rows.back();
    const double se_last = last.stat.std_error * last.n / ell6;
    r.non_exploding = last.ratio <= 2.0 * first.ratio + 3.0 * se_last;
  }
  return r;
}

PochhammerReport pochhammer_check(int n_max, int a_max) {
  using boost::multiprecision::cpp_int;
  PochhammerReport rep;
  for (int n = 1; n <= n_max; ++n) {
    cpp_int falling = 1;  // (n)_a
    cpp_int power = 1;    // n^a
    const int top = std::min(a_max, n / 2);
    for (int a = 0; a <= top; ++a) {
      if (a > 0) {
        falling *= (n - a + 1);
        power *= n;
      }
      // n^a (1 - a^2/n) <= (n)_a  <=>  n^(a-1) (n - a^2) <= (n)_a for a >= 1
      bool ok = falling <= power;
      if (a == 0) {
        ok = ok && falling == 1;
      } else {
        const cpp_int lower = (power / n) * (n - a * a);
        ok = ok && lower <= falling;
      }
      ++rep.checked;
      if (!ok && rep.pass) {
        rep.pass = false;
        rep.fail_n = n;
        rep.fail_a = a;
      }
    }
  }
  return rep;
}

void write_core_graph(std::ostream& os, const CoreGraph& cg) {
  os << "hypcover-core v1\n";
  os << "vertices " << cg.vertices << "\n";
  os << "edges " << cg.edges.size() << "\n";
  for (const auto& e : cg.edges) os << e.tail << ' ' << letter_char(e.label) << ' ' << e.head << "\n";
}

}  // namespace hypcover
