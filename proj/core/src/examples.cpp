#include "mixtime/examples.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixtime {

namespace {

std::string itos(long v) { return std::to_string(v); }

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Pairing-model 3-regular graph: shuffle 3M half-edge stubs, pair them up,
// retry until the result is simple and connected. Deterministic in seed.
std::vector<std::pair<int, int>> random_cubic_graph(int M, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<int> stubs(static_cast<size_t>(3) * M);
  for (int attempt = 0; attempt < 200; ++attempt) {
    for (size_t i = 0; i < stubs.size(); ++i) stubs[i] = static_cast<int>(i / 3);
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::vector<std::pair<int, int>> edges;
    edges.reserve(stubs.size() / 2);
    std::set<std::pair<int, int>> seen;
    bool ok = true;
    for (size_t i = 0; i + 1 < stubs.size(); i += 2) {
      int a = stubs[i], b = stubs[i + 1];
      if (a == b) { ok = false; break; }
      auto e = std::minmax(a, b);
      if (!seen.insert({e.first, e.second}).second) { ok = false; break; }
      edges.emplace_back(a, b);
    }
    if (!ok) continue;
    std::vector<std::vector<int>> adj(static_cast<size_t>(M));
    for (auto& [a, b] : edges) {
      adj[static_cast<size_t>(a)].push_back(b);
      adj[static_cast<size_t>(b)].push_back(a);
    }
    std::vector<char> vis(static_cast<size_t>(M), 0);
    std::vector<int> stack{0};
    vis[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[static_cast<size_t>(v)])
        if (!vis[static_cast<size_t>(w)]) {
          vis[static_cast<size_t>(w)] = 1;
          ++count;
          stack.push_back(w);
        }
    }
    if (count == M) return edges;
  }
  throw std::runtime_error("random_cubic_graph: no simple connected pairing found");
}

struct Builder {
  std::vector<std::string> states;
  std::vector<Conductance> edges;

  int add(const std::string& id) {
    states.push_back(id);
    return static_cast<int>(states.size()) - 1;
  }
  void link(const std::string& u, const std::string& v, double c = 1.0) {
    edges.push_back({u, v, c});
  }
};

GeneratedExample finish(Builder b, const ExampleSpec& spec,
                        std::optional<Chain> tree = std::nullopt,
                        std::optional<Correspondence> corr = std::nullopt) {
  if (spec.perturb) {
    std::mt19937 rng(spec.seed);
    std::uniform_real_distribution<double> factor(0.5, 2.0);
    for (auto& e : b.edges) e.c *= factor(rng);
  }
  Chain chain = Chain::from_conductances(std::move(b.states), b.edges);
  return GeneratedExample{std::move(chain), std::move(tree), std::move(corr)};
}

GeneratedExample make_path(const ExampleSpec& spec) {
  require(spec.n >= 2, "PATH: n >= 2 required");
  Builder b;
  for (int i = 1; i <= spec.n; ++i) b.add(itos(i));
  for (int i = 1; i < spec.n; ++i) b.link(itos(i), itos(i + 1));
  return finish(std::move(b), spec);
}

GeneratedExample make_cycle(const ExampleSpec& spec) {
  require(spec.n >= 3, "CYCLE: n >= 3 required");
  Builder b;
  for (int i = 1; i <= spec.n; ++i) b.add(itos(i));
  for (int i = 1; i < spec.n; ++i) b.link(itos(i), itos(i + 1));
  b.link(itos(spec.n), "1");
  return finish(std::move(b), spec);
}

// Two order-n stars joined by an edge between one leaf of each.
GeneratedExample make_star2(const ExampleSpec& spec) {
  int n = spec.n;
  require(n >= 1, "STAR2: n >= 1 required");
  Builder b;
  b.add("c1");
  for (int i = 1; i <= n; ++i) {
    b.add("a" + itos(i));
    b.link("c1", "a" + itos(i));
  }
  b.add("c2");
  for (int i = 1; i <= n; ++i) {
    b.add("b" + itos(i));
    b.link("c2", "b" + itos(i));
  }
  b.link("a" + itos(n), "b" + itos(n));

  Chain tree = Chain::from_conductances({"t1", "t2"}, {{"t1", "t2", 1.0}});
  Correspondence corr;
  for (int g = 0; g <= n; ++g) corr.pairs.emplace_back(0, g);
  for (int g = n + 1; g <= 2 * n + 1; ++g) corr.pairs.emplace_back(1, g);
  return finish(std::move(b), spec, std::move(tree), std::move(corr));
}

GeneratedExample make_wpath3(const ExampleSpec& spec) {
  require(spec.n >= 1, "WPATH3: n >= 1 required");
  double w = spec.n;
  Builder b;
  for (int i = 1; i <= 4; ++i) b.add(itos(i));
  b.link("1", "2", w);
  b.link("2", "3", 1.0);
  b.link("3", "4", w);
  return finish(std::move(b), spec);
}

// Complete graph with a marked Hamiltonian cycle: cycle edges at conductance
// 1, the remaining edges at 1/n^3.
GeneratedExample make_hamclique(const ExampleSpec& spec) {
  int n = spec.n;
  require(n >= 3, "HAMCLIQUE: n >= 3 required");
  Builder b;
  for (int i = 1; i <= n; ++i) b.add(itos(i));
  double weak = 1.0 / (static_cast<double>(n) * n * n);
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      bool on_cycle = (j == i + 1) || (i == 1 && j == n);
      b.link(itos(i), itos(j), on_cycle ? 1.0 : weak);
    }
  return finish(std::move(b), spec);
}

GeneratedExample make_bintree(const ExampleSpec& spec) {
  int K = spec.K;
  require(K >= 1 && K <= 20, "BINTREE: 1 <= K <= 20 required");
  long total = (1L << (K + 1)) - 1;
  Builder b;
  for (long x = 1; x <= total; ++x) b.add(itos(x));
  for (long x = 2; x <= total; ++x) b.link(itos(x / 2), itos(x));
  return finish(std::move(b), spec);
}

int heap_depth(long x) {
  int d = 0;
  while (x > 1) {
    x >>= 1;
    ++d;
  }
  return d;
}

// Balanced: depth between K/4 and K/2, and the left/right turn counts on the
// root path differ by at most sqrt(K).
bool dp_balanced(long x, int K) {
  int d = heap_depth(x);
  if (4 * d < K || 2 * d > K) return false;
  int left = 0, right = 0;
  for (long y = x; y > 1; y >>= 1) {
    if (y % 2 == 0)
      ++left;
    else
      ++right;
  }
  return std::abs(left - right) <= std::sqrt(static_cast<double>(K)) + 1e-12;
}

// Binary tree of height K, a length-K path hanging off every balanced
// vertex, and the leaves matched one-to-one (in heap order) into a seeded
// 3-regular graph of order K^2 2^K.
GeneratedExample make_dingperes(const ExampleSpec& spec) {
  int K = spec.K;
  require(K >= 2 && K <= 8, "DINGPERES: 2 <= K <= 8 required");
  long total = (1L << (K + 1)) - 1;
  Builder b;
  for (long x = 1; x <= total; ++x) b.add("t" + itos(x));
  for (long x = 2; x <= total; ++x) {
    double c = (spec.doubled_left && x % 2 == 0) ? 2.0 : 1.0;
    b.link("t" + itos(x / 2), "t" + itos(x), c);
  }
  for (long x = 1; x <= total; ++x) {
    if (!dp_balanced(x, K)) continue;
    std::string prev = "t" + itos(x);
    for (int j = 1; j <= K; ++j) {
      std::string id = "p" + itos(x) + "_" + itos(j);
      b.add(id);
      b.link(prev, id);
      prev = id;
    }
  }
  int M = K * K * (1 << K);
  for (int i = 0; i < M; ++i) b.add("x" + itos(i));
  for (auto& [u, v] : random_cubic_graph(M, spec.seed))
    b.link("x" + itos(u), "x" + itos(v));
  long first_leaf = 1L << K;
  for (long x = first_leaf; x <= total; ++x)
    b.link("t" + itos(x), "x" + itos(x - first_leaf));
  return finish(std::move(b), spec);
}

std::string pc_id(int i, int l, int m) {
  return "q" + itos(i) + "_" + itos(l) + "_" + itos(m);
}

// n linked copies of the clique-cycle product K_k x C_n: copy i joined to
// copy i+1 at level 1 and at level n.
GeneratedExample make_prodchain(const ExampleSpec& spec) {
  int k = spec.k, n = spec.n;
  require(k >= 2, "PRODCHAIN: k >= 2 required");
  require(n >= 3, "PRODCHAIN: n >= 3 required");
  Builder b;
  for (int i = 1; i <= n; ++i)
    for (int l = 1; l <= n; ++l)
      for (int m = 1; m <= k; ++m) b.add(pc_id(i, l, m));
  for (int i = 1; i <= n; ++i) {
    for (int l = 1; l <= n; ++l)
      for (int m = 1; m <= k; ++m)
        for (int m2 = m + 1; m2 <= k; ++m2) b.link(pc_id(i, l, m), pc_id(i, l, m2));
    for (int m = 1; m <= k; ++m) {
      for (int l = 1; l < n; ++l) b.link(pc_id(i, l, m), pc_id(i, l + 1, m));
      b.link(pc_id(i, n, m), pc_id(i, 1, m));
    }
  }
  for (int i = 1; i < n; ++i) {
    b.link(pc_id(i, 1, 1), pc_id(i + 1, 1, 1));
    b.link(pc_id(i, n, 1), pc_id(i + 1, n, 1));
  }

  Builder t;
  for (int i = 1; i <= n; ++i) t.add(itos(i));
  std::vector<Conductance> tedges;
  for (int i = 1; i < n; ++i) tedges.push_back({itos(i), itos(i + 1), 1.0});
  Chain tree = Chain::from_conductances(std::move(t.states), tedges);
  Correspondence corr;
  for (int i = 1; i <= n; ++i)
    for (int l = 1; l <= n; ++l)
      for (int m = 1; m <= k; ++m)
        corr.pairs.emplace_back(i - 1, ((i - 1) * n + (l - 1)) * k + (m - 1));
  return finish(std::move(b), spec, std::move(tree), std::move(corr));
}

double measured_theta(const Chain& chain, BottleneckSequence& seq) {
  seq.theta = 1e-9;
  SequenceReport rep = verify_sequence(chain, seq);
  if (!rep.valid) throw std::logic_error("canonical sequence invalid: " + rep.first_violation);
  return std::min(rep.max_theta, 1.0);
}

}  // namespace

Family family_from_string(const std::string& name) {
  std::string u;
  for (char c : name) u.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (u == "PATH") return Family::path;
  if (u == "CYCLE") return Family::cycle;
  if (u == "STAR2") return Family::star2;
  if (u == "WPATH3") return Family::wpath3;
  if (u == "HAMCLIQUE") return Family::hamclique;
  if (u == "BINTREE") return Family::bintree;
  if (u == "DINGPERES") return Family::dingperes;
  if (u == "PRODCHAIN") return Family::prodchain;
  throw std::invalid_argument("unknown example family: " + name);
}

std::string family_to_string(Family f) {
  switch (f) {
    case Family::path: return "PATH";
    case Family::cycle: return "CYCLE";
    case Family::star2: return "STAR2";
    case Family::wpath3: return "WPATH3";
    case Family::hamclique: return "HAMCLIQUE";
    case Family::bintree: return "BINTREE";
    case Family::dingperes: return "DINGPERES";
    case Family::prodchain: return "PRODCHAIN";
  }
  throw std::logic_error("bad family");
}

GeneratedExample generate(const ExampleSpec& spec) {
  switch (spec.family) {
    case Family::path: return make_path(spec);
    case Family::cycle: return make_cycle(spec);
    case Family::star2: return make_star2(spec);
    case Family::wpath3: return make_wpath3(spec);
    case Family::hamclique: return make_hamclique(spec);
    case Family::bintree: return make_bintree(spec);
    case Family::dingperes: return make_dingperes(spec);
    case Family::prodchain: return make_prodchain(spec);
  }
  throw std::logic_error("bad family");
}

BottleneckSequence canonical_bottleneck(const Chain& chain, const ExampleSpec& spec) {
  BottleneckSequence seq;
  int nv = chain.size();
  if (spec.family == Family::star2) {
    int n = spec.n;
    // first star minus the bridge leaf, then the bridge leaf, then the
    // opposite bridge leaf
    VertexSet s1(nv);
    for (int i = 0; i < n; ++i) s1.insert(i);
    VertexSet s2 = s1;
    s2.insert(n);
    VertexSet s3 = s2;
    s3.insert(2 * n + 1);
    seq.sets = {s1, s2, s3};
  } else if (spec.family == Family::prodchain) {
    int k = spec.k, n = spec.n;
    // S_{j + n(i-1)}: copies before i plus the first j levels of copy i
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) {
        if (i == n && j == n) continue;
        VertexSet s(nv);
        for (int i2 = 1; i2 < i; ++i2)
          for (int l = 1; l <= n; ++l)
            for (int m = 1; m <= k; ++m) s.insert(((i2 - 1) * n + (l - 1)) * k + (m - 1));
        for (int l = 1; l <= j; ++l)
          for (int m = 1; m <= k; ++m) s.insert(((i - 1) * n + (l - 1)) * k + (m - 1));
        seq.sets.push_back(std::move(s));
      }
  } else if (spec.family == Family::dingperes) {
    int K = spec.K;
    long total = (1L << (K + 1)) - 1;
    // first j tree levels together with their attached paths
    for (int j = 1; j < K; ++j) {
      VertexSet s(nv);
      for (long x = 1; x <= total; ++x) {
        if (heap_depth(x) > j) continue;
        s.insert(chain.index_of("t" + itos(x)));
        if (dp_balanced(x, K))
          for (int p = 1; p <= K; ++p)
            s.insert(chain.index_of("p" + itos(x) + "_" + itos(p)));
      }
      seq.sets.push_back(std::move(s));
    }
  } else {
    throw std::invalid_argument("canonical_bottleneck: no sequence for this family");
  }
  seq.theta = measured_theta(chain, seq);
  return seq;
}

std::vector<VertexSet> prodchain_blocks(const Chain& chain, const ExampleSpec& spec) {
  require(spec.family == Family::prodchain, "prodchain_blocks: PRODCHAIN only");
  int k = spec.k, n = spec.n;
  std::vector<VertexSet> blocks;
  for (int i = 1; i <= n; ++i) {
    VertexSet s(chain.size());
    for (int l = 1; l <= n; ++l)
      for (int m = 1; m <= k; ++m) s.insert(((i - 1) * n + (l - 1)) * k + (m - 1));
    blocks.push_back(std::move(s));
  }
  return blocks;
}

}  // namespace mixtime
