#include "mixtime/bottleneck.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mixtime/mixing.hpp"

namespace mixtime {

namespace {
constexpr double kFlowTol = 1e-12;

// component of u in the derived graph after deleting vertex block "avoid"
VertexSet component_avoiding(const Chain& c, int u, int avoid) {
  VertexSet comp(c.size());
  std::deque<int> queue{u};
  comp.insert(u);
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    for (int y : c.neighbours(x))
      if (y != avoid && !comp.contains(y)) {
        comp.insert(y);
        queue.push_back(y);
      }
  }
  return comp;
}

bool is_edge(const Chain& c, int u, int v) {
  const auto& nb = c.neighbours(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}
}  // namespace

SequenceReport verify_sequence(const Chain& chain, const BottleneckSequence& seq) {
  SequenceReport rep;
  const int l = static_cast<int>(seq.sets.size());
  auto fail = [&](int idx, const std::string& what) {
    rep.valid = false;
    rep.index = idx;
    rep.first_violation = what;
    return rep;
  };
  if (seq.theta <= 0.0 || seq.theta > 1.0) return fail(-1, "theta outside (0,1]");
  if (l == 0) return fail(-1, "empty sequence (l >= 1 required)");
  for (int j = 0; j < l; ++j)
    if (seq.sets[static_cast<size_t>(j)].universe_size() != chain.size())
      return fail(j + 1, "set universe does not match chain");
  if (seq.sets.front().empty()) return fail(1, "S_1 is empty");
  if (seq.sets.back().is_full()) return fail(l, "S_l is the full vertex set");
  for (int j = 0; j + 1 < l; ++j) {
    const auto& a = seq.sets[static_cast<size_t>(j)];
    const auto& b = seq.sets[static_cast<size_t>(j + 1)];
    if (!a.is_subset_of(b) || a == b) return fail(j + 2, "nesting is not strict");
  }
  for (int j = 0; j < l; ++j) {
    const auto& S = seq.sets[static_cast<size_t>(j)];
    if (!chain.is_connected(S)) return fail(j + 1, "S_j is disconnected");
    if (!chain.is_connected(S.complement())) return fail(j + 1, "S_j^c is disconnected");
  }
  rep.max_theta = 1.0;
  for (int j = 0; j + 1 < l; ++j) {
    const auto& S = seq.sets[static_cast<size_t>(j)];
    const auto& T = seq.sets[static_cast<size_t>(j + 1)];
    double inflow = chain.flow(T - S, S);
    double total = chain.flow(S.complement(), S);
    rep.max_theta = std::min(rep.max_theta, total > 0.0 ? inflow / total : 1.0);
    if (inflow + kFlowTol < seq.theta * total)
      return fail(j + 1, "flow condition Q(S_{j+1}\\S_j,S_j) >= theta Q(S_j^c,S_j) fails");
  }
  rep.valid = true;
  return rep;
}

double sequence_score(const Chain& chain, const BottleneckSequence& seq) {
  SequenceReport rep = verify_sequence(chain, seq);
  if (!rep.valid)
    throw std::invalid_argument("sequence_score: invalid sequence (" + rep.first_violation +
                                " at index " + std::to_string(rep.index) + ")");
  double score = 0.0;
  for (const auto& S : seq.sets) score += 1.0 / chain.phi(S);
  return score;
}

BottleneckSequence greedy_sequence(const Chain& chain, int s, double theta) {
  if (theta <= 0.0 || theta >= 1.0)
    throw std::invalid_argument("greedy_sequence: theta must be in (0,1)");
  const int n = chain.size();
  if (s < 0 || s >= n) throw std::invalid_argument("greedy_sequence: start out of range");

  ExitFrequencies ef = exit_frequencies(chain, s);
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (a == s || b == s) return b == s && a != s;  // s sorts last
    if (ef.y[a] != ef.y[b]) return ef.y[a] < ef.y[b];
    return a < b;
  });

  // B_i = component of the halting vertex within the first i labels
  std::vector<VertexSet> B;
  B.reserve(static_cast<size_t>(n - 1));
  VertexSet prefix(n);
  for (int i = 0; i < n - 1; ++i) {
    prefix.insert(order[static_cast<size_t>(i)]);
    VertexSet comp(n);
    std::deque<int> queue{order[0]};
    comp.insert(order[0]);
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int v : chain.neighbours(u))
        if (prefix.contains(v) && !comp.contains(v)) {
          comp.insert(v);
          queue.push_back(v);
        }
    }
    B.push_back(std::move(comp));
  }

  BottleneckSequence seq;
  seq.theta = theta;
  int mi = 0;
  seq.sets.push_back(B[0]);
  while (true) {
    double base = chain.flow(B[static_cast<size_t>(mi)].complement(), B[static_cast<size_t>(mi)]);
    int next = -1;
    for (int m = mi + 1; m < n - 1; ++m) {
      double q = chain.flow(B[static_cast<size_t>(m)].complement(), B[static_cast<size_t>(mi)]);
      if (q <= (1.0 - theta) * base + kFlowTol) {
        next = m;
        break;
      }
    }
    if (next < 0) break;
    seq.sets.push_back(B[static_cast<size_t>(next)]);
    mi = next;
  }
  return seq;
}

MaxScoreResult max_score_brute(const Chain& chain, double theta, int cap) {
  const int n = chain.size();
  if (n > cap)
    throw std::runtime_error("max_score_brute: " + std::to_string(n) +
                             " states exceeds enumeration cap " + std::to_string(cap));
  if (theta <= 0.0 || theta > 1.0)
    throw std::invalid_argument("max_score_brute: theta must be in (0,1]");

  // all proper nonempty sets that are connected with connected complement
  std::vector<uint32_t> cands;
  std::vector<VertexSet> sets;
  std::vector<double> inv_phi;
  for (uint32_t mask = 1; mask + 1 < (uint32_t{1} << n); ++mask) {
    VertexSet S(n);
    for (int v = 0; v < n; ++v)
      if (mask & (uint32_t{1} << v)) S.insert(v);
    if (!chain.is_connected(S) || !chain.is_connected(S.complement())) continue;
    cands.push_back(mask);
    inv_phi.push_back(1.0 / chain.phi(S));
    sets.push_back(std::move(S));
  }
  const int k = static_cast<int>(cands.size());
  std::vector<int> by_size(static_cast<size_t>(k));
  std::iota(by_size.begin(), by_size.end(), 0);
  std::sort(by_size.begin(), by_size.end(), [&](int a, int b) {
    int pa = __builtin_popcount(cands[static_cast<size_t>(a)]);
    int pb = __builtin_popcount(cands[static_cast<size_t>(b)]);
    return pa != pb ? pa > pb : cands[static_cast<size_t>(a)] < cands[static_cast<size_t>(b)];
  });

  // f[i] = best continuation score with sets[i] as the current last set
  std::vector<double> f(static_cast<size_t>(k), 0.0);
  std::vector<int> succ(static_cast<size_t>(k), -1);
  std::vector<double> base(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i)
    base[static_cast<size_t>(i)] =
        chain.flow(sets[static_cast<size_t>(i)].complement(), sets[static_cast<size_t>(i)]);
  for (int ii = 0; ii < k; ++ii) {
    int i = by_size[static_cast<size_t>(ii)];
    for (int jj = 0; jj < ii; ++jj) {
      int j = by_size[static_cast<size_t>(jj)];
      uint32_t mi = cands[static_cast<size_t>(i)], mj = cands[static_cast<size_t>(j)];
      if ((mi & mj) != mi || mi == mj) continue;
      double inflow = chain.flow(sets[static_cast<size_t>(j)] - sets[static_cast<size_t>(i)],
                                 sets[static_cast<size_t>(i)]);
      if (inflow + kFlowTol < theta * base[static_cast<size_t>(i)]) continue;
      double cand = inv_phi[static_cast<size_t>(j)] + f[static_cast<size_t>(j)];
      if (cand > f[static_cast<size_t>(i)]) {
        f[static_cast<size_t>(i)] = cand;
        succ[static_cast<size_t>(i)] = j;
      }
    }
  }

  MaxScoreResult best;
  best.score = -1.0;
  int start = -1;
  for (int i = 0; i < k; ++i) {
    double total = inv_phi[static_cast<size_t>(i)] + f[static_cast<size_t>(i)];
    if (total > best.score) {
      best.score = total;
      start = i;
    }
  }
  best.witness.theta = theta;
  for (int i = start; i >= 0; i = succ[static_cast<size_t>(i)])
    best.witness.sets.push_back(sets[static_cast<size_t>(i)]);
  return best;
}

MaxScoreResult max_score_tree(const Chain& chain) {
  if (!chain.is_tree())
    throw std::invalid_argument("max_score_tree: derived graph is not a tree");
  const int n = chain.size();
  if (n < 2) throw std::invalid_argument("max_score_tree: need at least one edge");

  // edge weight = 1/Phi(child subtree), rooted at 0
  std::vector<int> parent(static_cast<size_t>(n), -1), bfs;
  std::vector<bool> seen(static_cast<size_t>(n), false);
  bfs.push_back(0);
  seen[0] = true;
  for (size_t h = 0; h < bfs.size(); ++h)
    for (int v : chain.neighbours(bfs[h]))
      if (!seen[static_cast<size_t>(v)]) {
        seen[static_cast<size_t>(v)] = true;
        parent[static_cast<size_t>(v)] = bfs[h];
        bfs.push_back(v);
      }

  std::vector<double> edge_w(static_cast<size_t>(n), 0.0);  // weight of (v, parent[v])
  {
    // subtree vertex sets via reverse BFS accumulation
    std::vector<VertexSet> sub(static_cast<size_t>(n), VertexSet(n));
    for (int i = n - 1; i >= 0; --i) {
      int v = bfs[static_cast<size_t>(i)];
      sub[static_cast<size_t>(v)].insert(v);
      if (parent[static_cast<size_t>(v)] >= 0) {
        edge_w[static_cast<size_t>(v)] = 1.0 / chain.phi(sub[static_cast<size_t>(v)]);
        sub[static_cast<size_t>(parent[static_cast<size_t>(v)])] |= sub[static_cast<size_t>(v)];
      }
    }
  }

  // down[v] = best weight of a path from v into its subtree; combine the top
  // two child chains at each vertex
  std::vector<double> down(static_cast<size_t>(n), 0.0);
  std::vector<int> down_end(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) down_end[static_cast<size_t>(v)] = v;
  double best_score = -1.0;
  int best_x = -1, best_y = -1;
  for (int i = n - 1; i >= 0; --i) {
    int v = bfs[static_cast<size_t>(i)];
    double top1 = 0.0, top2 = 0.0;
    int end1 = v, end2 = v;
    for (int c : chain.neighbours(v)) {
      if (parent[static_cast<size_t>(c)] != v) continue;
      double w = edge_w[static_cast<size_t>(c)] + down[static_cast<size_t>(c)];
      if (w > top1) {
        top2 = top1;
        end2 = end1;
        top1 = w;
        end1 = down_end[static_cast<size_t>(c)];
      } else if (w > top2) {
        top2 = w;
        end2 = down_end[static_cast<size_t>(c)];
      }
    }
    down[static_cast<size_t>(v)] = top1;
    down_end[static_cast<size_t>(v)] = end1;
    double through = top1 + top2;
    if (top1 > 0.0 && through > best_score) {
      best_score = through;
      best_x = end1;
      best_y = top2 > 0.0 ? end2 : v;
    }
  }

  // cut sets along the x..y path, oriented to contain x
  std::vector<int> path;
  {
    Eigen::VectorXi dist = chain.distances_from(VertexSet::of(n, {best_y}));
    int cur = best_x;
    path.push_back(cur);
    while (cur != best_y) {
      for (int w : chain.neighbours(cur))
        if (dist[w] == dist[cur] - 1) {
          cur = w;
          break;
        }
      path.push_back(cur);
    }
  }
  MaxScoreResult res;
  res.score = best_score;
  res.witness.theta = 1.0;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    // side of edge (path[i], path[i+1]) containing x
    VertexSet side = component_avoiding(chain, path[i], path[i + 1]);
    res.witness.sets.push_back(side);
  }
  return res;
}

double tree_cut_hitting(const Chain& chain, int u, int v) {
  if (!chain.is_tree())
    throw std::invalid_argument("tree_cut_hitting: derived graph is not a tree");
  if (u < 0 || u >= chain.size() || v < 0 || v >= chain.size() || !is_edge(chain, u, v))
    throw std::invalid_argument("tree_cut_hitting: (u,v) is not an edge");
  VertexSet A = component_avoiding(chain, u, v);
  return chain.pi_mass(A) / chain.boundary_flow(A);
}

double tree_lower_bound(const Chain& chain, const BottleneckSequence& seq) {
  if (!chain.is_tree())
    throw std::invalid_argument("tree_lower_bound: derived graph is not a tree");
  SequenceReport rep = verify_sequence(chain, seq);
  if (!rep.valid || rep.max_theta < 1.0 - kFlowTol)
    throw std::invalid_argument("tree_lower_bound: not a valid 1-bottleneck sequence");

  double bound = 0.0;
  for (const auto& S : seq.sets) {
    // unique cut edge (a in S, b outside)
    int a = -1, b = -1, crossings = 0;
    S.for_each([&](int x) {
      for (int y : chain.neighbours(x))
        if (!S.contains(y)) {
          ++crossings;
          a = x;
          b = y;
        }
    });
    if (crossings != 1)
      throw std::invalid_argument("tree_lower_bound: set is not cut by a single edge");
    if (chain.pi_mass(S) <= 0.5 + kFlowTol)
      bound += tree_cut_hitting(chain, a, b);  // escape the small side
    else
      bound += tree_cut_hitting(chain, b, a);  // reverse-sequence orientation
  }
  return bound;
}

FrBoundResult fr_profile_bound(const Chain& chain, int cap,
                               const std::vector<VertexSet>* candidates) {
  const int n = chain.size();
  const Eigen::VectorXd& pi = chain.stationary();
  int m = 0;
  for (int v = 0; v < n; ++v)
    m = std::max(m, static_cast<int>(std::floor(std::log2(1.0 / pi[v]))));

  FrBoundResult res;
  res.profile.m = m;
  res.profile.values.assign(static_cast<size_t>(m),
                            std::numeric_limits<double>::infinity());

  auto consider = [&](const VertexSet& A) {
    if (A.empty() || A.is_full() || !chain.is_connected(A)) return;
    double mass = chain.pi_mass(A);
    double phi = chain.phi(A);
    for (int j = 1; j <= m; ++j) {
      double p = std::ldexp(1.0, -j);
      if (mass >= p / 2.0 - kFlowTol && mass <= p + kFlowTol)
        res.profile.values[static_cast<size_t>(j - 1)] =
            std::min(res.profile.values[static_cast<size_t>(j - 1)], phi);
    }
  };

  if (candidates) {
    for (const auto& A : *candidates) consider(A);
  } else {
    if (n > cap)
      throw std::runtime_error("fr_profile_bound: " + std::to_string(n) +
                               " states exceeds enumeration cap " + std::to_string(cap) +
                               "; supply candidate sets");
    for (uint32_t mask = 1; mask + 1 < (uint32_t{1} << n); ++mask) {
      VertexSet A(n);
      for (int v = 0; v < n; ++v)
        if (mask & (uint32_t{1} << v)) A.insert(v);
      consider(A);
    }
  }
  for (double phi : res.profile.values)
    if (std::isfinite(phi)) res.bound += 1.0 / (phi * phi);
  return res;
}

}  // namespace mixtime
