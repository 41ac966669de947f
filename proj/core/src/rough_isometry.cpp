#include "mixtime/rough_isometry.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <random>
#include <stdexcept>

#include "mixtime/mixing.hpp"

namespace mixtime {

namespace {

std::vector<Eigen::VectorXi> all_pairs_distances(const Chain& c) {
  std::vector<Eigen::VectorXi> d;
  d.reserve(static_cast<size_t>(c.size()));
  for (int v = 0; v < c.size(); ++v)
    d.push_back(c.distances_from(VertexSet::of(c.size(), {v})));
  return d;
}

// every path from A to B meets C
bool separated_by(const Chain& c, const VertexSet& A, const VertexSet& B,
                  const VertexSet& C) {
  VertexSet reach(c.size());
  std::vector<int> queue;
  (A - C).for_each([&](int v) {
    reach.insert(v);
    queue.push_back(v);
  });
  for (size_t h = 0; h < queue.size(); ++h)
    for (int w : c.neighbours(queue[h]))
      if (!C.contains(w) && !reach.contains(w)) {
        reach.insert(w);
        queue.push_back(w);
      }
  return !reach.intersects(B - C);
}

// internal diameter of A within the induced subgraph (INT_MAX if disconnected)
int internal_diameter(const Chain& c, const VertexSet& A) {
  int diam = 0;
  std::vector<int> members = A.indices();
  for (int src : members) {
    std::vector<int> dist(static_cast<size_t>(c.size()), -1);
    std::vector<int> queue{src};
    dist[static_cast<size_t>(src)] = 0;
    for (size_t h = 0; h < queue.size(); ++h) {
      int u = queue[h];
      for (int w : c.neighbours(u))
        if (A.contains(w) && dist[static_cast<size_t>(w)] < 0) {
          dist[static_cast<size_t>(w)] = dist[static_cast<size_t>(u)] + 1;
          queue.push_back(w);
        }
    }
    for (int v : members) {
      if (dist[static_cast<size_t>(v)] < 0) return INT_MAX;
      diam = std::max(diam, dist[static_cast<size_t>(v)]);
    }
  }
  return diam;
}

// tree path between a and b (derived graph must be a tree)
std::vector<int> tree_path(const Chain& T, int a, int b) {
  Eigen::VectorXi dist = T.distances_from(VertexSet::of(T.size(), {b}));
  std::vector<int> path{a};
  int cur = a;
  while (cur != b) {
    for (int w : T.neighbours(cur))
      if (dist[w] == dist[cur] - 1) {
        cur = w;
        break;
      }
    path.push_back(cur);
  }
  return path;
}

}  // namespace

std::vector<std::vector<int>> Correspondence::tree_to_graph(int n_tree) const {
  std::vector<std::vector<int>> m(static_cast<size_t>(n_tree));
  for (const auto& [t, g] : pairs) {
    if (t < 0 || t >= n_tree) throw std::invalid_argument("correspondence: tree index out of range");
    m[static_cast<size_t>(t)].push_back(g);
  }
  for (auto& v : m) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return m;
}

std::vector<std::vector<int>> Correspondence::graph_to_tree(int n_graph) const {
  std::vector<std::vector<int>> m(static_cast<size_t>(n_graph));
  for (const auto& [t, g] : pairs) {
    if (g < 0 || g >= n_graph)
      throw std::invalid_argument("correspondence: graph index out of range");
    m[static_cast<size_t>(g)].push_back(t);
  }
  for (auto& v : m) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return m;
}

StretchResult correspondence_stretch(const Chain& G, const Chain& T,
                                     const Correspondence& corr) {
  auto t2g = corr.tree_to_graph(T.size());
  auto g2t = corr.graph_to_tree(G.size());
  for (int t = 0; t < T.size(); ++t)
    if (t2g[static_cast<size_t>(t)].empty())
      throw std::invalid_argument("correspondence: tree vertex " + T.states()[t] +
                                  " is isolated");
  for (int g = 0; g < G.size(); ++g)
    if (g2t[static_cast<size_t>(g)].empty())
      throw std::invalid_argument("correspondence: graph vertex " + G.states()[g] +
                                  " is isolated");

  auto dG = all_pairs_distances(G);
  auto dT = all_pairs_distances(T);
  StretchResult res;
  const auto& P = corr.pairs;
  for (size_t i = 0; i < P.size(); ++i)
    for (size_t j = i; j < P.size(); ++j) {
      double a = dT[static_cast<size_t>(P[i].first)][P[j].first];
      double b = dG[static_cast<size_t>(P[i].second)][P[j].second];
      double ratio = (std::max(a, b) + 1.0) / (std::min(a, b) + 1.0);
      if (ratio > res.stretch) {
        res.stretch = ratio;
        res.t = P[i].first;
        res.g = P[i].second;
        res.t2 = P[j].first;
        res.g2 = P[j].second;
      }
    }
  res.certified_r = static_cast<int>(std::ceil(res.stretch - 1e-12));
  return res;
}

AtSetsReport build_at_sets(const Chain& G, const Chain& T, const Correspondence& corr,
                           int r, unsigned seed) {
  auto t2g = corr.tree_to_graph(T.size());
  AtSetsReport rep;
  rep.internal_diameter_bound = 2 * r * (r + 1) + (r - 1);
  rep.disjointness_distance = 2 * r * r * (r + 1) + r;

  const int nt = T.size();
  rep.at.reserve(static_cast<size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    VertexSet ct = VertexSet::from_indices(G.size(), t2g[static_cast<size_t>(t)]);
    rep.at.push_back(G.ball(r * (r + 1), ct));
  }

  for (int t = 0; t < nt && rep.connectivity_ok; ++t) {
    int diam = internal_diameter(G, rep.at[static_cast<size_t>(t)]);
    if (diam > rep.internal_diameter_bound) {
      rep.connectivity_ok = false;
      rep.first_failure = "A_t for t=" + T.states()[t] +
                          (diam == INT_MAX ? " is disconnected"
                                           : " has internal diameter " + std::to_string(diam));
    }
  }

  auto dT = all_pairs_distances(T);
  for (int a = 0; a < nt && rep.disjointness_ok; ++a)
    for (int b = a + 1; b < nt; ++b)
      if (dT[static_cast<size_t>(a)][b] >= rep.disjointness_distance &&
          rep.at[static_cast<size_t>(a)].intersects(rep.at[static_cast<size_t>(b)])) {
        rep.disjointness_ok = false;
        rep.first_failure = "A_s and A_t intersect at tree distance " +
                            std::to_string(dT[static_cast<size_t>(a)][b]);
        break;
      }

  auto check_triple = [&](int a, int t, int b) {
    ++rep.triples_checked;
    VertexSet ca = VertexSet::from_indices(G.size(), t2g[static_cast<size_t>(a)]);
    VertexSet cb = VertexSet::from_indices(G.size(), t2g[static_cast<size_t>(b)]);
    if (!separated_by(G, ca, cb, rep.at[static_cast<size_t>(t)])) {
      rep.separation_ok = false;
      rep.first_failure = "C_{a,G} reaches C_{b,G} avoiding A_t (a=" + T.states()[a] +
                          ", t=" + T.states()[t] + ", b=" + T.states()[b] + ")";
    }
  };
  if (nt <= 30) {
    for (int a = 0; a < nt && rep.separation_ok; ++a)
      for (int b = 0; b < nt && rep.separation_ok; ++b) {
        if (a == b) continue;
        std::vector<int> path = tree_path(T, a, b);
        for (size_t i = 1; i + 1 < path.size() && rep.separation_ok; ++i)
          check_triple(a, path[i], b);
      }
  } else {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> pick(0, nt - 1);
    for (int it = 0; it < 10000 && rep.separation_ok; ++it) {
      int a = pick(rng), b = pick(rng);
      if (a == b) continue;
      std::vector<int> path = tree_path(T, a, b);
      if (path.size() < 3) continue;
      int t = path[std::uniform_int_distribution<size_t>(1, path.size() - 2)(rng)];
      check_triple(a, t, b);
    }
  }
  return rep;
}

double kac_check(const Chain& chain, const VertexSet& L, const VertexSet& C,
                 const VertexSet& R) {
  const int n = chain.size();
  if (L.intersects(C) || L.intersects(R) || C.intersects(R) ||
      (L | C | R) != chain.full_set())
    throw std::invalid_argument("kac_check: (L, C, R) is not a partition");
  if (!separated_by(chain, L, R, C))
    throw std::invalid_argument("kac_check: a path from L to R avoids C");

  double piC = chain.pi_mass(C);
  if (piC <= 0.0) throw std::invalid_argument("kac_check: C is empty");
  const Eigen::VectorXd& pi = chain.stationary();

  // E_v[H^+(L^c)] = 1 + sum_w p_vw E_w[H(L^c)], with L^c = C u R
  VertexSet Lc = L.complement();
  Eigen::VectorXd h = L.empty() ? Eigen::VectorXd::Zero(n) : hitting_vector(chain, Lc);
  double e = 0.0;
  C.for_each([&](int v) {
    double plus = 1.0 + chain.self_loop(v) * h[v];
    for (const auto& [w, p] : chain.out_edges(v)) plus += p * h[w];
    e += pi[v] / piC * plus;
  });
  return std::abs(chain.pi_mass(L | C) - piC * e);
}

RiLowerBoundResult ri_tree_lower_bound(const Chain& X, const Chain& T,
                                       const Correspondence& corr, int r,
                                       const BottleneckSequence& tree_seq) {
  SequenceReport sr = verify_sequence(T, tree_seq);
  if (!sr.valid)
    throw std::invalid_argument("ri_tree_lower_bound: invalid tree sequence (" +
                                sr.first_violation + ")");
  if (!T.is_tree()) throw std::invalid_argument("ri_tree_lower_bound: T is not a tree");

  RiLowerBoundResult res;
  for (const auto& S : tree_seq.sets) res.tree_size_sum += S.count();

  // cut vertex per set: the unique outside endpoint of the crossing edge
  std::vector<int> cuts;
  for (const auto& S : tree_seq.sets) {
    int outside = -1, crossings = 0;
    S.for_each([&](int x) {
      for (int y : T.neighbours(x))
        if (!S.contains(y)) {
          ++crossings;
          outside = y;
        }
    });
    if (crossings != 1)
      throw std::invalid_argument("ri_tree_lower_bound: set has multiple crossing edges");
    cuts.push_back(outside);
  }

  const int gap = 2 * r * r * (r + 1) + r;
  auto dT = all_pairs_distances(T);
  std::vector<int> thinned;
  for (int t : cuts)
    if (thinned.empty() || dT[static_cast<size_t>(thinned.back())][t] >= gap)
      thinned.push_back(t);
  res.cut_tree_vertices = thinned;

  // far reference: a graph vertex for the deepest tree vertex outside S_l
  auto t2g = corr.tree_to_graph(T.size());
  VertexSet outside_last = tree_seq.sets.back().complement();
  int far_t = -1;
  int t0 = cuts.front();
  outside_last.for_each([&](int t) {
    if (far_t < 0 || dT[static_cast<size_t>(t0)][t] > dT[static_cast<size_t>(t0)][far_t])
      far_t = t;
  });
  int g_far = t2g[static_cast<size_t>(far_t)].front();

  AtSetsReport at = build_at_sets(X, T, corr, r);
  for (int t : thinned) {
    const VertexSet& Cj = at.at[static_cast<size_t>(t)];
    if (Cj.contains(g_far)) continue;  // block swallowed the far reference
    // far side: component of g_far in X minus the block
    VertexSet Rj(X.size());
    std::vector<int> queue{g_far};
    Rj.insert(g_far);
    for (size_t h = 0; h < queue.size(); ++h)
      for (int w : X.neighbours(queue[h]))
        if (!Cj.contains(w) && !Rj.contains(w)) {
          Rj.insert(w);
          queue.push_back(w);
        }
    Eigen::VectorXd hv = hitting_vector(X, Rj);
    double best = std::numeric_limits<double>::infinity();
    Cj.for_each([&](int u) { best = std::min(best, hv[u]); });
    res.bound += best;
  }
  return res;
}

RobustnessReport robustness_compare(const Chain& X, const Chain& Y,
                                    const Correspondence& corr, int r,
                                    const GameParams& params) {
  RobustnessReport rep;
  rep.t_stop_x = stop_time(X);
  rep.t_stop_y = stop_time(Y);

  GreedyCrawler crawler(X, params.s);
  RoughIsometryDasher dasher(r);
  rep.transcript = play_game(X, params, crawler, dasher, /*strict=*/false);
  rep.game_score = rep.transcript.score;
  rep.game_bound = rep.transcript.bound;
  rep.tree_max_score = max_score_tree(Y).score;

  const int R = 2 * r * r - r - 1;
  const int diam_bound = 2 * r * r * (R + 2) + R;
  const int growth_slack = 4 * r * r * r * r - 2 * r * r * r + 4 * r * r + r - 1;
  const int K = 4 * r * r * r * r - 2 * r * r * r + 8 * r * r - r - 2;
  const double nG = X.size();

  std::vector<VertexSet> Ds;
  for (const auto& round : rep.transcript.rounds)
    if (!round.D.is_full()) Ds.push_back(round.D);
  const int l = static_cast<int>(Ds.size());
  for (const auto& D : Ds)
    rep.size_product_sum += static_cast<double>(D.count()) * D.complement().count();

  for (int n = 0; n < l && rep.diameter_ok; ++n) {
    VertexSet bd = X.outer_boundary(Ds[static_cast<size_t>(n)]);
    std::vector<int> members = bd.indices();
    for (size_t i = 0; i < members.size() && rep.diameter_ok; ++i) {
      Eigen::VectorXi dist = X.distances_from(VertexSet::of(X.size(), {members[i]}));
      for (size_t j = i + 1; j < members.size(); ++j)
        if (dist[members[j]] > diam_bound) {
          rep.diameter_ok = false;
          rep.first_failure = "boundary diameter " + std::to_string(dist[members[j]]) +
                              " exceeds bound " + std::to_string(diam_bound) + " at round " +
                              std::to_string(n + 1);
          break;
        }
    }
  }

  for (int n = 0; n < l && rep.growth_ok; ++n)
    for (int k = 1; n + k < l; ++k) {
      int d = X.distance(Ds[static_cast<size_t>(n)],
                         Ds[static_cast<size_t>(n + k)].complement());
      if (d < k - growth_slack) {
        rep.growth_ok = false;
        rep.first_failure = "d(D_n, D_{n+k}^c) = " + std::to_string(d) +
                            " below k - slack at n=" + std::to_string(n + 1) +
                            ", k=" + std::to_string(k);
        break;
      }
    }

  // tree comparison sequence from v0 in C_1 toward s, and the N_k indices
  if (l > 0 && !rep.transcript.rounds.empty()) {
    auto g2t = corr.graph_to_tree(X.size());
    auto t2g = corr.tree_to_graph(Y.size());
    int v0 = rep.transcript.rounds.front().C.first();
    int t_start = g2t[static_cast<size_t>(v0)].front();
    int t_end = g2t[static_cast<size_t>(params.s)].front();
    std::vector<int> tpath = tree_path(Y, t_start, t_end);
    std::vector<VertexSet> S;  // S_i = side of t_i away from t_end, i = 1..p-1
    for (size_t i = 1; i + 1 < tpath.size(); ++i) {
      VertexSet side(Y.size());
      std::vector<int> queue;
      // component of t_{i-1}... everything separated from t_end by t_i
      VertexSet cut = VertexSet::of(Y.size(), {tpath[i]});
      VertexSet reach(Y.size());
      queue.push_back(t_end);
      reach.insert(t_end);
      for (size_t h = 0; h < queue.size(); ++h)
        for (int w : Y.neighbours(queue[h]))
          if (!cut.contains(w) && !reach.contains(w)) {
            reach.insert(w);
            queue.push_back(w);
          }
      for (int v = 0; v < Y.size(); ++v)
        if (!reach.contains(v) && v != tpath[i]) side.insert(v);
      S.push_back(side);
    }
    const int p1 = static_cast<int>(S.size());
    std::vector<int> N(static_cast<size_t>(l), p1 + 1);
    for (int k = 0; k < l; ++k) {
      VertexSet img(Y.size());
      Ds[static_cast<size_t>(k)].for_each([&](int v) {
        for (int t : g2t[static_cast<size_t>(v)]) img.insert(t);
      });
      for (int i = 0; i < p1; ++i)
        if (!S[static_cast<size_t>(i)].complement().intersects(img)) {
          N[static_cast<size_t>(k)] = i + 1;
          break;
        }
    }
    for (int n = 0; n < l && rep.index_monotone_ok; ++n)
      for (int k = K + 1; n + k < l; ++k)
        if (N[static_cast<size_t>(n + k)] <= N[static_cast<size_t>(n)]) {
          rep.index_monotone_ok = false;
          rep.first_failure = "N index not increasing at n=" + std::to_string(n + 1) +
                              ", k=" + std::to_string(k);
          break;
        }
    (void)t2g;
  }

  for (int j = 1; j <= K && rep.offset_sum_ok; ++j) {
    double offset = 0.0;
    for (int k = 0; k + j < l; ++k)
      offset += static_cast<double>(Ds[static_cast<size_t>(k)].count()) *
                Ds[static_cast<size_t>(k + j)].complement().count();
    double rhs = 2.0 * offset + 0.5 * j * nG * nG;
    if (rep.size_product_sum > rhs + 1e-9) {
      rep.offset_sum_ok = false;
      rep.first_failure = "offset sum inequality fails at j=" + std::to_string(j);
    }
  }

  // witness set on the tree: a connected, co-connected A with
  // |A| >= |V(T)|/(4 Delta) and |A^c| >= |V(T)|/2
  {
    const int nT = Y.size();
    const int delta = Y.max_degree();
    bool found = false;
    for (int v = 0; v < nT && !found; ++v)
      for (int w : Y.neighbours(v)) {
        // side of edge (v,w) containing v
        VertexSet A(nT);
        std::vector<int> queue{v};
        A.insert(v);
        for (size_t h = 0; h < queue.size(); ++h)
          for (int x : Y.neighbours(queue[h]))
            if (x != w && !A.contains(x)) {
              A.insert(x);
              queue.push_back(x);
            }
        if (A.count() * 4 * delta >= nT && A.complement().count() * 2 >= nT) {
          found = true;
          break;
        }
      }
    rep.witness_ok = found;
    if (!found && rep.first_failure.empty())
      rep.first_failure = "no witness set of the required sizes on the tree";
  }
  return rep;
}

}  // namespace mixtime
