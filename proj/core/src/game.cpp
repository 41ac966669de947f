#include "mixtime/game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "mixtime/mixing.hpp"

namespace mixtime {

namespace {
constexpr double kFlowTol = 1e-12;

int steps_from_alpha(double alpha) {
  if (alpha <= 0.0 || alpha > 1.0)
    throw std::invalid_argument("alpha must be in (0,1]");
  double m = 1.0 / alpha;
  long mi = std::lround(m);
  if (std::abs(m - static_cast<double>(mi)) > 1e-9)
    throw std::invalid_argument("1/alpha must be an integer");
  return static_cast<int>(mi);
}

// P_.(H(u) <= m) for every start, by m steps of the chain absorbed at u
Eigen::VectorXd hit_within(const Chain& chain, int u, int m) {
  const int n = chain.size();
  Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
  h[u] = 1.0;
  Eigen::VectorXd next(n);
  for (int t = 0; t < m; ++t) {
    for (int x = 0; x < n; ++x) {
      if (x == u) {
        next[x] = 1.0;
        continue;
      }
      double acc = chain.self_loop(x) * h[x];
      for (const auto& [y, p] : chain.out_edges(x)) acc += p * h[y];
      next[x] = acc;
    }
    h.swap(next);
  }
  return h;
}

// deterministic shortest path from the set C to s (lowest-index tie breaks)
std::vector<int> shortest_path_to(const Chain& chain, const VertexSet& C, int s) {
  Eigen::VectorXi dist = chain.distances_from(VertexSet::of(chain.size(), {s}));
  int start = -1;
  C.for_each([&](int v) {
    if (start < 0 || dist[v] < dist[start]) start = v;
  });
  std::vector<int> path{start};
  int cur = start;
  while (cur != s) {
    int nxt = -1;
    for (int w : chain.neighbours(cur))
      if (dist[w] == dist[cur] - 1) {
        nxt = w;
        break;
      }
    path.push_back(nxt);
    cur = nxt;
  }
  return path;
}

struct Dsu {
  std::vector<int> parent;
  std::vector<double> removed;  // per-root sum of flow into C from D^c members

  explicit Dsu(int n) : parent(static_cast<size_t>(n), -1), removed(static_cast<size_t>(n), 0.0) {}

  int find(int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] =
          parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    parent[static_cast<size_t>(b)] = a;
    removed[static_cast<size_t>(a)] += removed[static_cast<size_t>(b)];
  }
};
}  // namespace

bool is_alpha_near(const Chain& chain, int v, int u, double alpha) {
  if (v == u) return true;
  int m = steps_from_alpha(alpha);
  const Eigen::VectorXd& pi = chain.stationary();
  return pi[v] * hit_within(chain, u, m)[v] >= alpha * pi[u] - kFlowTol;
}

bool is_alpha_near_set(const Chain& chain, const VertexSet& A, const VertexSet& B,
                       double alpha) {
  if (A.empty()) return true;
  if (B.empty()) return false;
  int m = steps_from_alpha(alpha);
  const Eigen::VectorXd& pi = chain.stationary();
  std::vector<bool> near(static_cast<size_t>(chain.size()), false);
  A.for_each([&](int v) { near[static_cast<size_t>(v)] = B.contains(v); });
  B.for_each([&](int u) {
    Eigen::VectorXd h = hit_within(chain, u, m);
    A.for_each([&](int v) {
      if (!near[static_cast<size_t>(v)] && pi[v] * h[v] >= alpha * pi[u] - kFlowTol)
        near[static_cast<size_t>(v)] = true;
    });
  });
  bool all = true;
  A.for_each([&](int v) { all = all && near[static_cast<size_t>(v)]; });
  return all;
}

namespace {
bool adjustment_condition(const Chain& chain, const VertexSet& A, const VertexSet& B,
                          const VertexSet& S, double beta) {
  VertexSet BS = B | S;
  VertexSet rest = BS.complement();
  double lhs = chain.flow(rest, A | S);
  double rhs = chain.flow(rest, BS);
  return lhs >= beta * rhs - kFlowTol;
}

// all S in ground with A u S connected, by anchored grow-or-ban recursion
bool enumerate_adjustment(const Chain& chain, const VertexSet& A, const VertexSet& B,
                          const VertexSet& ground, double beta, VertexSet& S,
                          VertexSet& banned, AdjustmentReport& rep) {
  ++rep.sets_checked;
  if (!adjustment_condition(chain, A, B, S, beta)) {
    rep.holds = false;
    rep.witness_S = S;
    return false;
  }
  std::vector<int> frontier;
  VertexSet base = A | S;
  base.for_each([&](int u) {
    for (int v : chain.neighbours(u))
      if (ground.contains(v) && !S.contains(v) && !banned.contains(v)) {
        frontier.push_back(v);
      }
  });
  std::sort(frontier.begin(), frontier.end());
  frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
  VertexSet local_ban(chain.size());
  for (int v : frontier) {
    S.insert(v);
    banned |= local_ban;
    bool ok = enumerate_adjustment(chain, A, B, ground, beta, S, banned, rep);
    banned = banned - local_ban;
    S.erase(v);
    if (!ok) return false;
    local_ban.insert(v);
    banned.insert(v);
  }
  banned = banned - local_ban;
  return true;
}
}  // namespace

AdjustmentReport is_beta_adjustment(const Chain& chain, const VertexSet& A,
                                    const VertexSet& B, double beta, bool exact, int cap,
                                    int samples, unsigned seed) {
  if (!A.is_subset_of(B)) throw std::invalid_argument("is_beta_adjustment: A must lie in B");
  if (!chain.is_connected(A) || A.empty())
    throw std::invalid_argument("is_beta_adjustment: A must be nonempty and connected");
  AdjustmentReport rep;
  rep.witness_S = chain.empty_set();
  VertexSet ground = B.complement();

  if (exact) {
    if (ground.count() > cap)
      throw std::runtime_error("is_beta_adjustment: |B^c| = " + std::to_string(ground.count()) +
                               " exceeds exact enumeration cap " + std::to_string(cap));
    rep.exact = true;
    rep.holds = true;
    VertexSet S(chain.size()), banned(chain.size());
    enumerate_adjustment(chain, A, B, ground, beta, S, banned, rep);
    return rep;
  }

  rep.exact = false;
  rep.holds = true;
  VertexSet empty(chain.size());
  ++rep.sets_checked;
  if (!adjustment_condition(chain, A, B, empty, beta)) {
    rep.holds = false;
    rep.witness_S = empty;
    return rep;
  }
  std::mt19937 rng(seed);
  const int total = ground.count();
  for (int it = 0; it < samples && total > 0; ++it) {
    // random connected extension of A
    VertexSet S(chain.size());
    VertexSet blob = A;
    std::uniform_int_distribution<int> size_dist(1, total);
    int want = size_dist(rng);
    for (int grown = 0; grown < want;) {
      std::vector<int> frontier;
      blob.for_each([&](int u) {
        for (int v : chain.neighbours(u))
          if (ground.contains(v) && !S.contains(v)) frontier.push_back(v);
      });
      std::sort(frontier.begin(), frontier.end());
      frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
      if (frontier.empty()) break;
      int pick = frontier[std::uniform_int_distribution<size_t>(0, frontier.size() - 1)(rng)];
      S.insert(pick);
      blob.insert(pick);
      ++grown;
    }
    ++rep.sets_checked;
    if (!adjustment_condition(chain, A, B, S, beta)) {
      rep.holds = false;
      rep.witness_S = S;
      return rep;
    }
  }
  return rep;
}

MoveReport validate_move(const Chain& chain, const GameParams& params,
                         const GamePosition& position, const VertexSet& move,
                         Player player, int adjustment_cap) {
  MoveReport rep;
  auto fail = [&](const std::string& rule) {
    rep.valid = false;
    rep.violated_rule = rule;
    return rep;
  };

  if (player == Player::crawler) {
    const VertexSet& C = position.C;
    const VertexSet& D = position.D;
    if (move.empty()) return fail("(a) connectivity: C' is empty");
    if (!C.is_subset_of(move)) return fail("(a) connectivity: C' does not contain C");
    if ((move - C).intersects(D)) return fail("(a) connectivity: C'\\C leaves D^c");
    if (!chain.is_connected(move)) return fail("(a) connectivity: C' is disconnected");
    double lhs = chain.flow((D | move).complement(), C);
    double rhs = chain.flow(D.complement(), C);
    if (lhs > params.gamma * rhs + kFlowTol)
      return fail("(b) isoperimetry: Q((D u C')^c,C) > gamma Q(D^c,C)");
    rep.valid = true;
    return rep;
  }

  const VertexSet& C = position.C;
  const VertexSet& D = position.D;
  const VertexSet& Dp = move;
  if (!(D | C).is_subset_of(Dp))
    return fail("(i) complement connectivity: D' does not contain D u C");
  if (!chain.is_connected(Dp.complement()))
    return fail("(i) complement connectivity: (D')^c is disconnected");
  if (!is_alpha_near_set(chain, chain.inner_boundary(Dp), C, params.alpha))
    return fail("(ii) nearness: inner boundary of D' is not alpha-near to C");
  if (Dp.contains(params.s)) {
    if (!Dp.is_full()) return fail("(iv) endgame: s in D' but D' != V");
    if (!is_alpha_near_set(chain, VertexSet::of(chain.size(), {params.s}), C, params.alpha))
      return fail("(iv) endgame: s is not alpha-near to C");
  }
  if (Dp.complement().count() <= adjustment_cap) {
    AdjustmentReport adj = is_beta_adjustment(chain, C, Dp, params.beta, true, adjustment_cap);
    if (!adj.holds)
      return fail("(iii) adjustment: witness S = " + adj.witness_S.to_string());
  } else {
    AdjustmentReport adj =
        is_beta_adjustment(chain, C, Dp, params.beta, false, adjustment_cap, 0);
    if (!adj.holds)
      return fail("(iii) adjustment: necessary condition at S = {} fails");
    rep.provenance = "certified";
  }
  rep.valid = true;
  return rep;
}

GreedyCrawler::GreedyCrawler(const Chain& chain, int s) {
  ExitFrequencies ef = exit_frequencies(chain, s);
  const int n = chain.size();
  order_.resize(static_cast<size_t>(n));
  std::iota(order_.begin(), order_.end(), 0);
  std::sort(order_.begin(), order_.end(), [&](int a, int b) {
    if (a == s || b == s) return b == s && a != s;
    if (ef.y[a] != ef.y[b]) return ef.y[a] < ef.y[b];
    return a < b;
  });
  label_.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) label_[static_cast<size_t>(order_[static_cast<size_t>(i)])] = i;
}

VertexSet GreedyCrawler::next(const Chain& chain, const GameParams& params,
                              const GamePosition& position) {
  const int n = chain.size();
  const VertexSet& C = position.C;
  const VertexSet& D = position.D;
  if (C.empty()) return VertexSet::of(n, {order_[0]});

  std::vector<int> outside;
  for (int i = 0; i < n; ++i) {
    int v = order_[static_cast<size_t>(i)];
    if (!D.contains(v)) outside.push_back(v);
  }

  double base = chain.flow(D.complement(), C);
  Dsu dsu(n);
  std::vector<bool> active(static_cast<size_t>(n), false);
  auto activate = [&](int v, double flow_into_C) {
    dsu.parent[static_cast<size_t>(v)] = v;
    dsu.removed[static_cast<size_t>(v)] = flow_into_C;
    active[static_cast<size_t>(v)] = true;
    for (int w : chain.neighbours(v))
      if (active[static_cast<size_t>(w)]) dsu.unite(v, w);
  };
  C.for_each([&](int v) { activate(v, 0.0); });
  const int v1 = order_[0];

  for (int v : outside) {
    activate(v, chain.flow(v, C));
    double resid = base - dsu.removed[static_cast<size_t>(dsu.find(v1))];
    if (resid <= params.gamma * base + kFlowTol) {
      VertexSet Cp(n);
      int root = dsu.find(v1);
      for (int x = 0; x < n; ++x)
        if (active[static_cast<size_t>(x)] && dsu.find(x) == root) Cp.insert(x);
      return Cp;
    }
  }
  throw std::logic_error("GreedyCrawler: no admissible extension found");
}

BlockCrawler::BlockCrawler(const Chain& chain, int s, std::vector<VertexSet> blocks)
    : blocks_(std::move(blocks)) {
  // BFS distance from s, then farthest block first
  const int n = chain.size();
  std::vector<int> dist(static_cast<size_t>(n), -1);
  std::vector<int> queue{s};
  dist[static_cast<size_t>(s)] = 0;
  for (size_t h = 0; h < queue.size(); ++h)
    for (int w : chain.neighbours(queue[h]))
      if (dist[static_cast<size_t>(w)] < 0) {
        dist[static_cast<size_t>(w)] = dist[static_cast<size_t>(queue[h])] + 1;
        queue.push_back(w);
      }
  auto nearest = [&](const VertexSet& block) {
    int best = n;
    block.for_each([&](int v) { best = std::min(best, dist[static_cast<size_t>(v)]); });
    return best;
  };
  std::sort(blocks_.begin(), blocks_.end(), [&](const VertexSet& a, const VertexSet& b) {
    return nearest(a) > nearest(b);
  });
}

VertexSet BlockCrawler::next(const Chain& chain, const GameParams& params,
                             const GamePosition& position) {
  (void)params;
  if (position.C.empty()) {
    taken_ = 1;
    return blocks_.empty() ? chain.full_set() : blocks_[0];
  }
  if (taken_ < blocks_.size()) return position.C | blocks_[taken_++];
  return chain.full_set();
}

VertexSet HullDasher::next(const Chain& chain, const GameParams& params,
                           const GamePosition& position) {
  if (position.C.contains(params.s)) return chain.full_set();
  return chain.hull(params.s, position.C | position.D);
}

RoughIsometryDasher::RoughIsometryDasher(int r) : r_(r), R_(2 * r * r - r - 1) {
  if (r < 1) throw std::invalid_argument("RoughIsometryDasher: r must be >= 1");
}

VertexSet RoughIsometryDasher::next(const Chain& chain, const GameParams& params,
                                    const GamePosition& position) {
  ++round_;
  const VertexSet& C = position.C;
  VertexSet thick = chain.ball(R_, C);
  if (thick.contains(params.s)) {
    sigma_.clear();
    sigmas_.push_back(sigma_);
    return chain.full_set();
  }

  if (round_ == 1) {
    sigma_ = shortest_path_to(chain, C, params.s);
  } else {
    int last_in_C = -1;
    for (size_t i = 0; i < sigma_.size(); ++i)
      if (C.contains(sigma_[i])) last_in_C = static_cast<int>(i);
    if (last_in_C >= 0 && last_in_C <= R_ - 1)
      sigma_.erase(sigma_.begin(), sigma_.begin() + last_in_C);
    else
      sigma_ = shortest_path_to(chain, C, params.s);
  }
  sigmas_.push_back(sigma_);

  VertexSet Dn = chain.hull(params.s, thick);
  for (int i = 1; i <= R_ && i < static_cast<int>(sigma_.size()); ++i)
    Dn.erase(sigma_[static_cast<size_t>(i)]);
  return Dn;
}

BlockDasher::BlockDasher(std::vector<VertexSet> blocks) : blocks_(std::move(blocks)) {}

VertexSet BlockDasher::next(const Chain& chain, const GameParams& params,
                            const GamePosition& position) {
  if (position.C.contains(params.s)) return chain.full_set();
  VertexSet U = position.C | position.D;
  for (const auto& block : blocks_)
    if (block.intersects(position.C)) U |= block;
  if (U.contains(params.s)) return chain.full_set();
  return chain.hull(params.s, U);
}

double game_bound(const GameParams& params, double score) {
  double a = params.alpha;
  return 1.0 / (a * a * a) + 2.0 / (a * a * params.beta * params.gamma) * score;
}

GameTranscript play_game(const Chain& chain, const GameParams& params,
                         CrawlerStrategy& crawler, DasherStrategy& dasher, bool strict,
                         int adjustment_cap) {
  steps_from_alpha(params.alpha);  // parameter sanity
  if (params.beta <= 0.0 || params.beta > 1.0 || params.gamma <= 0.0 || params.gamma >= 1.0)
    throw std::invalid_argument("play_game: beta in (0,1] and gamma in (0,1) required");
  if (params.s < 0 || params.s >= chain.size())
    throw std::invalid_argument("play_game: start vertex out of range");

  GameTranscript tr;
  tr.params = params;
  GamePosition pos{chain.empty_set(), chain.empty_set()};

  auto finish = [&]() {
    tr.bound = game_bound(params, tr.score);
    return tr;
  };

  for (int round = 0; round <= chain.size() + 1; ++round) {
    GameRound rec;
    rec.C = crawler.next(chain, params, pos);
    rec.crawler_check = validate_move(chain, params, pos, rec.C, Player::crawler, adjustment_cap);
    if (!rec.crawler_check.valid) {
      tr.all_moves_valid = false;
      if (strict) {
        rec.D = pos.D;
        tr.rounds.push_back(rec);
        tr.aborted = true;
        tr.abort_reason = "crawler: " + rec.crawler_check.violated_rule;
        return finish();
      }
    }
    pos.C = rec.C;

    rec.D = dasher.next(chain, params, pos);
    rec.dasher_check = validate_move(chain, params, pos, rec.D, Player::dasher, adjustment_cap);
    if (!rec.dasher_check.valid) tr.all_moves_valid = false;
    if (rec.dasher_check.provenance == "certified" ||
        rec.crawler_check.provenance == "certified")
      tr.all_verified = false;
    if (!rec.dasher_check.valid && strict) {
      tr.rounds.push_back(rec);
      tr.aborted = true;
      tr.abort_reason = "dasher: " + rec.dasher_check.violated_rule;
      return finish();
    }
    pos.D = rec.D;

    if (!rec.D.is_full()) {
      rec.phi_D = chain.phi(rec.D);
      tr.score += 1.0 / rec.phi_D;
    }
    bool done = rec.D.is_full();
    tr.rounds.push_back(std::move(rec));
    if (done) return finish();
  }
  tr.aborted = true;
  tr.abort_reason = "round limit exceeded without reaching D = V";
  return finish();
}

}  // namespace mixtime
