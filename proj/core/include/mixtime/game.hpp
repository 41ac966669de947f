#ifndef MIXTIME_GAME_HPP
#define MIXTIME_GAME_HPP

#include <memory>
#include <string>
#include <vector>

#include "mixtime/chain.hpp"
#include "mixtime/vertex_set.hpp"

namespace mixtime {

struct GameParams {
  int s = 0;
  double alpha = 0.5;  // 1/alpha must be an integer
  double beta = 0.5;
  double gamma = 0.5;
};

// v is alpha-near to u when pi(v) P_v(H(u) <= 1/alpha) >= alpha pi(u),
// computed by exactly 1/alpha steps of the chain absorbed at u.
bool is_alpha_near(const Chain& chain, int v, int u, double alpha);
// every vertex of A is alpha-near to some vertex of B
bool is_alpha_near_set(const Chain& chain, const VertexSet& A, const VertexSet& B,
                       double alpha);

struct AdjustmentReport {
  bool holds = false;
  bool exact = false;     // exhaustive enumeration vs sampled spot checks
  VertexSet witness_S;    // a violating S when holds is false
  long sets_checked = 0;
};

// Is B a beta-adjustment of A: for every S in B^c with A u S connected,
// Q((B u S)^c, A u S) >= beta Q((B u S)^c, B u S). Exact mode enumerates all
// such S (requires |B^c| <= cap); sampled mode checks S = empty plus random
// connected extensions and can only refute, not certify.
AdjustmentReport is_beta_adjustment(const Chain& chain, const VertexSet& A,
                                    const VertexSet& B, double beta, bool exact = true,
                                    int cap = 22, int samples = 200, unsigned seed = 0);

enum class Player { crawler, dasher };

struct GamePosition {
  VertexSet C;
  VertexSet D;
};

struct MoveReport {
  bool valid = false;
  std::string violated_rule;  // empty when valid
  // "verified" when every rule was checked exactly; "certified" when the
  // adjustment rule was only spot checked (S = empty exact, rest by strategy
  // guarantee)
  std::string provenance = "verified";
};

// Validates one move against the rule set of the given player. For Crawler
// the move is the new C; for Dasher the new D.
MoveReport validate_move(const Chain& chain, const GameParams& params,
                         const GamePosition& position, const VertexSet& move,
                         Player player, int adjustment_cap = 22);

class CrawlerStrategy {
 public:
  virtual ~CrawlerStrategy() = default;
  virtual VertexSet next(const Chain& chain, const GameParams& params,
                         const GamePosition& position) = 0;
};

class DasherStrategy {
 public:
  virtual ~DasherStrategy() = default;
  virtual VertexSet next(const Chain& chain, const GameParams& params,
                         const GamePosition& position) = 0;
};

// Crawls along the exit-frequency ordering of start s: C_1 is the halting
// vertex, and each later move adds vertices of D^c in label order until the
// residual inflow to C drops by the factor gamma.
class GreedyCrawler : public CrawlerStrategy {
 public:
  GreedyCrawler(const Chain& chain, int s);
  VertexSet next(const Chain& chain, const GameParams& params,
                 const GamePosition& position) override;
  int label_of(int v) const { return label_[static_cast<size_t>(v)]; }

 private:
  std::vector<int> label_;  // position of each vertex in the y-ordering
  std::vector<int> order_;  // vertices sorted by label
};

// Crosses one block per move: the opening move claims the block farthest
// from s, each later move annexes the next block in that order. Pairs with
// BlockDasher; with any other dasher its moves may be illegal.
class BlockCrawler : public CrawlerStrategy {
 public:
  BlockCrawler(const Chain& chain, int s, std::vector<VertexSet> blocks);
  VertexSet next(const Chain& chain, const GameParams& params,
                 const GamePosition& position) override;

 private:
  std::vector<VertexSet> blocks_;  // sorted by decreasing distance to s
  size_t taken_ = 0;
};

// Always answers D' = h_s(C u D); plays V once s is enclosed or in C.
class HullDasher : public DasherStrategy {
 public:
  VertexSet next(const Chain& chain, const GameParams& params,
                 const GamePosition& position) override;
};

// Dasher for a chain roughly isometric to a tree: thickens C by radius
// R = 2r^2 - r - 1, hulls the result, and keeps a trimmed shortest path to s
// open. Records its per-round paths for the geometry checks.
class RoughIsometryDasher : public DasherStrategy {
 public:
  explicit RoughIsometryDasher(int r);
  VertexSet next(const Chain& chain, const GameParams& params,
                 const GamePosition& position) override;

  int radius() const { return R_; }
  const std::vector<std::vector<int>>& sigma_paths() const { return sigmas_; }

 private:
  int r_;
  int R_;
  int round_ = 0;
  std::vector<int> sigma_;                  // current path, sigma_[0] in C
  std::vector<std::vector<int>> sigmas_;    // one path per completed round
};

// Dasher that swallows whole blocks: once C touches a block, the entire
// block joins D (then everything is hulled). Matches the hand analysis of
// the product-chain example; its moves can violate the nearness rule at a
// fixed alpha, so it is meant for non-strict games.
class BlockDasher : public DasherStrategy {
 public:
  explicit BlockDasher(std::vector<VertexSet> blocks);
  VertexSet next(const Chain& chain, const GameParams& params,
                 const GamePosition& position) override;

 private:
  std::vector<VertexSet> blocks_;
};

struct GameRound {
  VertexSet C;
  VertexSet D;
  double phi_D = 0.0;  // 0 for the final D = V round
  MoveReport crawler_check;
  MoveReport dasher_check;
};

struct GameTranscript {
  GameParams params;
  std::vector<GameRound> rounds;  // rounds 1..l+1; the last has D = V
  double score = 0.0;             // sum of 1/Phi(D_k), k = 1..l
  double bound = 0.0;             // 1/a^3 + (2/(a^2 b g)) * score
  bool all_moves_valid = true;
  bool all_verified = true;       // no "certified" provenance anywhere
  bool aborted = false;
  std::string abort_reason;
};

// Alternates moves from (empty, empty) until D = V, validating each move.
// strict: abort on the first invalid move; otherwise record and continue.
GameTranscript play_game(const Chain& chain, const GameParams& params,
                         CrawlerStrategy& crawler, DasherStrategy& dasher,
                         bool strict = true, int adjustment_cap = 22);

double game_bound(const GameParams& params, double score);

}  // namespace mixtime

#endif
