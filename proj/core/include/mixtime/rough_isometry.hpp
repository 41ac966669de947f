#ifndef MIXTIME_ROUGH_ISOMETRY_HPP
#define MIXTIME_ROUGH_ISOMETRY_HPP

#include <string>
#include <utility>
#include <vector>

#include "mixtime/bottleneck.hpp"
#include "mixtime/chain.hpp"
#include "mixtime/game.hpp"
#include "mixtime/vertex_set.hpp"

namespace mixtime {

// Relation between V(T) and V(G); both sides must be fully covered.
struct Correspondence {
  std::vector<std::pair<int, int>> pairs;  // (tree vertex, graph vertex)

  std::vector<std::vector<int>> tree_to_graph(int n_tree) const;
  std::vector<std::vector<int>> graph_to_tree(int n_graph) const;
};

struct StretchResult {
  double stretch = 1.0;
  int certified_r = 1;  // smallest integer >= stretch
  // the achieving pair of pairs: (t, g), (t', g')
  int t = 0, g = 0, t2 = 0, g2 = 0;
};

// Exact maximum over all pairs of pairs of
// (d_T v d_G + 1) / (d_T ^ d_G + 1), via BFS all-pairs distances.
StretchResult correspondence_stretch(const Chain& G, const Chain& T,
                                     const Correspondence& corr);

struct AtSetsReport {
  std::vector<VertexSet> at;  // A_t per tree vertex, radius r(r+1) around C_{t,G}
  bool connectivity_ok = true;       // each A_t connected, internal diameter bounded
  bool separation_ok = true;         // C_{a,G} separated from C_{b,G} by A_t, t on [a,b]
  bool disjointness_ok = true;       // A_s and A_t disjoint at large tree distance
  int internal_diameter_bound = 0;   // 2r(r+1)+(r-1)
  int disjointness_distance = 0;     // 2r^2(r+1)+r
  long triples_checked = 0;
  std::string first_failure;
};

// Builds every A_t and checks the three structural lemmas exhaustively
// (separation over all triples when |V(T)| <= 30, else a seeded sample).
// A failing check means the inputs are not a stretch-r correspondence.
AtSetsReport build_at_sets(const Chain& G, const Chain& T, const Correspondence& corr,
                           int r, unsigned seed = 0);

// |pi(L u C) - pi(C) E_{pi_C}[H^+(L^c)]| for a partition separated by C.
// Throws when (L, C, R) is not a partition or some L-R path avoids C.
double kac_check(const Chain& chain, const VertexSet& L, const VertexSet& C,
                 const VertexSet& R);

struct RiLowerBoundResult {
  double bound = 0.0;                  // sum over blocks of min_u E_u[H(R_j)]
  std::vector<int> cut_tree_vertices;  // thinned t_i
  double tree_size_sum = 0.0;          // sum |S_i| over the input sequence
};

// Certified hitting-time lower bound transported through the correspondence:
// cut vertices from the tree sequence, thinned to pairwise tree distance
// >= 2r^2(r+1)+r, each giving a block C_j = A_{t_j}; the result chains
// min-hitting times into the far side of each block.
RiLowerBoundResult ri_tree_lower_bound(const Chain& X, const Chain& T,
                                       const Correspondence& corr, int r,
                                       const BottleneckSequence& tree_seq);

struct RobustnessReport {
  double t_stop_x = 0.0;
  double t_stop_y = 0.0;
  double game_score = 0.0;       // sum 1/Phi(D_k) from the played game
  double game_bound = 0.0;
  double tree_max_score = 0.0;   // max_score_tree on Y
  double size_product_sum = 0.0; // sum |D_n||D_n^c|
  GameTranscript transcript;
  // transcript geometry checks, with the exact constants
  bool diameter_ok = true;       // boundary diameter <= 2r^2(R+2)+R
  bool growth_ok = true;         // d(D_n, D_{n+k}^c) >= k - (4r^4-2r^3+4r^2+r-1)
  bool index_monotone_ok = true; // N_{n+k} > N_n for k >= K+1
  bool offset_sum_ok = true;     // for every j <= K
  bool witness_ok = true;        // the |A| >= |V(T)|/(4 Delta) witness exists
  std::string first_failure;
};

// Plays crawler-greedy against the rough-isometry Dasher on X, computes the
// tree maximum on Y, and checks the transcript geometry lemmas. The game is
// played in non-strict mode: the alpha, beta this dasher can honour depend
// on Delta, eps and r and need not match the supplied params.
RobustnessReport robustness_compare(const Chain& X, const Chain& Y,
                                    const Correspondence& corr, int r,
                                    const GameParams& params);

}  // namespace mixtime

#endif
