#ifndef MIXTIME_BOTTLENECK_HPP
#define MIXTIME_BOTTLENECK_HPP

#include <string>
#include <vector>

#include "mixtime/chain.hpp"
#include "mixtime/vertex_set.hpp"

namespace mixtime {

// Nested family S_1 c ... c S_l with parameter theta. The flow condition is
// Q(S_{j+1} \ S_j, S_j) >= theta * Q(S_j^c, S_j) for every j < l.
struct BottleneckSequence {
  double theta = 1.0;
  std::vector<VertexSet> sets;
};

struct SequenceReport {
  bool valid = false;
  std::string first_violation;  // empty when valid
  int index = -1;               // 1-based index of the offending set, -1 if none
  // Largest theta the flow conditions support (1.0 when there is at most one
  // set); meaningful only when the structural conditions pass.
  double max_theta = 0.0;
};

SequenceReport verify_sequence(const Chain& chain, const BottleneckSequence& seq);

// Sum of 1/Phi(S_j). Throws (citing the report) when the sequence is invalid.
double sequence_score(const Chain& chain, const BottleneckSequence& seq);

// Greedy construction from the exit-frequency ordering of start s: states are
// labelled by ascending y (ties by index, s last), B_i is the part of the
// first i labels connected to the halting vertex, and indices advance by
//   m_{i+1} = min { m > m_i : Q(B_m^c, B_{m_i}) <= (1-theta) Q(B_{m_i}^c, B_{m_i}) }.
// The result satisfies E_s[tau] < score / (1 - theta).
BottleneckSequence greedy_sequence(const Chain& chain, int s, double theta);

struct MaxScoreResult {
  double score = 0.0;
  BottleneckSequence witness;
};

// Exact maximum of the score over all valid theta-sequences, by DP over
// connected sets with connected complements. Throws when |V| > cap.
MaxScoreResult max_score_brute(const Chain& chain, double theta, int cap = 14);

// Tree chains only, theta = 1: per-edge weights 1/Phi(side) and a maximum
// weight path search; the witness is the chain of one-side cut sets.
MaxScoreResult max_score_tree(const Chain& chain);

// E_u[H(v)] across a tree edge, as pi(A)/Q(A,A^c) with A the u-side of the
// cut. Throws on non-trees and non-edges.
double tree_cut_hitting(const Chain& chain, int u, int v);

// Prop-style certified lower bound for a 1-bottleneck sequence on a tree:
// sum of cut-edge hitting times, oriented away from the small side while
// pi(S_i) <= 1/2 and into it afterwards.
double tree_lower_bound(const Chain& chain, const BottleneckSequence& seq);

struct ConductanceProfile {
  int m = 0;
  // values[j-1] = Phi(2^-j) for j = 1..m; +infinity for empty dyadic bands.
  std::vector<double> values;
};

struct FrBoundResult {
  ConductanceProfile profile;
  double bound = 0.0;  // sum over nonempty bands of 1/Phi(2^-j)^2
};

// Conductance profile over dyadic mass bands and the associated square-sum
// bound. Enumerates connected sets when |V| <= cap; otherwise the caller
// must supply candidate sets (filtered for connectivity and band membership).
FrBoundResult fr_profile_bound(const Chain& chain, int cap = 18,
                               const std::vector<VertexSet>* candidates = nullptr);

}  // namespace mixtime

#endif
