#ifndef MIXTIME_CHAIN_HPP
#define MIXTIME_CHAIN_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "mixtime/vertex_set.hpp"

namespace mixtime {

struct Conductance {
  std::string u;
  std::string v;
  double c;
};

// Flags reported by Chain::validate. All checks are reported, none throw.
struct ValidationReport {
  bool lazy = false;
  bool irreducible = false;
  bool reversible = false;
  bool eps_uniform = false;
  double eps = 1.0;            // the eps the uniformity check was run at
  double flow_ratio = 0.0;     // min/max of pi(u)p_uv over directed edges
  double max_row_error = 0.0;  // worst |row sum - 1|
  double detailed_balance_error = 0.0;
  int component_count = 1;
  std::vector<std::vector<int>> components;  // populated when not connected

  bool all_ok() const { return lazy && irreducible && reversible && eps_uniform; }
};

// A finite lazy Markov chain together with its derived (undirected) graph.
// Immutable after construction; all member functions are const.
class Chain {
 public:
  // Row-stochastic transition matrix, entries in [0,1]. Throws on malformed
  // input (bad row sums, negative entries, disconnected derived graph).
  // allow_nonlazy skips the p_vv = 1/2 requirement (downstream bounds then
  // have unmet preconditions, which validate() reports).
  static Chain from_matrix(std::vector<std::string> states, Eigen::MatrixXd P,
                           bool allow_nonlazy = false);

  // Lazy walk from edge conductances: p_vv = 1/2, p_uv = c_uv / (2 sum_w c_vw).
  // The result is reversible with pi(v) proportional to sum_w c_vw.
  static Chain from_conductances(std::vector<std::string> states,
                                 const std::vector<Conductance>& edges);

  int size() const { return n_; }
  const std::vector<std::string>& states() const { return states_; }
  int index_of(const std::string& state) const;  // throws on unknown id

  double p(int u, int v) const;
  double self_loop(int v) const { return diag_[v]; }
  // Off-diagonal nonzero transitions out of u, as (target, probability).
  const std::vector<std::pair<int, double>>& out_edges(int u) const { return out_[u]; }
  // Neighbours in the derived undirected graph.
  const std::vector<int>& neighbours(int v) const { return nbr_[v]; }
  int max_degree() const;

  Eigen::MatrixXd dense_matrix() const;  // intended for small chains
  bool built_from_conductances() const { return from_conductances_; }

  // Stationary distribution. Conductance-built chains use the closed form
  // pi(v) ~ sum_w c_vw; matrix chains solve (P^T - I)x = 0 with a
  // normalization row. The pi*P = pi residual is checked either way and a
  // residual above tol raises.
  const Eigen::VectorXd& stationary() const;
  double stationary_residual() const;

  ValidationReport validate(double eps = 1.0) const;

  // Edge flow Q(A,B) = P_pi(X_0 in A, X_1 in B). Includes the lazy
  // self-loop terms for states in both A and B.
  double flow(const VertexSet& A, const VertexSet& B) const;
  double flow(int u, const VertexSet& B) const;
  // Q(A, A^c), computed directly over crossing edges.
  double boundary_flow(const VertexSet& A) const;
  double pi_mass(const VertexSet& A) const;
  // Phi(A) = Q(A,A^c) / (pi(A) pi(A^c)). Throws if A is empty or full.
  double phi(const VertexSet& A) const;

  // --- derived-graph topology ---
  bool is_connected(const VertexSet& A) const;  // induced subgraph; empty set counts as connected
  std::vector<std::vector<int>> components_of(const VertexSet& A) const;
  VertexSet outer_boundary(const VertexSet& A) const;  // u in A^c with p_uv > 0 into A
  VertexSet inner_boundary(const VertexSet& A) const;  // v in A with p_uv > 0 from A^c
  VertexSet ball(int radius, const VertexSet& A) const;
  int distance(int u, int v) const;
  int distance(const VertexSet& A, const VertexSet& B) const;  // INT_MAX when unreachable/empty
  Eigen::VectorXi distances_from(const VertexSet& A) const;    // -1 for unreachable
  // s-hull: A plus every vertex cut off from s by A. For s in A this is V
  // (every path from s meets A at s); degenerate_hull reports that case.
  VertexSet hull(int s, const VertexSet& A) const;
  bool degenerate_hull(int s, const VertexSet& A) const { return A.contains(s); }
  bool is_tree() const;

  VertexSet empty_set() const { return VertexSet(n_); }
  VertexSet full_set() const { return VertexSet::full(n_); }

 private:
  Chain() = default;
  void finalize(bool allow_nonlazy);
  void compute_stationary() const;

  int n_ = 0;
  std::vector<std::string> states_;
  std::vector<double> diag_;
  std::vector<std::vector<std::pair<int, double>>> out_;
  std::vector<std::vector<int>> nbr_;
  std::vector<double> weighted_degree_;  // sum of conductances at v (conductance-built only)
  bool from_conductances_ = false;
  mutable std::optional<Eigen::VectorXd> pi_;
  mutable double pi_residual_ = 0.0;
};

}  // namespace mixtime

#endif
