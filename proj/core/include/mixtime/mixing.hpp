#ifndef MIXTIME_MIXING_HPP
#define MIXTIME_MIXING_HPP

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <memory>
#include <vector>

#include "mixtime/chain.hpp"
#include "mixtime/vertex_set.hpp"

namespace mixtime {

// Total variation distance, computed as half the L1 norm. Throws if either
// argument is not a probability vector.
double tv_distance(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu);

struct TvScanOptions {
  long step_cap = 10000000;   // hard budget on the step index
  long linear_limit = 2048;   // full per-step scan up to here (records profile)
  int start_budget = -1;      // >=0: worst case over a stride sample of starts
};

struct MixingTimeResult {
  long t_mix = 0;
  // Worst-start TV at steps 0,1,...; filled while the scan is linear, so it
  // covers 0..t_mix exactly when t_mix <= linear_limit.
  std::vector<double> worst_tv_by_step;
  bool profile_complete = false;
  bool exhaustive_starts = true;
};

// min { n >= 0 : sup_v ||P_v(X_n in .) - pi|| <= 1/4 }. Linear scan while
// cheap, then doubling plus bisection relying on sup-start monotonicity for
// lazy chains (checked; falls back to a linear scan on violation). Throws a
// budget error when step_cap is exceeded.
MixingTimeResult mixing_time(const Chain& chain, const TvScanOptions& opts = {});

struct ExitFrequencies {
  int start = 0;
  Eigen::VectorXd y;       // scaled exit frequencies, min_v y_v = 0
  int halting_state = 0;   // lowest-index v with y_v = 0
  double expected_tau = 0; // sum_v pi(v) y_v
};

// Solves (P^T - I) z = pi - delta_s with one pinning row, for any number of
// starts off a single factorization. Dense LU below a size threshold, sparse
// LU above it.
class ExitFrequencySolver {
 public:
  explicit ExitFrequencySolver(const Chain& chain);
  ~ExitFrequencySolver();
  ExitFrequencySolver(ExitFrequencySolver&&) noexcept;
  ExitFrequencySolver& operator=(ExitFrequencySolver&&) noexcept;

  ExitFrequencies solve(int s) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ExitFrequencies exit_frequencies(const Chain& chain, int s);

struct StopTimeReport {
  double t_stop = 0.0;
  int argmax_start = 0;
  std::vector<int> starts;          // the starts actually evaluated
  std::vector<double> per_start;    // E_s[tau] per evaluated start
  bool exhaustive = true;
};

// max_s E_s[tau]. start_budget >= 0 restricts to a deterministic stride
// sample of that many starts (plus state 0 and n-1); the report then says
// exhaustive = false.
StopTimeReport stop_time_report(const Chain& chain, int start_budget = -1);
double stop_time(const Chain& chain);

// E_v[H(A)] for every start v, by the absorbing-system solve (zero on A).
Eigen::VectorXd hitting_vector(const Chain& chain, const VertexSet& A);
double hitting_time(const Chain& chain, int v, const VertexSet& A);

enum class HittingSearchMode {
  exhaustive,       // all subsets, |V| <= cap required
  connected_only,   // connected subsets only, |V| <= cap required
  candidates,       // caller-supplied family
};

struct WorstHittingResult {
  double value = 0.0;
  int start = 0;
  VertexSet target;
  long sets_examined = 0;
};

// t_hit(delta) = max over v and A with pi(A) >= delta of E_v[H(A)].
WorstHittingResult worst_case_hitting(const Chain& chain, double delta,
                                      HittingSearchMode mode = HittingSearchMode::exhaustive,
                                      int cap = 20,
                                      const std::vector<VertexSet>* candidates = nullptr);

struct MixingReport {
  long t_mix = 0;
  double t_stop = 0.0;
  std::vector<double> worst_tv_by_step;
  std::vector<double> per_start_stop_cost;
  int t_stop_argmax = 0;
  bool exhaustive_starts = true;
};

MixingReport analyze_mixing(const Chain& chain, const TvScanOptions& opts = {});

}  // namespace mixtime

#endif
