#include "mixtime/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mixtime {

namespace {

constexpr double kDistTol = 1e-9;
constexpr double kTvThreshold = 0.25;
constexpr double kMonotoneSlack = 1e-10;
constexpr int kDenseLimit = 1024;

void check_distribution(const Eigen::VectorXd& mu) {
  if (mu.minCoeff() < -kDistTol)
    throw std::invalid_argument("tv_distance: negative mass");
  if (std::abs(mu.sum() - 1.0) > kDistTol)
    throw std::invalid_argument("tv_distance: mass does not sum to 1");
}

std::vector<int> sample_starts(int n, int budget) {
  std::vector<int> starts;
  if (budget < 0 || budget >= n) {
    starts.resize(n);
    for (int i = 0; i < n; ++i) starts[i] = i;
    return starts;
  }
  if (budget < 2) budget = 2;
  for (int i = 0; i < budget; ++i) {
    long v = static_cast<long>(i) * (n - 1) / (budget - 1);
    starts.push_back(static_cast<int>(v));
  }
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  return starts;
}

Eigen::SparseMatrix<double> sparse_matrix(const Chain& c) {
  const int n = c.size();
  Eigen::SparseMatrix<double> P(n, n);
  std::vector<Eigen::Triplet<double>> trip;
  for (int u = 0; u < n; ++u) {
    if (c.self_loop(u) > 0.0) trip.emplace_back(u, u, c.self_loop(u));
    for (const auto& [v, p] : c.out_edges(u)) trip.emplace_back(u, v, p);
  }
  P.setFromTriplets(trip.begin(), trip.end());
  P.makeCompressed();
  return P;
}

double worst_tv_rows(const Eigen::MatrixXd& M, const Eigen::VectorXd& pi) {
  double worst = 0.0;
  for (int i = 0; i < M.rows(); ++i)
    worst = std::max(worst, 0.5 * (M.row(i).transpose() - pi).lpNorm<1>());
  return worst;
}

// Worst-start TV at arbitrary step counts for a dense chain, via cached
// binary powers of P.
class DensePowerTv {
 public:
  DensePowerTv(Eigen::MatrixXd P, Eigen::VectorXd pi)
      : pi_(std::move(pi)) {
    powers_.push_back(std::move(P));
  }

  double at(long n) {
    const int dim = static_cast<int>(pi_.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(dim, dim);
    int bit = 0;
    for (long rem = n; rem > 0; rem >>= 1, ++bit) {
      if (rem & 1) M = M * power(bit);
    }
    return worst_tv_rows(M, pi_);
  }

 private:
  const Eigen::MatrixXd& power(int k) {
    while (static_cast<int>(powers_.size()) <= k)
      powers_.push_back(powers_.back() * powers_.back());
    return powers_[static_cast<size_t>(k)];
  }

  Eigen::VectorXd pi_;
  std::vector<Eigen::MatrixXd> powers_;
};

}  // namespace

double tv_distance(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu) {
  if (mu.size() != nu.size())
    throw std::invalid_argument("tv_distance: dimension mismatch");
  check_distribution(mu);
  check_distribution(nu);
  return 0.5 * (mu - nu).lpNorm<1>();
}

MixingTimeResult mixing_time(const Chain& chain, const TvScanOptions& opts) {
  const int n = chain.size();
  const Eigen::VectorXd& pi = chain.stationary();
  MixingTimeResult res;

  const bool dense = n <= kDenseLimit && opts.start_budget < 0;
  std::vector<int> starts = sample_starts(n, dense ? -1 : opts.start_budget);
  res.exhaustive_starts = static_cast<int>(starts.size()) == n;

  // distribution per tracked start, one row each
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<int>(starts.size()), n);
  for (size_t i = 0; i < starts.size(); ++i) M(static_cast<int>(i), starts[i]) = 1.0;

  Eigen::MatrixXd Pd;
  Eigen::SparseMatrix<double> Ps;
  if (dense)
    Pd = chain.dense_matrix();
  else
    Ps = sparse_matrix(chain);
  auto step = [&](Eigen::MatrixXd& rows) {
    if (dense)
      rows = rows * Pd;
    else
      rows = (rows * Ps).eval();
  };

  long linear_limit = std::min<long>(opts.linear_limit, opts.step_cap);
  double prev = 2.0;
  for (long t = 0;; ++t) {
    double tv = worst_tv_rows(M, pi);
    res.worst_tv_by_step.push_back(tv);
    prev = tv;
    if (tv <= kTvThreshold) {
      res.t_mix = t;
      res.profile_complete = true;
      return res;
    }
    if (t >= linear_limit) break;
    step(M);
  }

  if (dense) {
    DensePowerTv tvs(Pd, pi);
    // bracket by doubling, asserting sup-start monotonicity along the way
    long lo = linear_limit;
    long hi = lo;
    double last = prev;
    bool monotone = true;
    while (true) {
      hi = std::min(hi * 2, opts.step_cap);
      double tv = tvs.at(hi);
      if (tv > last + kMonotoneSlack) monotone = false;
      last = tv;
      if (tv <= kTvThreshold || hi == opts.step_cap || !monotone) break;
    }
    if (monotone && last <= kTvThreshold) {
      // smallest n in (lo, hi] with tv <= 1/4
      while (hi - lo > 1) {
        long mid = lo + (hi - lo) / 2;
        if (tvs.at(mid) <= kTvThreshold)
          hi = mid;
        else
          lo = mid;
      }
      res.t_mix = hi;
      return res;
    }
    if (monotone)
      throw std::runtime_error("mixing_time: step cap " + std::to_string(opts.step_cap) +
                               " exceeded, last TV " + std::to_string(last));
    // monotonicity violated: restart the scan one step at a time
    for (size_t i = 0; i < starts.size(); ++i) {
      M.row(static_cast<int>(i)).setZero();
      M(static_cast<int>(i), starts[i]) = 1.0;
    }
    res.worst_tv_by_step.clear();
    for (long t = 0; t <= opts.step_cap; ++t) {
      double tv = worst_tv_rows(M, pi);
      res.worst_tv_by_step.push_back(tv);
      if (tv <= kTvThreshold) {
        res.t_mix = t;
        res.profile_complete = true;
        return res;
      }
      step(M);
    }
    throw std::runtime_error("mixing_time: step cap exceeded under linear scan");
  }

  // sparse path: keep stepping, checking at widening intervals, then replay
  // from a snapshot to pin down the exact threshold step
  long t = linear_limit;
  long interval = 1;
  Eigen::MatrixXd snapshot = M;
  long snapshot_t = t;
  while (t < opts.step_cap) {
    long advance = std::min(interval, opts.step_cap - t);
    for (long i = 0; i < advance; ++i) step(M);
    t += advance;
    double tv = worst_tv_rows(M, pi);
    if (tv <= kTvThreshold) {
      Eigen::MatrixXd R = snapshot;
      for (long u = snapshot_t;; ++u) {
        if (worst_tv_rows(R, pi) <= kTvThreshold) {
          res.t_mix = u;
          return res;
        }
        step(R);
      }
    }
    snapshot = M;
    snapshot_t = t;
    interval = std::min(interval * 2, 1024L);
  }
  throw std::runtime_error("mixing_time: step cap " + std::to_string(opts.step_cap) +
                           " exceeded");
}

struct ExitFrequencySolver::Impl {
  const Chain* chain = nullptr;
  int n = 0;
  bool dense = true;
  Eigen::PartialPivLU<Eigen::MatrixXd> dlu;
  Eigen::SparseMatrix<double> B;  // kept for the residual check
  Eigen::SparseLU<Eigen::SparseMatrix<double>> slu;
};

ExitFrequencySolver::ExitFrequencySolver(const Chain& chain)
    : impl_(std::make_unique<Impl>()) {
  const int n = chain.size();
  impl_->chain = &chain;
  impl_->n = n;
  impl_->dense = n <= kDenseLimit;
  chain.stationary();

  // B = (P^T - I) with the last row replaced by the pin z_{n-1} = 0
  std::vector<Eigen::Triplet<double>> trip;
  for (int u = 0; u < n; ++u) {
    if (u < n - 1) trip.emplace_back(u, u, chain.self_loop(u) - 1.0);
    for (const auto& [v, p] : chain.out_edges(u))
      if (v < n - 1) trip.emplace_back(v, u, p);
  }
  trip.emplace_back(n - 1, n - 1, 1.0);
  impl_->B.resize(n, n);
  impl_->B.setFromTriplets(trip.begin(), trip.end());
  impl_->B.makeCompressed();

  if (impl_->dense) {
    impl_->dlu.compute(Eigen::MatrixXd(impl_->B));
  } else {
    impl_->slu.compute(impl_->B);
    if (impl_->slu.info() != Eigen::Success)
      throw std::runtime_error("exit_frequencies: sparse factorization failed");
  }
}

ExitFrequencySolver::~ExitFrequencySolver() = default;
ExitFrequencySolver::ExitFrequencySolver(ExitFrequencySolver&&) noexcept = default;
ExitFrequencySolver& ExitFrequencySolver::operator=(ExitFrequencySolver&&) noexcept = default;

ExitFrequencies ExitFrequencySolver::solve(int s) const {
  const int n = impl_->n;
  if (s < 0 || s >= n) throw std::invalid_argument("exit_frequencies: start out of range");
  const Eigen::VectorXd& pi = impl_->chain->stationary();

  Eigen::VectorXd rhs = pi;
  rhs[s] -= 1.0;
  rhs[n - 1] = 0.0;
  Eigen::VectorXd z =
      impl_->dense ? impl_->dlu.solve(rhs) : impl_->slu.solve(rhs).eval();
  double residual = (impl_->B * z - rhs).cwiseAbs().maxCoeff();
  if (!z.allFinite() || residual > 1e-8)
    throw std::runtime_error("exit_frequencies: solve residual " + std::to_string(residual) +
                             " exceeds tolerance (unexpected rank deficiency)");

  ExitFrequencies out;
  out.start = s;
  out.y = z.cwiseQuotient(pi);
  double ymin = out.y.minCoeff();
  out.y.array() -= ymin;
  out.halting_state = -1;
  for (int v = 0; v < n; ++v)
    if (out.y[v] <= 1e-12 * std::max(1.0, out.y.maxCoeff())) {
      out.halting_state = v;
      break;
    }
  out.expected_tau = pi.dot(out.y);
  return out;
}

ExitFrequencies exit_frequencies(const Chain& chain, int s) {
  return ExitFrequencySolver(chain).solve(s);
}

StopTimeReport stop_time_report(const Chain& chain, int start_budget) {
  ExitFrequencySolver solver(chain);
  StopTimeReport rep;
  rep.starts = sample_starts(chain.size(), start_budget);
  rep.exhaustive = static_cast<int>(rep.starts.size()) == chain.size();
  rep.t_stop = -1.0;
  for (int s : rep.starts) {
    double cost = solver.solve(s).expected_tau;
    rep.per_start.push_back(cost);
    if (cost > rep.t_stop) {
      rep.t_stop = cost;
      rep.argmax_start = s;
    }
  }
  return rep;
}

double stop_time(const Chain& chain) { return stop_time_report(chain).t_stop; }

Eigen::VectorXd hitting_vector(const Chain& chain, const VertexSet& A) {
  const int n = chain.size();
  if (A.empty()) throw std::invalid_argument("hitting_time: target set is empty");
  if (A.universe_size() != n)
    throw std::invalid_argument("hitting_time: set universe does not match chain");

  std::vector<int> free_of(n, -1);
  std::vector<int> free_states;
  for (int v = 0; v < n; ++v)
    if (!A.contains(v)) {
      free_of[v] = static_cast<int>(free_states.size());
      free_states.push_back(v);
    }
  const int m = static_cast<int>(free_states.size());
  Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
  if (m == 0) return h;

  Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
  Eigen::VectorXd sol;
  if (m <= kDenseLimit) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      int u = free_states[static_cast<size_t>(i)];
      M(i, i) = 1.0 - chain.self_loop(u);
      for (const auto& [v, p] : chain.out_edges(u))
        if (free_of[v] >= 0) M(i, free_of[v]) -= p;
    }
    sol = M.partialPivLu().solve(ones);
    if (!sol.allFinite() || (M * sol - ones).cwiseAbs().maxCoeff() > 1e-7)
      throw std::runtime_error("hitting_time: absorbing solve failed");
  } else {
    Eigen::SparseMatrix<double> M(m, m);
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < m; ++i) {
      int u = free_states[static_cast<size_t>(i)];
      trip.emplace_back(i, i, 1.0 - chain.self_loop(u));
      for (const auto& [v, p] : chain.out_edges(u))
        if (free_of[v] >= 0) trip.emplace_back(i, free_of[v], -p);
    }
    M.setFromTriplets(trip.begin(), trip.end());
    M.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(M);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("hitting_time: sparse factorization failed");
    sol = lu.solve(ones);
    if (!sol.allFinite())
      throw std::runtime_error("hitting_time: sparse solve failed");
  }
  for (int i = 0; i < m; ++i) h[free_states[static_cast<size_t>(i)]] = sol[i];
  return h;
}

double hitting_time(const Chain& chain, int v, const VertexSet& A) {
  if (v < 0 || v >= chain.size())
    throw std::invalid_argument("hitting_time: state out of range");
  if (A.contains(v)) return 0.0;
  return hitting_vector(chain, A)[v];
}

WorstHittingResult worst_case_hitting(const Chain& chain, double delta,
                                      HittingSearchMode mode, int cap,
                                      const std::vector<VertexSet>* candidates) {
  if (delta <= 0.0 || delta >= 1.0)
    throw std::invalid_argument("worst_case_hitting: delta must be in (0,1)");
  const int n = chain.size();
  WorstHittingResult best;
  best.target = chain.empty_set();
  best.value = -1.0;

  auto consider = [&](const VertexSet& A) {
    if (A.empty() || chain.pi_mass(A) < delta) return;
    if (mode == HittingSearchMode::connected_only && !chain.is_connected(A)) return;
    ++best.sets_examined;
    Eigen::VectorXd h = hitting_vector(chain, A);
    int v;
    double val = h.maxCoeff(&v);
    if (val > best.value) {
      best.value = val;
      best.start = v;
      best.target = A;
    }
  };

  if (mode == HittingSearchMode::candidates) {
    if (!candidates)
      throw std::invalid_argument("worst_case_hitting: candidate mode needs a candidate list");
    for (const auto& A : *candidates) consider(A);
  } else {
    if (n > cap)
      throw std::runtime_error("worst_case_hitting: " + std::to_string(n) +
                               " states exceeds enumeration cap " + std::to_string(cap) +
                               "; use a restricted mode");
    for (uint64_t mask = 1; mask < (uint64_t{1} << n); ++mask) {
      VertexSet A(n);
      for (int v = 0; v < n; ++v)
        if (mask & (uint64_t{1} << v)) A.insert(v);
      consider(A);
    }
  }
  if (best.value < 0.0)
    throw std::runtime_error("worst_case_hitting: no admissible target set found");
  return best;
}

MixingReport analyze_mixing(const Chain& chain, const TvScanOptions& opts) {
  MixingReport rep;
  MixingTimeResult mt = mixing_time(chain, opts);
  rep.t_mix = mt.t_mix;
  rep.worst_tv_by_step = std::move(mt.worst_tv_by_step);
  StopTimeReport st = stop_time_report(chain, opts.start_budget);
  rep.t_stop = st.t_stop;
  rep.per_start_stop_cost = std::move(st.per_start);
  rep.t_stop_argmax = st.argmax_start;
  rep.exhaustive_starts = mt.exhaustive_starts && st.exhaustive;
  return rep;
}

}  // namespace mixtime
