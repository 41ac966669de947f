#include "mixtime/chain.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <climits>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace mixtime {

namespace {
constexpr double kRowTol = 1e-12;
constexpr double kPiResidualTol = 1e-10;
constexpr double kBalanceTol = 1e-10;
}  // namespace

Chain Chain::from_matrix(std::vector<std::string> states, Eigen::MatrixXd P,
                         bool allow_nonlazy) {
  const int n = static_cast<int>(states.size());
  if (n < 1 || P.rows() != n || P.cols() != n)
    throw std::invalid_argument("chain: matrix shape does not match state list");
  Chain c;
  c.n_ = n;
  c.states_ = std::move(states);
  c.diag_.resize(n);
  c.out_.resize(n);
  for (int u = 0; u < n; ++u) {
    double row = 0.0;
    for (int v = 0; v < n; ++v) {
      double p = P(u, v);
      if (p < -kRowTol || p > 1.0 + kRowTol)
        throw std::invalid_argument("chain: transition probability outside [0,1]");
      row += p;
      if (u == v)
        c.diag_[u] = p;
      else if (p > 0.0)
        c.out_[u].emplace_back(v, p);
    }
    if (std::abs(row - 1.0) > 1e-9)
      throw std::invalid_argument("chain: row " + c.states_[u] + " sums to " +
                                  std::to_string(row));
  }
  c.finalize(allow_nonlazy);
  return c;
}

Chain Chain::from_conductances(std::vector<std::string> states,
                               const std::vector<Conductance>& edges) {
  const int n = static_cast<int>(states.size());
  if (n < 2) throw std::invalid_argument("chain: need at least two states");
  std::unordered_map<std::string, int> idx;
  for (int i = 0; i < n; ++i)
    if (!idx.emplace(states[i], i).second)
      throw std::invalid_argument("chain: duplicate state id " + states[i]);

  std::map<std::pair<int, int>, double> cond;
  for (const auto& e : edges) {
    if (e.c <= 0.0)
      throw std::invalid_argument("chain: non-positive conductance on edge " + e.u + "-" + e.v);
    auto iu = idx.find(e.u), iv = idx.find(e.v);
    if (iu == idx.end() || iv == idx.end())
      throw std::invalid_argument("chain: conductance references unknown state");
    int a = iu->second, b = iv->second;
    if (a == b) throw std::invalid_argument("chain: self-loop conductance on " + e.u);
    auto key = std::minmax(a, b);
    if (!cond.emplace(std::make_pair(key.first, key.second), e.c).second)
      throw std::invalid_argument("chain: duplicate edge " + e.u + "-" + e.v);
  }

  Chain c;
  c.n_ = n;
  c.states_ = std::move(states);
  c.diag_.assign(n, 0.5);
  c.out_.resize(n);
  c.weighted_degree_.assign(n, 0.0);
  for (const auto& [key, w] : cond) {
    c.weighted_degree_[key.first] += w;
    c.weighted_degree_[key.second] += w;
  }
  for (const auto& [key, w] : cond) {
    auto [a, b] = key;
    c.out_[a].emplace_back(b, w / (2.0 * c.weighted_degree_[a]));
    c.out_[b].emplace_back(a, w / (2.0 * c.weighted_degree_[b]));
  }
  for (int v = 0; v < n; ++v) {
    if (c.weighted_degree_[v] == 0.0)
      throw std::invalid_argument("chain: state " + c.states_[v] + " has no incident edge");
    std::sort(c.out_[v].begin(), c.out_[v].end());
  }
  c.from_conductances_ = true;
  c.finalize(false);
  return c;
}

void Chain::finalize(bool allow_nonlazy) {
  nbr_.assign(n_, {});
  // derived graph: {u,v} is an edge when p_uv > 0 or p_vu > 0
  std::map<std::pair<int, int>, bool> edges;
  for (int u = 0; u < n_; ++u)
    for (const auto& [v, p] : out_[u]) {
      (void)p;
      auto key = std::minmax(u, v);
      edges[{key.first, key.second}] = true;
    }
  for (const auto& [key, used] : edges) {
    (void)used;
    nbr_[key.first].push_back(key.second);
    nbr_[key.second].push_back(key.first);
  }
  for (auto& v : nbr_) std::sort(v.begin(), v.end());

  if (!allow_nonlazy) {
    for (int v = 0; v < n_; ++v)
      if (std::abs(diag_[v] - 0.5) > kRowTol)
        throw std::invalid_argument("chain: not lazy at state " + states_[v] +
                                    " (p_vv = " + std::to_string(diag_[v]) +
                                    "); pass allow_nonlazy to accept");
  }
  auto comps = components_of(full_set());
  if (comps.size() != 1) {
    std::ostringstream os;
    os << "chain: derived graph is disconnected (" << comps.size() << " components:";
    for (const auto& comp : comps) {
      os << " {";
      for (size_t i = 0; i < comp.size() && i < 5; ++i)
        os << (i ? "," : "") << states_[comp[i]];
      if (comp.size() > 5) os << ",...";
      os << "}";
    }
    os << ")";
    throw std::invalid_argument(os.str());
  }
}

int Chain::index_of(const std::string& state) const {
  for (int i = 0; i < n_; ++i)
    if (states_[i] == state) return i;
  throw std::invalid_argument("chain: unknown state id " + state);
}

double Chain::p(int u, int v) const {
  if (u == v) return diag_[u];
  for (const auto& [w, pw] : out_[u])
    if (w == v) return pw;
  return 0.0;
}

int Chain::max_degree() const {
  int d = 0;
  for (const auto& a : nbr_) d = std::max(d, static_cast<int>(a.size()));
  return d;
}

Eigen::MatrixXd Chain::dense_matrix() const {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n_, n_);
  for (int u = 0; u < n_; ++u) {
    P(u, u) = diag_[u];
    for (const auto& [v, pv] : out_[u]) P(u, v) = pv;
  }
  return P;
}

void Chain::compute_stationary() const {
  Eigen::VectorXd pi(n_);
  if (from_conductances_) {
    double total = 0.0;
    for (double d : weighted_degree_) total += d;
    for (int v = 0; v < n_; ++v) pi[v] = weighted_degree_[v] / total;
  } else if (n_ <= 1024) {
    // (P^T - I) x = 0 with the last equation replaced by sum(x) = 1
    Eigen::MatrixXd A = dense_matrix().transpose() - Eigen::MatrixXd::Identity(n_, n_);
    A.row(n_ - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_);
    b[n_ - 1] = 1.0;
    pi = A.colPivHouseholderQr().solve(b);
  } else {
    Eigen::SparseMatrix<double> A(n_, n_);
    std::vector<Eigen::Triplet<double>> trip;
    for (int u = 0; u < n_; ++u) {
      for (const auto& [v, pv] : out_[u])
        if (v < n_ - 1) trip.emplace_back(v, u, pv);
      if (u < n_ - 1) trip.emplace_back(u, u, diag_[u] - 1.0);
      trip.emplace_back(n_ - 1, u, 1.0);
    }
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("chain: sparse stationary solve failed to factorize");
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_);
    b[n_ - 1] = 1.0;
    pi = lu.solve(b);
  }

  double residual = 0.0;
  Eigen::VectorXd piP = Eigen::VectorXd::Zero(n_);
  for (int u = 0; u < n_; ++u) {
    piP[u] += pi[u] * diag_[u];
    for (const auto& [v, pv] : out_[u]) piP[v] += pi[u] * pv;
  }
  residual = (piP - pi).cwiseAbs().maxCoeff();
  if (residual > kPiResidualTol)
    throw std::runtime_error("chain: stationary solve residual " + std::to_string(residual) +
                             " exceeds tolerance");
  double minp = pi.minCoeff();
  if (minp <= 0.0) throw std::runtime_error("chain: stationary solve produced non-positive mass");
  pi_ = std::move(pi);
  pi_residual_ = residual;
}

const Eigen::VectorXd& Chain::stationary() const {
  if (!pi_) compute_stationary();
  return *pi_;
}

double Chain::stationary_residual() const {
  stationary();
  return pi_residual_;
}

ValidationReport Chain::validate(double eps) const {
  ValidationReport r;
  r.eps = eps;
  r.lazy = true;
  for (int v = 0; v < n_; ++v) {
    double row = diag_[v];
    for (const auto& [w, pw] : out_[v]) {
      (void)w;
      row += pw;
    }
    r.max_row_error = std::max(r.max_row_error, std::abs(row - 1.0));
    if (std::abs(diag_[v] - 0.5) > kRowTol) r.lazy = false;
  }
  auto comps = components_of(full_set());
  r.component_count = static_cast<int>(comps.size());
  r.irreducible = comps.size() == 1;
  if (!r.irreducible) {
    r.components = comps;
    return r;  // pi is undefined; remaining checks need it
  }

  const Eigen::VectorXd& pi = stationary();
  double min_flow = std::numeric_limits<double>::infinity(), max_flow = 0.0;
  r.reversible = true;
  for (int u = 0; u < n_; ++u)
    for (const auto& [v, pv] : out_[u]) {
      double quv = pi[u] * pv;
      double qvu = pi[v] * p(v, u);
      r.detailed_balance_error = std::max(r.detailed_balance_error, std::abs(quv - qvu));
      min_flow = std::min(min_flow, quv);
      max_flow = std::max(max_flow, quv);
    }
  if (r.detailed_balance_error > kBalanceTol) r.reversible = false;
  r.flow_ratio = max_flow > 0.0 ? min_flow / max_flow : 0.0;
  r.eps_uniform = r.flow_ratio >= eps * (1.0 - 1e-12);
  return r;
}

double Chain::flow(const VertexSet& A, const VertexSet& B) const {
  const Eigen::VectorXd& pi = stationary();
  double q = 0.0;
  A.for_each([&](int u) {
    if (B.contains(u)) q += pi[u] * diag_[u];
    for (const auto& [v, pv] : out_[u])
      if (B.contains(v)) q += pi[u] * pv;
  });
  return q;
}

double Chain::flow(int u, const VertexSet& B) const {
  const Eigen::VectorXd& pi = stationary();
  double q = 0.0;
  if (B.contains(u)) q += pi[u] * diag_[u];
  for (const auto& [v, pv] : out_[u])
    if (B.contains(v)) q += pi[u] * pv;
  return q;
}

double Chain::boundary_flow(const VertexSet& A) const {
  const Eigen::VectorXd& pi = stationary();
  double q = 0.0;
  A.for_each([&](int u) {
    for (const auto& [v, pv] : out_[u])
      if (!A.contains(v)) q += pi[u] * pv;
  });
  return q;
}

double Chain::pi_mass(const VertexSet& A) const {
  const Eigen::VectorXd& pi = stationary();
  double m = 0.0;
  A.for_each([&](int v) { m += pi[v]; });
  return m;
}

double Chain::phi(const VertexSet& A) const {
  if (A.empty() || A.is_full())
    throw std::invalid_argument("phi: A must be a proper nonempty subset");
  double mass = pi_mass(A);
  return boundary_flow(A) / (mass * (1.0 - mass));
}

std::vector<std::vector<int>> Chain::components_of(const VertexSet& A) const {
  std::vector<std::vector<int>> comps;
  std::vector<bool> seen(n_, false);
  A.for_each([&](int start) {
    if (seen[start]) return;
    comps.emplace_back();
    std::deque<int> queue{start};
    seen[start] = true;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      comps.back().push_back(u);
      for (int v : nbr_[u])
        if (A.contains(v) && !seen[v]) {
          seen[v] = true;
          queue.push_back(v);
        }
    }
  });
  return comps;
}

bool Chain::is_connected(const VertexSet& A) const {
  if (A.empty()) return true;
  return components_of(A).size() == 1;
}

VertexSet Chain::outer_boundary(const VertexSet& A) const {
  VertexSet b(n_);
  for (int u = 0; u < n_; ++u) {
    if (A.contains(u)) continue;
    for (const auto& [v, pv] : out_[u]) {
      (void)pv;
      if (A.contains(v)) {
        b.insert(u);
        break;
      }
    }
  }
  return b;
}

VertexSet Chain::inner_boundary(const VertexSet& A) const {
  VertexSet b(n_);
  for (int u = 0; u < n_; ++u) {
    if (A.contains(u)) continue;
    for (const auto& [v, pv] : out_[u]) {
      (void)pv;
      if (A.contains(v)) b.insert(v);
    }
  }
  return b;
}

Eigen::VectorXi Chain::distances_from(const VertexSet& A) const {
  Eigen::VectorXi d = Eigen::VectorXi::Constant(n_, -1);
  std::deque<int> queue;
  A.for_each([&](int v) {
    d[v] = 0;
    queue.push_back(v);
  });
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v : nbr_[u])
      if (d[v] < 0) {
        d[v] = d[u] + 1;
        queue.push_back(v);
      }
  }
  return d;
}

VertexSet Chain::ball(int radius, const VertexSet& A) const {
  Eigen::VectorXi d = distances_from(A);
  VertexSet b(n_);
  for (int v = 0; v < n_; ++v)
    if (d[v] >= 0 && d[v] <= radius) b.insert(v);
  return b;
}

int Chain::distance(int u, int v) const {
  if (u < 0 || u >= n_ || v < 0 || v >= n_)
    throw std::invalid_argument("distance: state index out of range");
  VertexSet a(n_);
  a.insert(u);
  int d = distances_from(a)[v];
  return d < 0 ? INT_MAX : d;
}

int Chain::distance(const VertexSet& A, const VertexSet& B) const {
  if (A.empty() || B.empty()) return INT_MAX;
  Eigen::VectorXi d = distances_from(A);
  int best = INT_MAX;
  B.for_each([&](int v) {
    if (d[v] >= 0) best = std::min(best, d[v]);
  });
  return best;
}

VertexSet Chain::hull(int s, const VertexSet& A) const {
  if (s < 0 || s >= n_) throw std::invalid_argument("hull: state index out of range");
  if (A.contains(s)) return full_set();
  // BFS from s avoiding A; unreached vertices are cut off by A
  std::vector<bool> reached(n_, false);
  std::deque<int> queue{s};
  reached[s] = true;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v : nbr_[u])
      if (!reached[v] && !A.contains(v)) {
        reached[v] = true;
        queue.push_back(v);
      }
  }
  VertexSet h = A;
  for (int v = 0; v < n_; ++v)
    if (!reached[v]) h.insert(v);
  return h;
}

bool Chain::is_tree() const {
  size_t m = 0;
  for (const auto& a : nbr_) m += a.size();
  return m / 2 == static_cast<size_t>(n_) - 1;  // connected by construction
}

}  // namespace mixtime
