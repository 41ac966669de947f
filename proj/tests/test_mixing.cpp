#include <doctest.h>

#include <algorithm>
#include <random>

#include "corpus.hpp"
#include "mixtime/game.hpp"
#include "mixtime/mixing.hpp"

using namespace mixtime;
using namespace mixtime::test;

namespace {

Chain make(Family fam, int n, int k = 0) {
  ExampleSpec spec;
  spec.family = fam;
  spec.n = n;
  spec.k = k;
  return generate(spec).chain;
}

// y-sorted order with ties by index and s forced last, plus the prefix
// components B_i, reproduced here independently of the greedy code.
struct YOrdering {
  std::vector<int> order;
  std::vector<double> y_sorted;
  std::vector<VertexSet> B;
};

YOrdering y_ordering(const Chain& chain, int s) {
  ExitFrequencies ef = exit_frequencies(chain, s);
  YOrdering out;
  for (int v = 0; v < chain.size(); ++v) out.order.push_back(v);
  std::sort(out.order.begin(), out.order.end(), [&](int a, int b) {
    if (a == s || b == s) return b == s && a != s;
    if (ef.y(a) != ef.y(b)) return ef.y(a) < ef.y(b);
    return a < b;
  });
  VertexSet prefix(chain.size());
  for (int v : out.order) {
    out.y_sorted.push_back(ef.y(v));
    prefix.insert(v);
    VertexSet b(chain.size());
    for (const auto& comp : chain.components_of(prefix)) {
      VertexSet c = VertexSet::from_indices(chain.size(), comp);
      if (c.contains(ef.halting_state)) b = c;
    }
    out.B.push_back(b);
  }
  return out;
}

}  // namespace

TEST_CASE("tv distance basics") {
  Eigen::VectorXd a(2), b(2), c(2);
  a << 1.0, 0.0;
  b << 0.5, 0.5;
  c << 0.0, 1.0;
  CHECK(tv_distance(a, a) == doctest::Approx(0.0));
  CHECK(tv_distance(a, b) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(tv_distance(a, c) == doctest::Approx(1.0).epsilon(1e-14));
  Eigen::VectorXd bad(2);
  bad << 0.7, 0.7;
  CHECK_THROWS(tv_distance(a, bad));
}

TEST_CASE("mixing time of C2 is 1") {
  Chain c2 = make(Family::path, 2);
  MixingTimeResult r = mixing_time(c2);
  CHECK(r.t_mix == 1);
  CHECK(r.worst_tv_by_step[0] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("mixing time matches a dense matrix power oracle") {
  for (const auto& entry : {corpus()[1], corpus()[4], corpus()[7]}) {
    CAPTURE(entry.name);
    Chain chain = generate(entry.spec).chain;
    MixingTimeResult r = mixing_time(chain);
    Eigen::MatrixXd P = chain.dense_matrix();
    Eigen::MatrixXd Pn = Eigen::MatrixXd::Identity(chain.size(), chain.size());
    const auto& pi = chain.stationary();
    long oracle = -1;
    for (long n = 0; n <= r.t_mix + 2; ++n) {
      double worst = 0.0;
      for (int v = 0; v < chain.size(); ++v)
        worst = std::max(worst, tv_distance(Pn.row(v).transpose(), pi));
      if (worst <= 0.25) {
        oracle = n;
        break;
      }
      Pn = Pn * P;
    }
    CHECK(oracle == r.t_mix);
  }
}

TEST_CASE("worst-start tv profile is nonincreasing") {
  for (const auto& entry : {corpus()[1], corpus()[5], corpus()[9]}) {
    Chain chain = generate(entry.spec).chain;
    MixingTimeResult r = mixing_time(chain);
    for (size_t i = 1; i < r.worst_tv_by_step.size(); ++i)
      CHECK(r.worst_tv_by_step[i] <= r.worst_tv_by_step[i - 1] + 1e-10);
  }
}

TEST_CASE("exit frequencies on C2") {
  Chain c2 = make(Family::path, 2);
  ExitFrequencies ef = exit_frequencies(c2, 0);
  CHECK(ef.y(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ef.y(1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ef.halting_state == 1);
  CHECK(ef.expected_tau == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exit frequencies on P4 from state 4") {
  Chain p4 = make(Family::path, 4);
  ExitFrequencies ef = exit_frequencies(p4, 3);
  // (P^T - I) solve; cross-checked against the access-time formula
  // max_v(E_s[H(v)] - E_pi[H(v)])
  CHECK(ef.y(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ef.y(1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ef.y(2) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(ef.y(3) == doctest::Approx(18.0).epsilon(1e-12));
  CHECK(ef.halting_state == 0);
  CHECK(ef.expected_tau == doctest::Approx(19.0 / 3).epsilon(1e-12));
  // the identity the file format example quotes: y_2 Q(2,1) = pi(1)
  CHECK(ef.y(1) * p4.flow(1, VertexSet::of(4, {0})) == doctest::Approx(1.0 / 6).epsilon(1e-12));
}

TEST_CASE("y_s is maximal and superlevel sets are connected") {
  for (const auto& entry : {corpus()[1], corpus()[3], corpus()[5], corpus()[9]}) {
    CAPTURE(entry.name);
    Chain chain = generate(entry.spec).chain;
    for (int s : {0, chain.size() / 2, chain.size() - 1}) {
      ExitFrequencies ef = exit_frequencies(chain, s);
      CHECK(ef.y(s) >= ef.y.maxCoeff() - 1e-9);
      for (int i = 0; i < chain.size(); ++i) {
        VertexSet sup(chain.size());
        for (int j = 0; j < chain.size(); ++j)
          if (ef.y(j) >= ef.y(i) - 1e-12) sup.insert(j);
        CHECK(sup.contains(s));
        CHECK(chain.is_connected(sup));
      }
    }
  }
}

TEST_CASE("exit-frequency flux identity on random sets") {
  std::mt19937 rng(23);
  for (const auto& entry : {corpus()[1], corpus()[4], corpus()[7], corpus()[9]}) {
    CAPTURE(entry.name);
    Chain chain = generate(entry.spec).chain;
    const auto& pi = chain.stationary();
    for (int s : {0, chain.size() - 1}) {
      ExitFrequencies ef = exit_frequencies(chain, s);
      for (int trial = 0; trial < 50; ++trial) {
        VertexSet Z = random_subset(chain.size(), rng);
        Z.erase(s);
        if (Z.empty()) continue;
        double lhs = 0.0;
        for (int v : Z.indices()) lhs += pi(v);
        double rhs = 0.0;
        for (int u = 0; u < chain.size(); ++u) {
          if (Z.contains(u)) continue;
          for (auto [v, p] : chain.out_edges(u)) {
            if (!Z.contains(v)) continue;
            rhs += ef.y(u) * pi(u) * p - ef.y(v) * pi(v) * chain.p(v, u);
          }
        }
        CHECK(std::abs(lhs - rhs) < 1e-9);
      }
    }
  }
}

TEST_CASE("prefix-component gap bound on sorted exit frequencies") {
  for (const auto& entry : {corpus()[1], corpus()[2], corpus()[5]}) {
    CAPTURE(entry.name);
    Chain chain = generate(entry.spec).chain;
    int s = chain.size() - 1;
    YOrdering yo = y_ordering(chain, s);
    const auto& pi = chain.stationary();
    int N = chain.size();
    for (int i = 0; i < N - 1; ++i) {
      if (yo.B[static_cast<size_t>(i)].empty()) continue;
      double piB = 0.0;
      for (int v : yo.B[static_cast<size_t>(i)].indices()) piB += pi(v);
      for (int j = i; j < N - 1; ++j) {
        double q = chain.flow(yo.B[static_cast<size_t>(j)].complement(),
                              yo.B[static_cast<size_t>(i)]);
        if (q <= 1e-15) continue;
        CHECK(yo.y_sorted[static_cast<size_t>(j + 1)] - yo.y_sorted[static_cast<size_t>(i)] <=
              piB / q + 1e-9);
      }
    }
  }
}

TEST_CASE("stop time values") {
  CHECK(stop_time(make(Family::path, 2)) == doctest::Approx(1.0).epsilon(1e-12));
  StopTimeReport r = stop_time_report(make(Family::path, 4));
  CHECK(r.t_stop == doctest::Approx(19.0 / 3).epsilon(1e-12));
  CHECK((r.argmax_start == 0 || r.argmax_start == 3));
  CHECK(r.exhaustive);
}

TEST_CASE("hitting times") {
  Chain p4 = make(Family::path, 4);
  CHECK(hitting_time(p4, 2, VertexSet::of(4, {2})) == doctest::Approx(0.0));
  CHECK(hitting_time(p4, 1, VertexSet::of(4, {2})) == doctest::Approx(6.0).epsilon(1e-12));
  // stationary mass over boundary flow equals the hitting time across the cut
  VertexSet left = VertexSet::of(4, {0, 1});
  CHECK(p4.pi_mass(left) / p4.flow(left, left.complement()) ==
        doctest::Approx(6.0).epsilon(1e-12));
  Chain c2 = make(Family::path, 2);
  CHECK(hitting_time(c2, 0, VertexSet::of(2, {1})) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS(hitting_time(p4, 0, VertexSet(4)));
}

TEST_CASE("worst case hitting") {
  Chain c2 = make(Family::path, 2);
  WorstHittingResult w = worst_case_hitting(c2, 0.5);
  CHECK(w.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(w.target.count() == 1);

  Chain p4 = make(Family::path, 4);
  WorstHittingResult w4 = worst_case_hitting(p4, 0.5);
  CHECK((w4.target == VertexSet::of(4, {0, 1}) || w4.target == VertexSet::of(4, {2, 3})));
  CHECK(w4.value == doctest::Approx(hitting_time(p4, w4.start, w4.target)).epsilon(1e-12));
}

TEST_CASE("hitting and stopping times agree to order of magnitude (recorded only)") {
  Chain p4 = make(Family::path, 4);
  double lhs = 0.5 * worst_case_hitting(p4, 0.5).value;
  double t_stop = stop_time(p4);
  WARN(lhs <= 10.0 * t_stop);
}

TEST_CASE("nearness bound on exit frequencies") {
  for (const auto& entry : {corpus()[1], corpus()[4], corpus()[9]}) {
    CAPTURE(entry.name);
    Chain chain = generate(entry.spec).chain;
    int s = chain.size() - 1;
    ExitFrequencies ef = exit_frequencies(chain, s);
    for (int m : {2, 3}) {
      double alpha = 1.0 / m;
      for (int v = 0; v < chain.size(); ++v)
        for (int u = 0; u < chain.size(); ++u)
          if (is_alpha_near(chain, v, u, alpha))
            CHECK(ef.y(v) <= m * (m + 1) * ef.y(u) + m * m * (m + 1) / 2.0 + 1e-9);
    }
  }
}
