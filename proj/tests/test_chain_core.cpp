#include <doctest.h>

#include <random>

#include "corpus.hpp"
#include "mixtime/chain.hpp"

using namespace mixtime;
using namespace mixtime::test;

namespace {

Chain path4() {
  ExampleSpec spec;
  spec.family = Family::path;
  spec.n = 4;
  return generate(spec).chain;
}

}  // namespace

TEST_CASE("single edge builds the symmetric two-state chain") {
  Chain c2 = Chain::from_conductances({"1", "2"}, {{"1", "2", 1.0}});
  CHECK(c2.p(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(c2.p(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(c2.p(1, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(c2.stationary()(0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("P4 stationary distribution is degree proportional") {
  Chain p4 = path4();
  const auto& pi = p4.stationary();
  CHECK(pi(0) == doctest::Approx(1.0 / 6).epsilon(1e-12));
  CHECK(pi(1) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(pi(2) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(pi(3) == doctest::Approx(1.0 / 6).epsilon(1e-12));
  CHECK(p4.stationary_residual() < 1e-10);
}

TEST_CASE("weighted triangle satisfies detailed balance") {
  Chain tri = Chain::from_conductances({"a", "b", "c"},
                                       {{"a", "b", 2.0}, {"b", "c", 1.0}, {"a", "c", 1.0}});
  const auto& pi = tri.stationary();
  for (int u = 0; u < 3; ++u)
    for (int v = 0; v < 3; ++v)
      CHECK(std::abs(pi(u) * tri.p(u, v) - pi(v) * tri.p(v, u)) < 1e-12);
}

TEST_CASE("validation flags") {
  SUBCASE("C2 all true at eps = 1") {
    Chain c2 = Chain::from_conductances({"1", "2"}, {{"1", "2", 1.0}});
    ValidationReport r = c2.validate(1.0);
    CHECK(r.lazy);
    CHECK(r.irreducible);
    CHECK(r.reversible);
    CHECK(r.eps_uniform);
  }
  SUBCASE("P4 is 1-uniform: all directed edge flows equal 1/12") {
    ValidationReport r = path4().validate(1.0);
    CHECK(r.eps_uniform);
    CHECK(r.flow_ratio == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("HAMCLIQUE(5) fails at eps = 1, passes at 1/n^3") {
    ExampleSpec spec;
    spec.family = Family::hamclique;
    spec.n = 5;
    Chain h = generate(spec).chain;
    CHECK_FALSE(h.validate(1.0).eps_uniform);
    CHECK(h.validate(1.0 / 125).eps_uniform);
  }
  SUBCASE("non-lazy matrix rejected without the flag") {
    Eigen::MatrixXd P(2, 2);
    P << 0.0, 1.0, 1.0, 0.0;
    CHECK_THROWS(Chain::from_matrix({"1", "2"}, P));
    Chain c = Chain::from_matrix({"1", "2"}, P, true);
    CHECK_FALSE(c.validate().lazy);
  }
  SUBCASE("disconnected conductance graph rejected") {
    CHECK_THROWS(Chain::from_conductances({"1", "2", "3", "4"},
                                          {{"1", "2", 1.0}, {"3", "4", 1.0}}));
  }
  SUBCASE("non-positive conductance rejected") {
    CHECK_THROWS(Chain::from_conductances({"1", "2"}, {{"1", "2", 0.0}}));
  }
}

TEST_CASE("P4 flows") {
  Chain p4 = path4();
  VertexSet one = VertexSet::of(4, {0});
  VertexSet two = VertexSet::of(4, {1});
  VertexSet left = VertexSet::of(4, {0, 1});
  CHECK(p4.flow(one, two) == doctest::Approx(1.0 / 12).epsilon(1e-12));
  CHECK(p4.flow(left, left.complement()) == doctest::Approx(1.0 / 12).epsilon(1e-12));
  CHECK(p4.flow(left.complement(), left) == doctest::Approx(1.0 / 12).epsilon(1e-12));
  CHECK(p4.flow(p4.full_set(), p4.full_set()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("P4 phi values") {
  Chain p4 = path4();
  CHECK(p4.phi(VertexSet::of(4, {0})) == doctest::Approx(3.0 / 5).epsilon(1e-12));
  CHECK(p4.phi(VertexSet::of(4, {0, 1})) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(p4.phi(VertexSet::of(4, {1})) == doctest::Approx(3.0 / 4).epsilon(1e-12));
  CHECK_THROWS(p4.phi(p4.empty_set()));
  CHECK_THROWS(p4.phi(p4.full_set()));
}

TEST_CASE("P4 topology queries") {
  Chain p4 = path4();
  CHECK(p4.hull(3, VertexSet::of(4, {1})) == VertexSet::of(4, {0, 1}));
  CHECK(p4.outer_boundary(VertexSet::of(4, {0, 1})) == VertexSet::of(4, {2}));
  CHECK(p4.inner_boundary(VertexSet::of(4, {0, 1})) == VertexSet::of(4, {1}));
  CHECK(p4.ball(1, VertexSet::of(4, {0})) == VertexSet::of(4, {0, 1}));
  CHECK(p4.distance(0, 3) == 3);
  CHECK(p4.is_tree());
  CHECK_THROWS(p4.index_of("nope"));
}

TEST_CASE("identity properties over the corpus") {
  std::mt19937 rng(7);
  for (const auto& entry : corpus()) {
    CAPTURE(entry.name);
    Chain chain = generate(entry.spec).chain;
    ValidationReport vr = chain.validate();
    CHECK(vr.lazy);
    CHECK(vr.irreducible);
    CHECK(vr.reversible);
    const auto& pi = chain.stationary();
    for (int trial = 0; trial < 200; ++trial) {
      VertexSet A = random_subset(chain.size(), rng);
      CHECK(std::abs(chain.flow(A, A.complement()) - chain.flow(A.complement(), A)) < 1e-12);
      CHECK(std::abs(chain.phi(A) - chain.phi(A.complement())) < 1e-12);
    }
    for (int u = 0; u < chain.size(); ++u)
      for (auto [v, p] : chain.out_edges(u))
        CHECK(std::abs(pi(u) * p - pi(v) * chain.p(v, u)) < 1e-12);
  }
}

TEST_CASE("hull idempotence and monotonicity") {
  std::mt19937 rng(11);
  for (const auto& entry : {corpus()[1], corpus()[5], corpus()[9]}) {
    Chain chain = generate(entry.spec).chain;
    for (int trial = 0; trial < 100; ++trial) {
      VertexSet B = random_subset(chain.size(), rng);
      VertexSet A = B;
      for (int v : B.indices())
        if (rng() % 2) A.erase(v);
      std::uniform_int_distribution<int> pick(0, chain.size() - 1);
      int s = pick(rng);
      if (B.contains(s)) continue;
      VertexSet hb = chain.hull(s, B);
      CHECK(chain.hull(s, hb) == hb);
      if (!A.empty()) CHECK(chain.hull(s, A).is_subset_of(hb));
    }
  }
}

TEST_CASE("hull degenerates to V when s is inside") {
  Chain p4 = path4();
  VertexSet A = VertexSet::of(4, {1});
  CHECK(p4.degenerate_hull(1, A));
  CHECK(p4.hull(1, A) == p4.full_set());
}
