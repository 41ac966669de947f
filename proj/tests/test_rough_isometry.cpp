#include <doctest.h>

#include <random>

#include "corpus.hpp"
#include "mixtime/mixing.hpp"
#include "mixtime/rough_isometry.hpp"

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

Correspondence identity_corr(const Chain& chain) {
  Correspondence corr;
  for (int v = 0; v < chain.size(); ++v) corr.pairs.emplace_back(v, v);
  return corr;
}

}  // namespace

TEST_CASE("stretch of the identity correspondence is 1") {
  Chain p4 = make(Family::path, 4);
  StretchResult st = correspondence_stretch(p4, p4, identity_corr(p4));
  CHECK(st.stretch == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(st.certified_r == 1);
}

TEST_CASE("two-star pair has stretch 3") {
  GeneratedExample gen = generate(ExampleSpec{Family::star2, 8});
  REQUIRE(gen.companion_tree.has_value());
  StretchResult st = correspondence_stretch(gen.chain, *gen.companion_tree, *gen.correspondence);
  CHECK(st.stretch == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(st.certified_r == 3);
}

TEST_CASE("product chain vs collapsed path has finite computed stretch") {
  ExampleSpec spec;
  spec.family = Family::prodchain;
  spec.k = 2;
  spec.n = 4;
  GeneratedExample gen = generate(spec);
  REQUIRE(gen.companion_tree.has_value());
  StretchResult st = correspondence_stretch(gen.chain, *gen.companion_tree, *gen.correspondence);
  CHECK(st.stretch >= 1.0);
  CHECK(st.stretch < 10.0);
}

TEST_CASE("correspondence must cover both sides") {
  Chain p4 = make(Family::path, 4);
  Correspondence partial;
  partial.pairs = {{0, 0}, {1, 1}, {2, 2}};  // vertex 3 isolated on both sides
  CHECK_THROWS(correspondence_stretch(p4, p4, partial));
}

TEST_CASE("A_t sets for the identity correspondence on a tree") {
  Chain p8 = make(Family::path, 8);
  AtSetsReport rep = build_at_sets(p8, p8, identity_corr(p8), 1);
  CHECK(rep.connectivity_ok);
  CHECK(rep.separation_ok);
  CHECK(rep.disjointness_ok);
  for (int t = 0; t < p8.size(); ++t)
    CHECK(rep.at[static_cast<size_t>(t)] == p8.ball(2, VertexSet::of(8, {t})));
}

TEST_CASE("A_t sets on the two-star pair at r=3") {
  GeneratedExample gen = generate(ExampleSpec{Family::star2, 8});
  AtSetsReport rep = build_at_sets(gen.chain, *gen.companion_tree, *gen.correspondence, 3);
  CHECK(rep.connectivity_ok);
  CHECK(rep.separation_ok);
  CHECK(rep.disjointness_ok);
  CHECK(rep.internal_diameter_bound == 26);
  CHECK(rep.disjointness_distance == 75);
}

TEST_CASE("Kac identity") {
  Chain p4 = make(Family::path, 4);
  double residual = kac_check(p4, VertexSet::of(4, {0}), VertexSet::of(4, {1}),
                              VertexSet::of(4, {2, 3}));
  CHECK(residual < 1e-12);
  // not a partition
  CHECK_THROWS(kac_check(p4, VertexSet::of(4, {0}), VertexSet::of(4, {0, 1}),
                         VertexSet::of(4, {2, 3})));
  // C does not separate L from R
  CHECK_THROWS(kac_check(p4, VertexSet::of(4, {0}), VertexSet::of(4, {2}),
                         VertexSet::of(4, {1, 3})));
  // degenerate C = V: identity reads 1 = 1
  CHECK(kac_check(p4, VertexSet(4), p4.full_set(), VertexSet(4)) < 1e-12);
}

TEST_CASE("Kac residual on random single-cut tree partitions") {
  std::mt19937 rng(31);
  for (const auto& entry : corpus_trees()) {
    CAPTURE(entry.name);
    Chain chain = generate(entry.spec).chain;
    for (int c = 0; c < chain.size(); ++c) {
      VertexSet cut = VertexSet::of(chain.size(), {c});
      auto comps = chain.components_of(cut.complement());
      if (comps.size() < 2) continue;
      std::uniform_int_distribution<size_t> pick(0, comps.size() - 1);
      VertexSet L = VertexSet::from_indices(chain.size(), comps[pick(rng)]);
      VertexSet R = cut.complement() - L;
      CHECK(kac_check(chain, L, cut, R) < 1e-9);
    }
  }
}

TEST_CASE("ri tree lower bound") {
  // long enough that the radius-2 blocks do not swallow the far reference
  Chain p12 = make(Family::path, 12);
  BottleneckSequence seq;
  seq.theta = 1.0;
  int n = p12.size();
  for (int i = 1; i < n; ++i) {
    VertexSet prefix(n);
    for (int v = 0; v < i; ++v) prefix.insert(v);
    seq.sets.push_back(prefix);
  }
  RiLowerBoundResult res = ri_tree_lower_bound(p12, p12, identity_corr(p12), 1, seq);
  CHECK(res.cut_tree_vertices.size() >= 2);
  CHECK(res.bound > 0.0);
  CHECK(res.bound <= worst_case_hitting(p12, 0.05, HittingSearchMode::connected_only).value + 1e-9);

  // at r=3 on the two-vertex companion tree every block covers the whole
  // graph, so the certified bound honestly degenerates to zero
  GeneratedExample s8 = generate(ExampleSpec{Family::star2, 8});
  BottleneckSequence tree_seq;
  tree_seq.theta = 1.0;
  tree_seq.sets = {VertexSet::of(2, {0})};
  RiLowerBoundResult r8 = ri_tree_lower_bound(s8.chain, *s8.companion_tree, *s8.correspondence,
                                              3, tree_seq);
  CHECK(r8.bound == 0.0);
  CHECK(r8.tree_size_sum == 1.0);
  CHECK(r8.cut_tree_vertices.size() == 1);
}

TEST_CASE("robustness comparison on identical chains") {
  Chain s8 = make(Family::star2, 8);
  GameParams params{0, 0.5, 0.5, 0.5};
  RobustnessReport rep = robustness_compare(s8, s8, identity_corr(s8), 1, params);
  CHECK(rep.t_stop_x == doctest::Approx(rep.t_stop_y).epsilon(1e-9));
  CHECK(rep.diameter_ok);
  CHECK(rep.growth_ok);
  CHECK(rep.index_monotone_ok);
  CHECK(rep.offset_sum_ok);
  CHECK(rep.witness_ok);
}

TEST_CASE("robustness comparison across the two-star correspondence") {
  GeneratedExample gen = generate(ExampleSpec{Family::star2, 8});
  GameParams params{0, 0.5, 0.5, 0.5};
  RobustnessReport rep =
      robustness_compare(gen.chain, *gen.companion_tree, *gen.correspondence, 3, params);
  CHECK(rep.diameter_ok);
  CHECK(rep.growth_ok);
  CHECK(rep.index_monotone_ok);
  CHECK(rep.offset_sum_ok);
  CHECK(rep.witness_ok);
  CHECK(rep.t_stop_x > 0.0);
  CHECK(rep.t_stop_y > 0.0);
}

TEST_CASE("path identity robustness at r=1 exercises the dasher geometry") {
  Chain p12 = make(Family::path, 12);
  GameParams params{11, 0.5, 0.5, 0.5};
  RobustnessReport rep = robustness_compare(p12, p12, identity_corr(p12), 1, params);
  CHECK(rep.diameter_ok);
  CHECK(rep.growth_ok);
  CHECK(rep.index_monotone_ok);
  CHECK(rep.offset_sum_ok);
  CHECK(rep.witness_ok);
  CHECK(rep.transcript.rounds.size() >= 2);
}
