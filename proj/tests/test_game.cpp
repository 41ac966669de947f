#include <doctest.h>

#include "corpus.hpp"
#include "mixtime/bottleneck.hpp"
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

}  // namespace

TEST_CASE("alpha nearness on C2") {
  Chain c2 = make(Family::path, 2);
  CHECK(is_alpha_near(c2, 0, 0, 1.0));
  // pi(2) P_2(H(1) <= 1) = (1/2)(1/2) = 1/4 < 1/2 = alpha pi(1)
  CHECK_FALSE(is_alpha_near(c2, 1, 0, 1.0));
  // two steps: (1/2)(3/4) = 3/8 >= 1/4
  CHECK(is_alpha_near(c2, 1, 0, 0.5));
  CHECK_THROWS(is_alpha_near(c2, 1, 0, 0.4));
}

TEST_CASE("beta adjustment counterexample on P4") {
  Chain p4 = make(Family::path, 4);
  VertexSet A = VertexSet::of(4, {1});
  VertexSet B = VertexSet::of(4, {1, 2});
  for (double beta : {0.05, 0.25, 0.5, 0.75, 1.0}) {
    CAPTURE(beta);
    AdjustmentReport rep = is_beta_adjustment(p4, A, B, beta);
    CHECK(rep.exact);
    CHECK_FALSE(rep.holds);
    // S = {1} refutes at every beta: the extended set has no inflow at all
    VertexSet S = VertexSet::of(4, {0});
    CHECK(p4.flow((B | S).complement(), A | S) == 0.0);
    CHECK(p4.flow((B | S).complement(), B | S) > 0.0);
  }
  // below the flow-equality threshold the empty set passes, so the reported
  // witness is the endpoint
  CHECK(is_beta_adjustment(p4, A, B, 0.5).witness_S == VertexSet::of(4, {0}));
  // the S = empty necessary condition alone passes at beta = 1/2:
  // Q(B^c, A) = Q(B^c, B) / 2 exactly
  CHECK(p4.flow(B.complement(), A) ==
        doctest::Approx(p4.flow(B.complement(), B) / 2).epsilon(1e-12));
  CHECK(is_beta_adjustment(p4, A, A, 1.0).holds);
}

TEST_CASE("validate_move rule checks") {
  Chain p4 = make(Family::path, 4);
  GameParams params{3, 0.5, 0.5, 0.5};
  GamePosition empty{p4.empty_set(), p4.empty_set()};

  SUBCASE("first crawler move: any connected nonempty set") {
    for (auto members : {std::vector<int>{0}, {1, 2}, {0, 1, 2, 3}}) {
      MoveReport r = validate_move(p4, params, empty,
                                   VertexSet::from_indices(4, members), Player::crawler);
      CHECK(r.valid);
    }
    CHECK_FALSE(validate_move(p4, params, empty, VertexSet::of(4, {0, 2}), Player::crawler).valid);
  }
  SUBCASE("dasher hull move from (C={1}, D=empty)") {
    GamePosition pos{VertexSet::of(4, {0}), p4.empty_set()};
    MoveReport r = validate_move(p4, params, pos, VertexSet::of(4, {0}), Player::dasher);
    CHECK(r.valid);
    CHECK(r.provenance == "verified");
  }
  SUBCASE("endgame rule: s inside D' forces D' = V and s near C") {
    // with s in C the full set is legal
    GamePosition pos{VertexSet::of(4, {3}), VertexSet::of(4, {0, 1, 2})};
    MoveReport r = validate_move(p4, params, pos, VertexSet::of(4, {0, 1, 2, 3}), Player::dasher);
    CHECK(r.valid);
    // enclosing s without playing V is illegal
    GamePosition pos2{VertexSet::of(4, {3}), VertexSet::of(4, {0, 1})};
    MoveReport bad = validate_move(p4, params, pos2, VertexSet::of(4, {0, 1, 3}), Player::dasher);
    CHECK_FALSE(bad.valid);
    // playing V while s is far from C fails the nearness side of the rule
    GamePosition pos3{VertexSet::of(4, {0}), VertexSet::of(4, {0})};
    MoveReport far =
        validate_move(p4, params, pos3, VertexSet::of(4, {0, 1, 2, 3}), Player::dasher);
    CHECK_FALSE(far.valid);
  }
}

TEST_CASE("full game on C2") {
  Chain c2 = make(Family::path, 2);
  GameParams params{1, 0.5, 0.5, 0.5};
  GreedyCrawler crawler(c2, 1);
  HullDasher dasher;
  GameTranscript t = play_game(c2, params, crawler, dasher);
  CHECK(t.all_moves_valid);
  CHECK(t.all_verified);
  CHECK_FALSE(t.aborted);
  REQUIRE(t.rounds.size() == 2);
  CHECK(t.rounds[0].C == VertexSet::of(2, {0}));
  CHECK(t.rounds[0].D == VertexSet::of(2, {0}));
  CHECK(t.rounds[1].D.is_full());
  CHECK(t.score == doctest::Approx(1.0).epsilon(1e-12));
  // 1/alpha^3 + (2/(alpha^2 beta gamma)) * score = 8 + 32
  CHECK(t.bound == doctest::Approx(40.0).epsilon(1e-12));
  CHECK(t.bound >= exit_frequencies(c2, 1).expected_tau);
}

TEST_CASE("full game on P4 from state 4") {
  Chain p4 = make(Family::path, 4);
  GameParams params{3, 0.5, 0.5, 0.5};
  GreedyCrawler crawler(p4, 3);
  HullDasher dasher;
  GameTranscript t = play_game(p4, params, crawler, dasher);
  CHECK(t.all_moves_valid);
  CHECK_FALSE(t.aborted);
  VertexSet prev(4);
  for (const auto& round : t.rounds) {
    CHECK(prev.is_subset_of(round.D));
    if (!round.D.is_full()) {
      bool prefix = round.D == VertexSet::of(4, {0}) || round.D == VertexSet::of(4, {0, 1}) ||
                    round.D == VertexSet::of(4, {0, 1, 2});
      CHECK(prefix);
    }
    prev = round.D;
  }
  CHECK(t.rounds.back().D.is_full());
  CHECK(t.bound >= exit_frequencies(p4, 3).expected_tau);
}

TEST_CASE("fallback crawler move and hull reply stay legal along played games") {
  for (const auto& entry : {corpus()[1], corpus()[4], corpus()[9]}) {
    CAPTURE(entry.name);
    Chain chain = generate(entry.spec).chain;
    GameParams params{chain.size() - 1, 0.5, 0.5, 0.5};
    GreedyCrawler crawler(chain, params.s);
    HullDasher dasher;
    GameTranscript t = play_game(chain, params, crawler, dasher, true, 12);
    REQUIRE(t.all_moves_valid);
    GamePosition pos{chain.empty_set(), chain.empty_set()};
    for (const auto& round : t.rounds) {
      // the fallback crawler move C u D^c and the hull reply both validate
      VertexSet fallback = pos.C | pos.D.complement();
      CHECK(validate_move(chain, params, pos, fallback, Player::crawler, 12).valid);
      pos.C = round.C;
      VertexSet hull_move = chain.degenerate_hull(params.s, pos.C | pos.D)
                                ? chain.full_set()
                                : chain.hull(params.s, pos.C | pos.D);
      CHECK(validate_move(chain, params, pos, hull_move, Player::dasher, 12).valid);
      pos.D = round.D;
      CHECK(pos.C.is_subset_of(pos.D));
    }
  }
}

TEST_CASE("hull dasher transcripts are (1-gamma)-bottleneck sequences") {
  for (const auto& entry : {corpus()[1], corpus()[5], corpus()[8]}) {
    CAPTURE(entry.name);
    Chain chain = generate(entry.spec).chain;
    for (double gamma : {0.25, 0.5}) {
      GameParams params{chain.size() - 1, 0.5, 0.5, gamma};
      GreedyCrawler crawler(chain, params.s);
      HullDasher dasher;
      GameTranscript t = play_game(chain, params, crawler, dasher, true, 12);
      REQUIRE(t.all_moves_valid);
      BottleneckSequence seq;
      seq.theta = 1.0 - gamma;
      for (const auto& round : t.rounds)
        if (!round.D.is_full()) seq.sets.push_back(round.D);
      SequenceReport rep = verify_sequence(chain, seq);
      CHECK(rep.valid);
    }
  }
}

TEST_CASE("block dasher on the product chain") {
  ExampleSpec spec;
  spec.family = Family::prodchain;
  spec.k = 2;
  spec.n = 3;
  Chain chain = generate(spec).chain;
  GameParams params{chain.size() - 1, 0.5, 0.5, 0.5};
  std::vector<VertexSet> blocks = prodchain_blocks(chain, spec);
  BlockCrawler crawler(chain, params.s, blocks);
  BlockDasher dasher(blocks);
  GameTranscript t = play_game(chain, params, crawler, dasher, false, 12);
  CHECK_FALSE(t.aborted);
  int k = spec.k, n = spec.n;
  int proper_rounds = 0;
  for (const auto& round : t.rounds)
    if (!round.D.is_full()) ++proper_rounds;
  CHECK(proper_rounds <= n);
  int l = 0;
  for (const auto& round : t.rounds) {
    if (round.D.is_full()) continue;
    ++l;
    CHECK(round.phi_D >= 1.0 / (2.0 * l * k * k * n) - 1e-12);
  }
}

TEST_CASE("aborting on an invalid strategy move keeps the transcript") {
  // a dasher that ignores the endgame rule
  struct BadDasher : DasherStrategy {
    VertexSet next(const Chain& chain, const GameParams& params,
                   const GamePosition& position) override {
      VertexSet d = position.C | position.D;
      d.insert(params.s);
      return d;
    }
  };
  Chain p4 = make(Family::path, 4);
  GameParams params{3, 0.5, 0.5, 0.5};
  GreedyCrawler crawler(p4, 3);
  BadDasher dasher;
  GameTranscript t = play_game(p4, params, crawler, dasher, true);
  CHECK(t.aborted);
  CHECK_FALSE(t.all_moves_valid);
  CHECK(!t.abort_reason.empty());
}
