#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>

#include "corpus.hpp"
#include "mixtime/io.hpp"
#include "mixtime/scaling.hpp"

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

TEST_CASE("chain json round trip via matrix form") {
  Chain p4 = make(Family::path, 4);
  std::string text = chain_to_json_text(p4);
  Chain back = chain_from_json_text(text);
  REQUIRE(back.size() == p4.size());
  CHECK(back.states() == p4.states());
  for (int u = 0; u < p4.size(); ++u)
    for (int v = 0; v < p4.size(); ++v)
      CHECK(back.p(u, v) == doctest::Approx(p4.p(u, v)).epsilon(1e-14));
}

TEST_CASE("chain json conductance form") {
  std::string text = R"({
    "states": ["a", "b", "c"],
    "conductances": [["a", "b", 2.0], ["b", "c", 1.0]]
  })";
  Chain chain = chain_from_json_text(text);
  REQUIRE(chain.size() == 3);
  CHECK(chain.validate().lazy);
  const auto& pi = chain.stationary();
  CHECK(pi(0) == doctest::Approx(2.0 / 6).epsilon(1e-12));
  CHECK(pi(1) == doctest::Approx(3.0 / 6).epsilon(1e-12));
}

TEST_CASE("non-lazy matrices need the override") {
  std::string text = R"({
    "states": ["a", "b"],
    "matrix": [[0.0, 1.0], [1.0, 0.0]]
  })";
  CHECK_THROWS(chain_from_json_text(text));
  Chain chain = chain_from_json_text(text, true);
  CHECK(chain.p(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("malformed chain files are rejected") {
  CHECK_THROWS(chain_from_json_text("not json"));
  CHECK_THROWS(chain_from_json_text(R"({"states": ["a"]})"));
  // row sums off
  CHECK_THROWS(chain_from_json_text(
      R"({"states": ["a", "b"], "matrix": [[0.5, 0.4], [0.5, 0.5]]})"));
  // unknown state in a conductance
  CHECK_THROWS(chain_from_json_text(
      R"({"states": ["a", "b"], "conductances": [["a", "z", 1.0]]})"));
  CHECK_THROWS(load_chain("/nonexistent/chain.json"));
}

TEST_CASE("correspondence round trip") {
  GeneratedExample gen = generate(ExampleSpec{Family::star2, 4});
  REQUIRE(gen.companion_tree.has_value());
  const Chain& G = gen.chain;
  const Chain& T = *gen.companion_tree;
  std::string text = correspondence_to_json_text(*gen.correspondence, T, G);
  Correspondence back = correspondence_from_json_text(text, T, G);
  CHECK(back.pairs == gen.correspondence->pairs);
  CHECK_THROWS(correspondence_from_json_text(R"({"pairs": [["t1", "zzz"]]})", T, G));
}

TEST_CASE("sequence round trip recomputes the score") {
  Chain p4 = make(Family::path, 4);
  BottleneckSequence seq = greedy_sequence(p4, 3, 0.5);
  std::string text = sequence_to_json_text(p4, seq);
  BottleneckSequence back = sequence_from_json_text(text, p4);
  CHECK(back.theta == seq.theta);
  REQUIRE(back.sets.size() == seq.sets.size());
  for (size_t i = 0; i < seq.sets.size(); ++i) CHECK(back.sets[i] == seq.sets[i]);
  CHECK(sequence_score(p4, back) == doctest::Approx(19.0 / 3).epsilon(1e-12));
}

TEST_CASE("transcript round trip and revalidation") {
  Chain p4 = make(Family::path, 4);
  GameParams params{3, 0.5, 0.5, 0.5};
  GreedyCrawler crawler(p4, 3);
  HullDasher dasher;
  GameTranscript t = play_game(p4, params, crawler, dasher);
  REQUIRE(t.all_moves_valid);

  std::string text = transcript_to_json_text(p4, t);
  GameTranscript back = transcript_from_json_text(text, p4);
  REQUIRE(back.rounds.size() == t.rounds.size());
  for (size_t i = 0; i < t.rounds.size(); ++i) {
    CHECK(back.rounds[i].C == t.rounds[i].C);
    CHECK(back.rounds[i].D == t.rounds[i].D);
  }
  GameTranscript rv = revalidate_transcript(p4, back);
  CHECK(rv.all_moves_valid);
  CHECK(rv.all_verified == t.all_verified);
  CHECK(rv.score == doctest::Approx(t.score).epsilon(1e-12));
  CHECK(rv.bound == doctest::Approx(t.bound).epsilon(1e-12));

  // corrupting a round must be caught on replay
  GameTranscript broken = back;
  broken.rounds[0].D = VertexSet::of(4, {2});
  CHECK_FALSE(revalidate_transcript(p4, broken).all_moves_valid);
}

TEST_CASE("file save and load") {
  Chain s4 = make(Family::star2, 4);
  std::string path = "/tmp/mixtime_test_chain.json";
  save_chain(s4, path);
  Chain back = load_chain(path);
  CHECK(back.size() == s4.size());
  std::remove(path.c_str());
}

TEST_CASE("mixing report serialization carries the headline numbers") {
  Chain p4 = make(Family::path, 4);
  MixingReport report = analyze_mixing(p4);
  std::string text = mixing_report_to_json_text(report);
  CHECK(text.find("\"t_mix\": " + std::to_string(report.t_mix)) != std::string::npos);
  CHECK(text.find("t_stop") != std::string::npos);
  CHECK(report.t_stop == doctest::Approx(19.0 / 3).epsilon(1e-12));
}

TEST_CASE("log-log fit recovers exact power laws") {
  CHECK(fit_self_test());
  std::vector<double> x{2, 4, 8, 16};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 1.5));
  FitResult fit = fit_loglog(x, y);
  CHECK(fit.slope == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-9));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS(fit_loglog({1, 2}, {0.0, 1.0}));
  CHECK_THROWS(fit_loglog({1, 2, 3}, {1.0, 2.0}));
}

TEST_CASE("scaling runs are deterministic") {
  std::vector<int> grid{4, 6, 8, 10};
  ScalingRun a = run_scaling(Family::star2, grid, {"t_mix", "greedy_score"});
  ScalingRun b = run_scaling(Family::star2, grid, {"t_mix", "greedy_score"});
  CHECK(scaling_to_csv(a) == scaling_to_csv(b));
  REQUIRE(a.columns.size() == 2);
  CHECK(a.columns[0].fitted);
  CHECK(a.columns[0].fit.points == 4);
  for (const auto& col : a.columns)
    for (double v : col.values) CHECK(std::isfinite(v));
}

TEST_CASE("scaling rejects bad input") {
  CHECK_THROWS(run_scaling(Family::star2, {8, 4}, {"t_mix"}));
  CHECK_THROWS(run_scaling(Family::star2, {4, 8}, {"no_such_metric"}));
  // metrics tied to a family degrade to NA rather than aborting the run
  ScalingRun run = run_scaling(Family::cycle, {4, 8}, {"canonical_score"});
  CHECK(run.budget_exceeded);
  for (bool ok : run.columns[0].ok) CHECK_FALSE(ok);
}

TEST_CASE("budget misses become NA cells with a marker") {
  // tree_max needs a tree; on cycles every row misses
  ScalingRun run = run_scaling(Family::cycle, {4, 6}, {"t_mix", "tree_max"});
  CHECK(run.budget_exceeded);
  REQUIRE(run.columns.size() == 2);
  for (bool ok : run.columns[1].ok) CHECK_FALSE(ok);
  CHECK_FALSE(run.columns[1].fitted);
  std::string csv = scaling_to_csv(run);
  CHECK(csv.find("NA") != std::string::npos);
  CHECK(csv.find("tree_max") != std::string::npos);
  CHECK(csv.find("missing") != std::string::npos);
}
