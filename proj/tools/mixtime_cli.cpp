#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixtime/examples.hpp"
#include "mixtime/io.hpp"
#include "mixtime/scaling.hpp"

using nlohmann::json;
using namespace mixtime;

namespace {

struct CommonFlags {
  double theta = 0.5;
  double alpha = 0.5;
  double beta = 0.5;
  double gamma = 0.5;
  unsigned seed = 0;
  int budget_states = -1;
  bool allow_nonlazy = false;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--theta", f.theta, "bottleneck parameter in (0,1)");
  cmd->add_option("--alpha", f.alpha, "game nearness parameter (1/alpha integer)");
  cmd->add_option("--beta", f.beta, "game adjustment parameter");
  cmd->add_option("--gamma", f.gamma, "game flow-decay parameter");
  cmd->add_option("--seed", f.seed, "seed for all randomized pieces");
  cmd->add_option("--budget-states", f.budget_states,
                  "cap on the number of start states scanned (-1 = all)");
  cmd->add_flag("--allow-nonlazy", f.allow_nonlazy, "accept non-lazy transition matrices");
  cmd->add_option("--out", f.out, "output file (default stdout)");
}

void emit(const CommonFlags& f, const std::string& text) {
  if (f.out.empty())
    std::cout << text;
  else
    write_file(f.out, text);
}

json validation_json(const ValidationReport& vr) {
  return json{{"lazy", vr.lazy},
              {"irreducible", vr.irreducible},
              {"reversible", vr.reversible},
              {"eps_uniform", vr.eps_uniform},
              {"flow_ratio", vr.flow_ratio},
              {"max_row_error", vr.max_row_error},
              {"detailed_balance_error", vr.detailed_balance_error}};
}

json sets_json(const Chain& chain, const std::vector<VertexSet>& sets) {
  json arr = json::array();
  for (const auto& s : sets) {
    json ids = json::array();
    for (int v : s.indices()) ids.push_back(chain.states()[static_cast<size_t>(v)]);
    arr.push_back(std::move(ids));
  }
  return arr;
}

double fr_bound_for(const Chain& chain) {
  if (chain.size() <= 18) return fr_profile_bound(chain).bound;
  // same candidate family the scaling harness uses
  std::vector<VertexSet> cand;
  {
    std::vector<int> order;
    std::vector<char> vis(static_cast<size_t>(chain.size()), 0);
    std::vector<int> q{0};
    vis[0] = 1;
    for (size_t head = 0; head < q.size(); ++head) {
      int v = q[head];
      order.push_back(v);
      for (int w : chain.neighbours(v))
        if (!vis[static_cast<size_t>(w)]) {
          vis[static_cast<size_t>(w)] = 1;
          q.push_back(w);
        }
    }
    VertexSet acc(chain.size());
    for (size_t i = 0; i + 1 < order.size(); ++i) {
      acc.insert(order[i]);
      cand.push_back(acc);
    }
    for (int v = 0; v < chain.size(); ++v) cand.push_back(VertexSet::of(chain.size(), {v}));
  }
  return fr_profile_bound(chain, 18, &cand).bound;
}

int run_analyze(const std::string& file, const CommonFlags& f) {
  Chain chain = load_chain(file, f.allow_nonlazy);
  TvScanOptions tv;
  tv.start_budget = f.budget_states;
  MixingReport mr = analyze_mixing(chain, tv);
  json out;
  out["validation"] = validation_json(chain.validate());
  out["mixing"] = json::parse(mixing_report_to_json_text(mr));

  json bounds = json::array();
  auto add_bound = [&](const std::string& name, double value, const std::string& kind,
                       double reference) {
    bool pass = kind == "upper" ? value >= reference - 1e-9 : value <= reference + 1e-9;
    bounds.push_back(json{{"name", name},
                          {"value", value},
                          {"kind", kind},
                          {"reference", reference},
                          {"verdict", pass ? "PASS" : "FAIL"}});
  };
  int s = mr.t_stop_argmax;
  BottleneckSequence greedy = greedy_sequence(chain, s, f.theta);
  double gscore = sequence_score(chain, greedy);
  add_bound("greedy_theta_" + std::to_string(f.theta), gscore / (1.0 - f.theta), "upper",
            mr.t_stop);
  {
    GameParams params{s, f.alpha, f.beta, f.gamma};
    GreedyCrawler crawler(chain, s);
    HullDasher dasher;
    GameTranscript t = play_game(chain, params, crawler, dasher, false, 12);
    add_bound("game_bound", t.bound, "upper", mr.t_stop);
  }
  bounds.push_back(json{{"name", "fr_bound"},
                        {"value", fr_bound_for(chain)},
                        {"kind", "profile"},
                        {"verdict", "-"}});
  if (chain.is_tree() && chain.size() <= 2048) {
    MaxScoreResult tree = max_score_tree(chain);
    // certifies a lower bound on the worst vertex-to-vertex hitting time
    double worst_hit = 0.0;
    for (int v = 0; v < chain.size(); ++v) {
      Eigen::VectorXd h = hitting_vector(chain, VertexSet::of(chain.size(), {v}));
      worst_hit = std::max(worst_hit, h.maxCoeff());
    }
    add_bound("tree_lower_bound", tree_lower_bound(chain, tree.witness), "lower", worst_hit);
  }
  out["bounds"] = std::move(bounds);
  emit(f, out.dump(2) + "\n");
  return 0;
}

int run_bottleneck(const std::string& file, const std::string& seq_file,
                   const std::string& start, bool brute, const CommonFlags& f) {
  Chain chain = load_chain(file, f.allow_nonlazy);
  json out;
  if (!seq_file.empty()) {
    BottleneckSequence seq = load_sequence(seq_file, chain);
    SequenceReport rep = verify_sequence(chain, seq);
    out["verify"] = json{{"valid", rep.valid},
                         {"first_violation", rep.first_violation},
                         {"index", rep.index},
                         {"max_theta", rep.max_theta}};
    if (rep.valid) out["score"] = sequence_score(chain, seq);
    emit(f, out.dump(2) + "\n");
    return rep.valid ? 0 : 1;
  }
  StopTimeReport stop = stop_time_report(chain, f.budget_states);
  int s = start.empty() ? stop.argmax_start : chain.index_of(start);
  BottleneckSequence greedy = greedy_sequence(chain, s, f.theta);
  double score = sequence_score(chain, greedy);
  out["start"] = chain.states()[static_cast<size_t>(s)];
  out["theta"] = f.theta;
  out["t_stop"] = stop.t_stop;
  out["greedy"] = json{{"score", score},
                       {"bound", score / (1.0 - f.theta)},
                       {"sets", sets_json(chain, greedy.sets)}};
  if (brute) {
    MaxScoreResult best = max_score_brute(chain, f.theta);
    out["brute"] = json{{"score", best.score}, {"sets", sets_json(chain, best.witness.sets)}};
  }
  if (chain.is_tree()) {
    MaxScoreResult tree = max_score_tree(chain);
    out["tree"] = json{{"score", tree.score},
                       {"lower_bound", tree_lower_bound(chain, tree.witness)},
                       {"sets", sets_json(chain, tree.witness.sets)}};
  }
  emit(f, out.dump(2) + "\n");
  return 0;
}

json transcript_summary(const Chain& chain, const GameTranscript& t) {
  return json{{"rounds", t.rounds.size()},
              {"score", t.score},
              {"bound", t.bound},
              {"all_moves_valid", t.all_moves_valid},
              {"all_verified", t.all_verified},
              {"aborted", t.aborted},
              {"abort_reason", t.abort_reason},
              {"transcript", json::parse(transcript_to_json_text(chain, t))}};
}

int run_game(const std::string& file, const std::string& transcript_file,
             const std::string& start, const CommonFlags& f) {
  Chain chain = load_chain(file, f.allow_nonlazy);
  if (!transcript_file.empty()) {
    GameTranscript loaded = load_transcript(transcript_file, chain);
    GameTranscript checked = revalidate_transcript(chain, loaded);
    emit(f, transcript_summary(chain, checked).dump(2) + "\n");
    return checked.all_moves_valid ? 0 : 1;
  }
  int s = start.empty() ? stop_time_report(chain, f.budget_states).argmax_start
                        : chain.index_of(start);
  GameParams params{s, f.alpha, f.beta, f.gamma};
  GreedyCrawler crawler(chain, s);
  HullDasher dasher;
  GameTranscript t = play_game(chain, params, crawler, dasher, true);
  if (!f.out.empty()) save_transcript(chain, t, f.out);
  std::cout << transcript_summary(chain, t).dump(2) + "\n";
  return t.all_moves_valid ? 0 : 1;
}

int run_ri_compare(const std::string& chain_file, const std::string& tree_file,
                   const std::string& corr_file, int r, const CommonFlags& f) {
  Chain X = load_chain(chain_file, f.allow_nonlazy);
  Chain T = load_chain(tree_file, f.allow_nonlazy);
  Correspondence corr = load_correspondence(corr_file, T, X);
  StretchResult stretch = correspondence_stretch(X, T, corr);
  int use_r = r > 0 ? r : stretch.certified_r;
  AtSetsReport at = build_at_sets(X, T, corr, use_r, f.seed);
  GameParams params{0, f.alpha, f.beta, f.gamma};
  params.s = stop_time_report(X, f.budget_states).argmax_start;
  RobustnessReport rep = robustness_compare(X, T, corr, use_r, params);
  json out;
  out["stretch"] = json{{"value", stretch.stretch}, {"certified_r", stretch.certified_r}};
  out["r"] = use_r;
  out["at_sets"] = json{{"connectivity_ok", at.connectivity_ok},
                        {"separation_ok", at.separation_ok},
                        {"disjointness_ok", at.disjointness_ok},
                        {"first_failure", at.first_failure}};
  out["headline"] = json{{"t_stop_x", rep.t_stop_x},
                         {"t_stop_y", rep.t_stop_y},
                         {"game_score", rep.game_score},
                         {"tree_max_score", rep.tree_max_score}};
  out["geometry"] = json{{"diameter_ok", rep.diameter_ok},
                         {"growth_ok", rep.growth_ok},
                         {"index_monotone_ok", rep.index_monotone_ok},
                         {"offset_sum_ok", rep.offset_sum_ok},
                         {"witness_ok", rep.witness_ok},
                         {"first_failure", rep.first_failure}};
  emit(f, out.dump(2) + "\n");
  return 0;
}

int run_examples(const std::string& family, int n, int k, int K, bool perturb,
                 bool doubled_left, const CommonFlags& f) {
  ExampleSpec spec;
  spec.family = family_from_string(family);
  spec.n = n;
  spec.k = k;
  spec.K = K;
  spec.seed = f.seed;
  spec.perturb = perturb;
  spec.doubled_left = doubled_left;
  GeneratedExample gen = generate(spec);
  std::string prefix = f.out.empty() ? family : f.out;
  save_chain(gen.chain, prefix + ".chain.json");
  if (gen.companion_tree) {
    save_chain(*gen.companion_tree, prefix + ".tree.json");
    save_correspondence(*gen.correspondence, *gen.companion_tree, gen.chain,
                        prefix + ".corr.json");
  }
  if (spec.family == Family::star2 || spec.family == Family::prodchain ||
      spec.family == Family::dingperes) {
    save_sequence(gen.chain, canonical_bottleneck(gen.chain, spec), prefix + ".seq.json");
  }
  std::cout << "wrote " << prefix << ".chain.json (" << gen.chain.size() << " states)\n";
  return 0;
}

int run_scaling_cmd(const std::string& family, const std::string& grid_str,
                    const std::string& metrics_str, const CommonFlags& f, int k) {
  if (!fit_self_test()) {
    std::cerr << "exponent-fit self test failed\n";
    return 2;
  }
  std::vector<int> grid;
  std::vector<std::string> metrics;
  {
    std::stringstream gs(grid_str);
    for (std::string tok; std::getline(gs, tok, ',');) grid.push_back(std::stoi(tok));
    std::stringstream ms(metrics_str);
    for (std::string tok; std::getline(ms, tok, ',');) metrics.push_back(tok);
  }
  ScalingOptions opts;
  opts.k = k;
  opts.seed = f.seed;
  opts.start_budget = f.budget_states;
  opts.theta = f.theta;
  opts.alpha = f.alpha;
  opts.beta = f.beta;
  opts.gamma = f.gamma;
  ScalingRun run = run_scaling(family_from_string(family), grid, metrics, opts);
  emit(f, scaling_to_csv(run));
  return run.budget_exceeded ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixing-time bounds via bottleneck sequences"};
  app.require_subcommand(1);

  CommonFlags f;
  std::string chain_file, tree_file, corr_file, seq_file, transcript_file, start;
  std::string family, grid_str = "8,16,32,64", metrics_str = "t_mix,t_stop";
  int n = 0, k = 2, K = 0, r = 0;
  bool brute = false, perturb = false, doubled_left = false;

  auto* analyze = app.add_subcommand("analyze", "validation, mixing report and bound table");
  analyze->add_option("chain", chain_file, "chain JSON file")->required();
  add_common(analyze, f);

  auto* bottleneck =
      app.add_subcommand("bottleneck", "greedy / brute / tree sequences, or verify one");
  bottleneck->add_option("chain", chain_file, "chain JSON file")->required();
  bottleneck->add_option("--sequence", seq_file, "sequence JSON to verify");
  bottleneck->add_option("--start", start, "start state id (default: worst stop start)");
  bottleneck->add_flag("--brute", brute, "also run the exact DP (small chains)");
  add_common(bottleneck, f);

  auto* game = app.add_subcommand("game", "play crawler vs dasher, or replay a transcript");
  game->add_option("chain", chain_file, "chain JSON file")->required();
  game->add_option("--transcript", transcript_file, "transcript JSON to replay and re-validate");
  game->add_option("--start", start, "start state id (default: worst stop start)");
  add_common(game, f);

  auto* ri = app.add_subcommand("ri-compare", "robustness comparison across a correspondence");
  ri->add_option("chain", chain_file, "chain JSON file")->required();
  ri->add_option("--tree", tree_file, "tree chain JSON file")->required();
  ri->add_option("--corr", corr_file, "correspondence JSON file")->required();
  ri->add_option("--r", r, "stretch parameter (default: certified from the data)");
  add_common(ri, f);

  auto* ex = app.add_subcommand("examples", "generate an example family to JSON files");
  ex->add_option("family", family, "PATH|CYCLE|STAR2|WPATH3|HAMCLIQUE|BINTREE|DINGPERES|PRODCHAIN")
      ->required();
  ex->add_option("--n", n, "size parameter");
  ex->add_option("--k", k, "PRODCHAIN clique size");
  ex->add_option("--K", K, "BINTREE / DINGPERES height");
  ex->add_flag("--perturb", perturb, "seeded conductance perturbation in [1/2,2]");
  ex->add_flag("--doubled-left", doubled_left, "DINGPERES left-edge conductance 2");
  add_common(ex, f);

  auto* scaling = app.add_subcommand(
      "scaling",
      "grid of sizes to CSV. Columns: family,size,<metric...>,missing; metrics are "
      "t_mix, t_stop, greedy_score, game_bound, fr_bound, tree_max, canonical_score, "
      "block_game_bound; two trailing rows hold the log-log slope and r2 fitted over "
      "the largest 4 sizes");
  scaling->add_option("family", family, "example family")->required();
  scaling->add_option("--grid", grid_str, "comma separated sizes, strictly increasing");
  scaling->add_option("--metrics", metrics_str, "comma separated metric names");
  scaling->add_option("--k", k, "PRODCHAIN clique size");
  add_common(scaling, f);

  auto* verify = app.add_subcommand("verify-transcript", "re-validate a transcript file");
  verify->add_option("chain", chain_file, "chain JSON file")->required();
  verify->add_option("--transcript", transcript_file, "transcript JSON file")->required();
  add_common(verify, f);

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return run_analyze(chain_file, f);
    if (bottleneck->parsed()) return run_bottleneck(chain_file, seq_file, start, brute, f);
    if (game->parsed()) return run_game(chain_file, transcript_file, start, f);
    if (ri->parsed()) return run_ri_compare(chain_file, tree_file, corr_file, r, f);
    if (ex->parsed()) return run_examples(family, n, k, K, perturb, doubled_left, f);
    if (scaling->parsed()) return run_scaling_cmd(family, grid_str, metrics_str, f, k);
    if (verify->parsed()) {
      Chain chain = load_chain(chain_file, f.allow_nonlazy);
      GameTranscript checked =
          revalidate_transcript(chain, load_transcript(transcript_file, chain));
      emit(f, transcript_summary(chain, checked).dump(2) + "\n");
      return checked.all_moves_valid ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
