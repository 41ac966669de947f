#include "mixtime/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mixtime {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, true);
  if (!j.is_object()) throw std::invalid_argument("expected a JSON object");
  return j;
}

std::vector<std::string> state_list(const json& j) {
  if (!j.contains("states") || !j["states"].is_array())
    throw std::invalid_argument("missing \"states\" array");
  std::vector<std::string> states;
  for (const auto& s : j["states"]) states.push_back(s.get<std::string>());
  return states;
}

json set_to_ids(const Chain& chain, const VertexSet& A) {
  json out = json::array();
  for (int v : A.indices()) out.push_back(chain.states()[static_cast<size_t>(v)]);
  return out;
}

VertexSet ids_to_set(const Chain& chain, const json& arr) {
  VertexSet A(chain.size());
  for (const auto& id : arr) A.insert(chain.index_of(id.get<std::string>()));
  return A;
}

json report_to_json(const MoveReport& r) {
  return json{{"valid", r.valid},
              {"violated_rule", r.violated_rule},
              {"provenance", r.provenance}};
}

MoveReport report_from_json(const json& j) {
  MoveReport r;
  r.valid = j.at("valid").get<bool>();
  r.violated_rule = j.at("violated_rule").get<std::string>();
  r.provenance = j.at("provenance").get<std::string>();
  return r;
}

}  // namespace

Chain chain_from_json_text(const std::string& text, bool allow_nonlazy) {
  json j = parse(text);
  std::vector<std::string> states = state_list(j);
  if (j.contains("matrix")) {
    const auto& rows = j["matrix"];
    auto n = states.size();
    if (!rows.is_array() || rows.size() != n)
      throw std::invalid_argument("matrix must be square over the state list");
    Eigen::MatrixXd P(n, n);
    for (size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n)
        throw std::invalid_argument("matrix must be square over the state list");
      for (size_t k = 0; k < n; ++k) P(static_cast<long>(i), static_cast<long>(k)) = rows[i][k].get<double>();
    }
    return Chain::from_matrix(std::move(states), std::move(P), allow_nonlazy);
  }
  if (j.contains("conductances")) {
    if (j.contains("lazy") && !j["lazy"].get<bool>())
      throw std::invalid_argument("conductance chains are always built lazy");
    std::vector<Conductance> edges;
    for (const auto& e : j["conductances"]) {
      if (!e.is_array() || e.size() != 3)
        throw std::invalid_argument("each conductance entry is [u, v, c]");
      edges.push_back({e[0].get<std::string>(), e[1].get<std::string>(), e[2].get<double>()});
    }
    return Chain::from_conductances(std::move(states), edges);
  }
  throw std::invalid_argument("chain file needs \"matrix\" or \"conductances\"");
}

Chain load_chain(const std::string& path, bool allow_nonlazy) {
  return chain_from_json_text(read_file(path), allow_nonlazy);
}

std::string chain_to_json_text(const Chain& chain) {
  json j;
  j["states"] = chain.states();
  json rows = json::array();
  for (int u = 0; u < chain.size(); ++u) {
    json row = json::array();
    for (int v = 0; v < chain.size(); ++v) row.push_back(chain.p(u, v));
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  return j.dump(2) + "\n";
}

void save_chain(const Chain& chain, const std::string& path) {
  write_file(path, chain_to_json_text(chain));
}

Correspondence correspondence_from_json_text(const std::string& text, const Chain& T,
                                             const Chain& G) {
  json j = parse(text);
  if (!j.contains("pairs") || !j["pairs"].is_array())
    throw std::invalid_argument("missing \"pairs\" array");
  Correspondence corr;
  for (const auto& p : j["pairs"]) {
    if (!p.is_array() || p.size() != 2)
      throw std::invalid_argument("each pair is [t_id, g_id]");
    corr.pairs.emplace_back(T.index_of(p[0].get<std::string>()),
                            G.index_of(p[1].get<std::string>()));
  }
  return corr;
}

Correspondence load_correspondence(const std::string& path, const Chain& T, const Chain& G) {
  return correspondence_from_json_text(read_file(path), T, G);
}

std::string correspondence_to_json_text(const Correspondence& corr, const Chain& T,
                                        const Chain& G) {
  json pairs = json::array();
  for (const auto& [t, g] : corr.pairs)
    pairs.push_back(json::array({T.states()[static_cast<size_t>(t)],
                                 G.states()[static_cast<size_t>(g)]}));
  return json{{"pairs", std::move(pairs)}}.dump(2) + "\n";
}

void save_correspondence(const Correspondence& corr, const Chain& T, const Chain& G,
                         const std::string& path) {
  write_file(path, correspondence_to_json_text(corr, T, G));
}

BottleneckSequence sequence_from_json_text(const std::string& text, const Chain& chain) {
  json j = parse(text);
  BottleneckSequence seq;
  seq.theta = j.at("theta").get<double>();
  for (const auto& arr : j.at("sets")) seq.sets.push_back(ids_to_set(chain, arr));
  return seq;
}

BottleneckSequence load_sequence(const std::string& path, const Chain& chain) {
  return sequence_from_json_text(read_file(path), chain);
}

std::string sequence_to_json_text(const Chain& chain, const BottleneckSequence& seq) {
  json j;
  j["theta"] = seq.theta;
  j["score"] = sequence_score(chain, seq);
  json sets = json::array();
  for (const auto& s : seq.sets) sets.push_back(set_to_ids(chain, s));
  j["sets"] = std::move(sets);
  return j.dump(2) + "\n";
}

void save_sequence(const Chain& chain, const BottleneckSequence& seq, const std::string& path) {
  write_file(path, sequence_to_json_text(chain, seq));
}

GameTranscript transcript_from_json_text(const std::string& text, const Chain& chain) {
  json j = parse(text);
  GameTranscript t;
  const auto& p = j.at("params");
  t.params.s = chain.index_of(p.at("s").get<std::string>());
  t.params.alpha = p.at("alpha").get<double>();
  t.params.beta = p.at("beta").get<double>();
  t.params.gamma = p.at("gamma").get<double>();
  for (const auto& rj : j.at("rounds")) {
    GameRound round;
    round.C = ids_to_set(chain, rj.at("C"));
    round.D = ids_to_set(chain, rj.at("D"));
    round.phi_D = rj.at("phi_D").get<double>();
    round.crawler_check = report_from_json(rj.at("crawler"));
    round.dasher_check = report_from_json(rj.at("dasher"));
    t.rounds.push_back(std::move(round));
  }
  t.score = j.at("score").get<double>();
  t.bound = j.at("bound").get<double>();
  t.all_moves_valid = j.at("all_moves_valid").get<bool>();
  t.all_verified = j.at("all_verified").get<bool>();
  t.aborted = j.value("aborted", false);
  t.abort_reason = j.value("abort_reason", std::string());
  return t;
}

GameTranscript load_transcript(const std::string& path, const Chain& chain) {
  return transcript_from_json_text(read_file(path), chain);
}

std::string transcript_to_json_text(const Chain& chain, const GameTranscript& t) {
  json j;
  j["params"] = json{{"s", chain.states()[static_cast<size_t>(t.params.s)]},
                     {"alpha", t.params.alpha},
                     {"beta", t.params.beta},
                     {"gamma", t.params.gamma}};
  json rounds = json::array();
  for (const auto& r : t.rounds) {
    rounds.push_back(json{{"C", set_to_ids(chain, r.C)},
                          {"D", set_to_ids(chain, r.D)},
                          {"phi_D", r.phi_D},
                          {"crawler", report_to_json(r.crawler_check)},
                          {"dasher", report_to_json(r.dasher_check)}});
  }
  j["rounds"] = std::move(rounds);
  j["score"] = t.score;
  j["bound"] = t.bound;
  j["all_moves_valid"] = t.all_moves_valid;
  j["all_verified"] = t.all_verified;
  j["aborted"] = t.aborted;
  j["abort_reason"] = t.abort_reason;
  return j.dump(2) + "\n";
}

void save_transcript(const Chain& chain, const GameTranscript& t, const std::string& path) {
  write_file(path, transcript_to_json_text(chain, t));
}

GameTranscript revalidate_transcript(const Chain& chain, const GameTranscript& t,
                                     int adjustment_cap) {
  GameTranscript out;
  out.params = t.params;
  GamePosition pos{chain.empty_set(), chain.empty_set()};
  for (const auto& r : t.rounds) {
    GameRound round;
    round.C = r.C;
    round.D = r.D;
    round.crawler_check =
        validate_move(chain, out.params, pos, r.C, Player::crawler, adjustment_cap);
    pos.C = r.C;
    round.dasher_check =
        validate_move(chain, out.params, pos, r.D, Player::dasher, adjustment_cap);
    pos.D = r.D;
    round.phi_D = r.D.is_full() ? 0.0 : chain.phi(r.D);
    if (!r.D.is_full()) out.score += 1.0 / round.phi_D;
    out.all_moves_valid =
        out.all_moves_valid && round.crawler_check.valid && round.dasher_check.valid;
    out.all_verified = out.all_verified && round.crawler_check.provenance == "verified" &&
                       round.dasher_check.provenance == "verified";
    out.rounds.push_back(std::move(round));
  }
  out.bound = game_bound(out.params, out.score);
  out.aborted = t.aborted;
  out.abort_reason = t.abort_reason;
  return out;
}

std::string mixing_report_to_json_text(const MixingReport& report) {
  json j;
  j["t_mix"] = report.t_mix;
  j["t_stop"] = report.t_stop;
  j["worst_tv_by_step"] = report.worst_tv_by_step;
  j["per_start_stop_cost"] = report.per_start_stop_cost;
  j["t_stop_argmax"] = report.t_stop_argmax;
  j["exhaustive_starts"] = report.exhaustive_starts;
  return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace mixtime
