#include "mixtime/scaling.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <stdexcept>

#include "mixtime/game.hpp"
#include "mixtime/mixing.hpp"

namespace mixtime {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Connected candidate sets for large chains: BFS prefixes from vertex 0
// plus all singletons.
std::vector<VertexSet> bfs_prefix_candidates(const Chain& chain) {
  int n = chain.size();
  std::vector<int> order;
  std::vector<char> vis(static_cast<size_t>(n), 0);
  std::queue<int> q;
  q.push(0);
  vis[0] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    order.push_back(v);
    for (int w : chain.neighbours(v))
      if (!vis[static_cast<size_t>(w)]) {
        vis[static_cast<size_t>(w)] = 1;
        q.push(w);
      }
  }
  std::vector<VertexSet> out;
  VertexSet acc(n);
  for (size_t i = 0; i + 1 < order.size(); ++i) {
    acc.insert(order[i]);
    out.push_back(acc);
  }
  for (int v = 0; v < n; ++v) out.push_back(VertexSet::of(n, {v}));
  return out;
}

struct SizeContext {
  ExampleSpec spec;
  GeneratedExample gen;
  bool has_stop = false;
  StopTimeReport stop;

  SizeContext(ExampleSpec s) : spec(s), gen(generate(s)) {}

  const StopTimeReport& stop_report(int budget) {
    if (!has_stop) {
      stop = stop_time_report(gen.chain, budget);
      has_stop = true;
    }
    return stop;
  }
};

double eval_metric(const std::string& name, SizeContext& ctx, const ScalingOptions& opts) {
  const Chain& chain = ctx.gen.chain;
  if (name == "t_mix") {
    TvScanOptions tv;
    tv.step_cap = opts.step_cap;
    tv.start_budget = opts.start_budget;
    return static_cast<double>(mixing_time(chain, tv).t_mix);
  }
  if (name == "t_stop") return ctx.stop_report(opts.start_budget).t_stop;
  if (name == "greedy_score") {
    int s = ctx.stop_report(opts.start_budget).argmax_start;
    return sequence_score(chain, greedy_sequence(chain, s, opts.theta));
  }
  if (name == "game_bound" || name == "block_game_bound") {
    GameParams params;
    params.s = ctx.stop_report(opts.start_budget).argmax_start;
    params.alpha = opts.alpha;
    params.beta = opts.beta;
    params.gamma = opts.gamma;
    if (name == "game_bound") {
      GreedyCrawler crawler(chain, params.s);
      HullDasher dasher;
      return play_game(chain, params, crawler, dasher, false, 12).bound;
    }
    std::vector<VertexSet> blocks = prodchain_blocks(chain, ctx.spec);
    BlockCrawler crawler(chain, params.s, blocks);
    BlockDasher dasher(blocks);
    return play_game(chain, params, crawler, dasher, false, 12).bound;
  }
  if (name == "canonical_score")
    return sequence_score(chain, canonical_bottleneck(chain, ctx.spec));
  if (name == "fr_bound") {
    if (chain.size() <= 18) return fr_profile_bound(chain).bound;
    std::vector<VertexSet> cand = bfs_prefix_candidates(chain);
    return fr_profile_bound(chain, 18, &cand).bound;
  }
  if (name == "tree_max") {
    if (!chain.is_tree()) throw std::invalid_argument("tree_max needs a tree chain");
    return max_score_tree(chain).score;
  }
  throw std::invalid_argument("unknown scaling metric: " + name);
}

}  // namespace

FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_loglog: need matching vectors of size >= 2");
  size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("fit_loglog: values must be positive");
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  double dn = static_cast<double>(n);
  double vxx = sxx - sx * sx / dn;
  double vxy = sxy - sx * sy / dn;
  double vyy = syy - sy * sy / dn;
  if (vxx <= 0.0) throw std::invalid_argument("fit_loglog: degenerate x values");
  FitResult fit;
  fit.slope = vxy / vxx;
  fit.intercept = (sy - fit.slope * sx) / dn;
  fit.r2 = vyy <= 0.0 ? 1.0 : (vxy * vxy) / (vxx * vyy);
  fit.points = static_cast<int>(n);
  return fit;
}

bool fit_self_test() {
  std::vector<double> x{3, 5, 9, 17, 40};
  std::vector<double> y;
  for (double v : x) y.push_back(2.5 * std::pow(v, 1.75));
  FitResult fit = fit_loglog(x, y);
  return std::abs(fit.slope - 1.75) <= 1e-9 && std::abs(fit.r2 - 1.0) <= 1e-9;
}

ScalingRun run_scaling(Family family, const std::vector<int>& grid,
                       const std::vector<std::string>& metrics, const ScalingOptions& opts) {
  if (grid.empty()) throw std::invalid_argument("run_scaling: empty grid");
  for (size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw std::invalid_argument("run_scaling: grid must be strictly increasing");

  static const std::vector<std::string> known{
      "t_mix",      "t_stop",          "greedy_score", "game_bound",
      "fr_bound",   "tree_max",        "canonical_score", "block_game_bound"};
  for (const auto& m : metrics) {
    bool found = false;
    for (const auto& k : known) found = found || k == m;
    if (!found) throw std::invalid_argument("unknown scaling metric: " + m);
  }

  ScalingRun run;
  run.family = family;
  run.k = opts.k;
  run.grid = grid;
  for (const auto& m : metrics) run.columns.push_back(MetricColumn{m, {}, {}, {}, false});

  for (int size : grid) {
    ExampleSpec spec;
    spec.family = family;
    spec.seed = opts.seed;
    spec.perturb = opts.perturb;
    spec.doubled_left = opts.doubled_left;
    if (family == Family::bintree || family == Family::dingperes)
      spec.K = size;
    else
      spec.n = size;
    if (family == Family::prodchain) spec.k = opts.k;
    SizeContext ctx(spec);
    for (auto& col : run.columns) {
      double value = kNaN;
      bool ok = true;
      try {
        value = eval_metric(col.name, ctx, opts);
      } catch (const std::exception&) {
        ok = false;
        run.budget_exceeded = true;
      }
      col.values.push_back(value);
      col.ok.push_back(ok);
    }
  }

  for (auto& col : run.columns) {
    std::vector<double> xs, ys;
    for (size_t i = 0; i < run.grid.size(); ++i)
      if (col.ok[i] && col.values[i] > 0.0) {
        xs.push_back(static_cast<double>(run.grid[i]));
        ys.push_back(col.values[i]);
      }
    while (xs.size() > 4) {
      xs.erase(xs.begin());
      ys.erase(ys.begin());
    }
    if (xs.size() >= 2) {
      col.fit = fit_loglog(xs, ys);
      col.fitted = true;
    }
  }
  return run;
}

std::string scaling_to_csv(const ScalingRun& run) {
  std::string out = "family,size";
  for (const auto& col : run.columns) out += "," + col.name;
  out += ",missing\n";
  for (size_t i = 0; i < run.grid.size(); ++i) {
    out += family_to_string(run.family) + "," + std::to_string(run.grid[i]);
    std::string missing;
    for (const auto& col : run.columns) {
      if (col.ok[i]) {
        out += "," + fmt(col.values[i]);
      } else {
        out += ",NA";
        if (!missing.empty()) missing += ";";
        missing += col.name;
      }
    }
    out += "," + missing + "\n";
  }
  for (const char* row : {"slope", "r2"}) {
    out += row;
    out += ",";
    for (const auto& col : run.columns) {
      if (col.fitted)
        out += "," + fmt(std::string(row) == "slope" ? col.fit.slope : col.fit.r2);
      else
        out += ",NA";
    }
    out += ",\n";
  }
  return out;
}

}  // namespace mixtime
