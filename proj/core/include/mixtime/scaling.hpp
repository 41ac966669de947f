#ifndef MIXTIME_SCALING_HPP
#define MIXTIME_SCALING_HPP

#include <string>
#include <vector>

#include "mixtime/examples.hpp"

namespace mixtime {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};

// Least squares of log y on log x. Non-positive values are rejected.
FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

// fit_loglog recovers the exponent of an exact power law to 1e-9.
bool fit_self_test();

struct MetricColumn {
  std::string name;
  std::vector<double> values;  // NaN where the budget was exceeded
  std::vector<bool> ok;
  FitResult fit;               // over the largest 4 usable grid points
  bool fitted = false;
};

struct ScalingRun {
  Family family = Family::path;
  int k = 0;  // PRODCHAIN second parameter
  std::vector<int> grid;
  std::vector<MetricColumn> columns;
  bool budget_exceeded = false;
};

struct ScalingOptions {
  int k = 2;                 // PRODCHAIN clique size
  unsigned seed = 0;
  int start_budget = -1;     // forwarded to stop-time and t_mix starts
  long step_cap = 10000000;  // TV scan budget
  double theta = 0.5;
  double alpha = 0.5;
  double beta = 0.5;
  double gamma = 0.5;
  bool perturb = false;
  bool doubled_left = false;
};

// Metrics: t_mix, t_stop, greedy_score, game_bound, fr_bound, tree_max,
// canonical_score, block_game_bound (the last two PRODCHAIN only). The grid
// must be strictly increasing. Budget misses leave NaN cells and set the
// run-level flag; everything else is deterministic in (family, grid, opts).
ScalingRun run_scaling(Family family, const std::vector<int>& grid,
                       const std::vector<std::string>& metrics,
                       const ScalingOptions& opts = {});

// One row per size plus slope and r2 rows; trailing marker column lists the
// metrics whose budget was exceeded on that row.
std::string scaling_to_csv(const ScalingRun& run);

}  // namespace mixtime

#endif
