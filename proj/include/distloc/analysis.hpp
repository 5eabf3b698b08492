#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "distloc/instance.hpp"
#include "distloc/mechanisms.hpp"
#include "distloc/objectives.hpp"

namespace distloc {

/// Ratio of the winner's cost to the optimal cost. A positive cost against a
/// zero optimum is reported as unbounded instead of as a float.
class Distortion {
 public:
  static Distortion finite(double ratio) { return Distortion(ratio, false); }
  static Distortion unbounded() {
    return Distortion(std::numeric_limits<double>::infinity(), true);
  }

  bool is_unbounded() const { return unbounded_; }
  /// +infinity when unbounded.
  double value() const { return value_; }

 private:
  Distortion(double value, bool unbounded) : value_(value), unbounded_(unbounded) {}
  double value_;
  bool unbounded_;
};

/// cost(location) / min cost, with 0/0 read as 1.
Distortion distortion_at(Objective objective, const Instance& instance, double location,
                         const Optimum& optimum);
Distortion distortion_at(Objective objective, const Instance& instance, double location);

struct EvaluationReport {
  std::string mechanism;
  Objective objective = Objective::Sum;
  std::vector<double> representatives;
  double winner = 0.0;
  double winner_cost = 0.0;
  Optimum optimum;
  Distortion distortion = Distortion::finite(1.0);
};

EvaluationReport evaluate(const Mechanism& mechanism, Objective objective,
                          const Instance& instance);

// Worst-case search.

struct SearchConfig {
  std::size_t k_min = 1;
  std::size_t k_max = 6;
  std::size_t lambda_min = 1;
  std::size_t lambda_max = 4;
  /// Random instances per (k, lambda) cell.
  std::size_t trials = 20000;
  std::uint64_t seed = 0;
  /// Hill-climbing perturbations applied to each refined incumbent.
  std::size_t refine_steps = 500;
  bool include_families = true;
  /// 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct SearchResult {
  Instance best_instance;
  double best_distortion = 1.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  /// Where the incumbent came from, e.g. "random k=2 lambda=4 trial=17",
  /// "family sc-tight a=1" or either of those followed by "+climb".
  std::string origin;
};

/// Maximizes distortion over seeded random instances in every (k, lambda)
/// cell, over the structured families in family_sweep(), and then over
/// coordinate-wise hill-climbing from the incumbents. The same config always
/// gives the same result, whatever the thread count.
SearchResult search_worst_case(const Mechanism& mechanism, Objective objective,
                               const SearchConfig& config);

struct ClimbResult {
  Instance instance;
  double distortion = 1.0;
  /// Incumbent distortion after each step.
  std::vector<double> trajectory;
};

/// Moves one agent at a time by +/- step, keeping a move only if distortion
/// strictly increases; the step halves after a full pass without progress.
/// Works on the instance mapped affinely onto [0, 1], which leaves distortion
/// unchanged, and returns it in those coordinates.
ClimbResult hill_climb(const Mechanism& mechanism, Objective objective,
                       const Instance& start, std::size_t steps);

/// Parameter grids the search sweeps for each structured family.
std::vector<InstanceFamily> family_sweep();

// Strategyproofness.

struct Manipulation {
  std::size_t agent = 0;
  double true_position = 0.0;
  double misreport = 0.0;
  double honest_cost = 0.0;
  double deviating_cost = 0.0;
};

/// Reports tried for `agent`. For statistic mechanisms these cover every
/// piece of the (piecewise constant) winner-versus-report map; for averaging
/// rules they add a step-doubling line search and reports that steer the
/// agent's own representative onto chosen targets.
std::vector<double> misreport_candidates(const Mechanism& mechanism,
                                         const Instance& instance, std::size_t agent);

/// First misreport that strictly lowers some agent's distance to the winner
/// by more than `tolerance`, or nullopt. A verifier for statistic mechanisms,
/// a falsifier otherwise.
std::optional<Manipulation> audit_strategyproofness(const Mechanism& mechanism,
                                                    const Instance& instance,
                                                    double tolerance = 1e-9);

// Bound table.

struct TableConfig {
  std::size_t k_max = 6;
  std::size_t lambda_max = 4;
  std::size_t trials = 20000;
  std::uint64_t seed = 0;
  std::size_t refine_steps = 500;
  unsigned threads = 0;
};

struct TableRow {
  std::string mechanism;
  Objective objective = Objective::Sum;
  std::size_t k = 0;
  std::size_t lambda = 0;
  double empirical_distortion = 1.0;
  double paper_bound = 1.0;
  std::string lb_family;
  double lb_distortion = 1.0;
  bool pass = false;
};

/// Allowed excess of any searched distortion over its bound.
inline constexpr double kUpperBoundTolerance = 1e-6;

/// How far below the bound a row's lower-bound family may stop.
double lower_bound_slack(double bound);

/// The seven mechanism/objective rows with their tight bounds. A row passes
/// when search never beats the bound and the matching family comes within
/// lower_bound_slack of it. With trials == 0 only the families are searched.
std::vector<TableRow> reproduce_table(const TableConfig& config);

}  // namespace distloc
