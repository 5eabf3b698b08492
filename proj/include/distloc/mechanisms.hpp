#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "distloc/instance.hpp"

namespace distloc {

/// Thrown when a rule's rank does not fit the list it is applied to, or a
/// mechanism spec cannot be parsed.
class MechanismError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A 1-based order-statistic rank that may depend on the size m of the list
/// it is applied to. "r-th leftmost" means r-th smallest.
class Rank {
 public:
  enum class Kind { Fixed, LeftmostMedian, Last, CeilFraction };

  static Rank fixed(std::size_t rank);
  /// floor((m + 1) / 2)
  static Rank leftmost_median();
  /// m
  static Rank last();
  /// ceil(fraction * m), never below 1
  static Rank ceil_fraction(double fraction);

  /// Throws MechanismError when the rank falls outside [1, m].
  std::size_t resolve(std::size_t m) const;

  Kind kind() const { return kind_; }
  std::string describe() const;

  friend bool operator==(const Rank&, const Rank&) = default;

 private:
  Rank(Kind kind, std::size_t fixed, double fraction)
      : kind_(kind), fixed_(fixed), fraction_(fraction) {}

  Kind kind_;
  std::size_t fixed_;
  double fraction_;
};

// District rules: positions of one district -> representative.

struct QStatistic {
  Rank q;
  friend bool operator==(const QStatistic&, const QStatistic&) = default;
};

/// Mean of the central half: exactly lambda/4 of the weight is trimmed from
/// each end of the sorted district, with a fractional weight on a boundary
/// agent when 4 does not divide lambda.
struct TruncatedAverage {
  friend bool operator==(const TruncatedAverage&, const TruncatedAverage&) = default;
};

struct Midpoint {
  friend bool operator==(const Midpoint&, const Midpoint&) = default;
};

struct Average {
  friend bool operator==(const Average&, const Average&) = default;
};

using DistrictRule = std::variant<QStatistic, TruncatedAverage, Midpoint, Average>;

// Aggregation rules: representatives -> winner.

struct PStatistic {
  Rank p;
  friend bool operator==(const PStatistic&, const PStatistic&) = default;
};

/// floor((k + 1) / 2)-th smallest representative.
struct LeftmostMedian {
  friend bool operator==(const LeftmostMedian&, const LeftmostMedian&) = default;
};

using AggregationRule = std::variant<PStatistic, LeftmostMedian>;

struct Mechanism {
  std::string name;
  DistrictRule district_rule;
  AggregationRule aggregation_rule;

  /// True for p-Statistic-of-q-Statistic mechanisms, whose outcome depends on
  /// reports only through their order.
  bool is_statistic() const;

  friend bool operator==(const Mechanism&, const Mechanism&) = default;
};

struct MechanismRun {
  std::vector<double> representatives;
  double winner = 0.0;
};

/// Throws MechanismError on an empty district or an out-of-range rank.
double district_representative(const DistrictRule& rule,
                               std::span<const double> district_positions);

/// Throws MechanismError on an empty list or an out-of-range rank.
double aggregate(const AggregationRule& rule,
                 std::span<const double> representatives);

/// Step 1 runs the district rule on each district's positions alone; step 2
/// aggregates the representatives into the winner.
MechanismRun run(const Mechanism& mechanism, const Instance& instance);

/// Runs on reported positions (one per agent, same indexing as the instance)
/// using the instance's districts. Used for misreport experiments.
MechanismRun run(const Mechanism& mechanism, const Instance& instance,
                 std::span<const double> reports);

/// The mechanism's winner only; same result as run(...).winner.
double winner(const Mechanism& mechanism, const Instance& instance);
double winner(const Mechanism& mechanism, const Instance& instance,
              std::span<const double> reports);

/// Size-generic catalog. Ranks resolve against (k, lambda) when run.
///
///   median_of_truncated_avg  TruncatedAverage   / LeftmostMedian
///   leftmost_of_leftmost     QStatistic(1)      / PStatistic(1)
///   median_of_midpoints      Midpoint           / LeftmostMedian
///   lor_sqrt2                QStatistic(lambda) / PStatistic(ceil((1-1/sqrt2)k))
///   arbitrary_of_avg         Average            / PStatistic(1)
///   rol_sqrt2                QStatistic(ceil((1-1/sqrt2)lambda)) / PStatistic(k)
///   median_of_medians        QStatistic(floor((lambda+1)/2))
///                            / PStatistic(floor((k+1)/2))
const std::vector<Mechanism>& catalog();

/// Catalog with every rank resolved to a fixed value for k districts of
/// lambda agents.
std::vector<Mechanism> catalog(std::size_t k, std::size_t lambda);

/// Fixes every size-dependent rank for the given shape.
Mechanism resolve(const Mechanism& mechanism, std::size_t k, std::size_t lambda);

/// p-Statistic-of-q-Statistic with fixed ranks.
Mechanism statistic_mechanism(std::size_t p, std::size_t q);

/// Parses `name[:param=value,...]`. Names are catalog names in either
/// snake_case or kebab-case, plus `qstat-of-pstat:p=..,q=..`.
Mechanism parse_mechanism_spec(std::string_view spec);

/// Kebab-case vocabulary accepted by parse_mechanism_spec.
std::vector<std::string> mechanism_vocabulary();

}  // namespace distloc
