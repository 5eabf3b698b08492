#include "distloc/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace distloc {

std::string_view to_string(Objective objective) {
  switch (objective) {
    case Objective::Sum: return "sum";
    case Objective::Max: return "max";
    case Objective::SumOfMax: return "sum-of-max";
    case Objective::MaxOfSum: return "max-of-sum";
  }
  return "unknown";
}

std::optional<Objective> parse_objective(std::string_view name) {
  std::string normalized(name);
  std::replace(normalized.begin(), normalized.end(), '_', '-');
  for (Objective o : all_objectives()) {
    if (normalized == to_string(o)) return o;
  }
  return std::nullopt;
}

const std::vector<Objective>& all_objectives() {
  static const std::vector<Objective> all = {
      Objective::Sum, Objective::Max, Objective::SumOfMax, Objective::MaxOfSum};
  return all;
}

double individual_cost(const Instance& instance, std::size_t agent, double z) {
  return std::abs(instance.position(agent) - z);
}

double cost(Objective objective, const Instance& instance, double z) {
  const auto x = instance.positions();
  switch (objective) {
    case Objective::Sum: {
      double total = 0.0;
      for (double xi : x) total += std::abs(xi - z);
      return total;
    }
    case Objective::Max: {
      double worst = 0.0;
      for (double xi : x) worst = std::max(worst, std::abs(xi - z));
      return worst;
    }
    case Objective::SumOfMax: {
      double total = 0.0;
      for (const District& d : instance.districts()) {
        double worst = 0.0;
        for (std::size_t i : d) worst = std::max(worst, std::abs(x[i] - z));
        total += worst;
      }
      return total;
    }
    case Objective::MaxOfSum: {
      double worst = 0.0;
      for (const District& d : instance.districts()) {
        double total = 0.0;
        for (std::size_t i : d) total += std::abs(x[i] - z);
        worst = std::max(worst, total);
      }
      return worst;
    }
  }
  throw std::logic_error("unhandled objective");
}

namespace {

double leftmost_median(std::vector<double> values) {
  const std::size_t rank = (values.size() + 1) / 2 - 1;
  std::nth_element(values.begin(), values.begin() + rank, values.end());
  return values[rank];
}

// Inside the open interval (lo, hi) between two consecutive agent positions,
// every district's total distance is a line. Walks the upper envelope of
// those lines rightwards from lo and returns the leftmost point of [lo, hi]
// where it stops decreasing.
double envelope_minimum(const Instance& instance, double lo, double hi) {
  const auto x = instance.positions();
  const std::size_t k = instance.k();
  std::vector<double> slope(k, 0.0);
  std::vector<double> intercept(k, 0.0);
  for (std::size_t d = 0; d < k; ++d) {
    for (std::size_t i : instance.districts()[d]) {
      if (x[i] <= lo) {
        slope[d] += 1.0;
        intercept[d] -= x[i];
      } else {
        slope[d] -= 1.0;
        intercept[d] += x[i];
      }
    }
  }

  double z = lo;
  for (std::size_t step = 0; step <= k + 1; ++step) {
    double top = -INFINITY;
    for (std::size_t d = 0; d < k; ++d) top = std::max(top, intercept[d] + slope[d] * z);
    const double tie = 1e-12 * (std::abs(top) + 1.0);
    std::size_t active = k;
    for (std::size_t d = 0; d < k; ++d) {
      if (intercept[d] + slope[d] * z >= top - tie &&
          (active == k || slope[d] > slope[active])) {
        active = d;
      }
    }
    if (slope[active] >= 0.0) return z;

    double next = hi;
    for (std::size_t d = 0; d < k; ++d) {
      if (slope[d] <= slope[active]) continue;
      const double crossing =
          (intercept[active] - intercept[d]) / (slope[d] - slope[active]);
      if (crossing > z && crossing < next) next = crossing;
    }
    if (next >= hi) return hi;
    z = next;
  }
  return z;
}

Optimum max_of_sum_optimum(const Instance& instance) {
  std::vector<double> breaks(instance.positions().begin(), instance.positions().end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto f = [&](double z) { return cost(Objective::MaxOfSum, instance, z); };

  // Convexity: the first breakpoint whose successor is no lower is a
  // minimizer among breakpoints.
  std::size_t lo = 0;
  std::size_t hi = breaks.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (f(breaks[mid]) <= f(breaks[mid + 1])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  const std::size_t j = lo;

  std::vector<double> candidates;
  if (j > 0) candidates.push_back(envelope_minimum(instance, breaks[j - 1], breaks[j]));
  candidates.push_back(breaks[j]);
  if (j + 1 < breaks.size()) {
    candidates.push_back(envelope_minimum(instance, breaks[j], breaks[j + 1]));
  }

  Optimum best{candidates.front(), f(candidates.front())};
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    const double value = f(candidates[c]);
    if (value < best.cost - 1e-12 * best.cost) best = {candidates[c], value};
  }
  return best;
}

}  // namespace

Optimum optimal_location(Objective objective, const Instance& instance) {
  const auto x = instance.positions();
  double location = 0.0;
  switch (objective) {
    case Objective::Sum:
      location = leftmost_median({x.begin(), x.end()});
      break;
    case Objective::Max: {
      const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
      location = *lo + (*hi - *lo) / 2.0;
      break;
    }
    case Objective::SumOfMax: {
      // Each district costs |z - m_d| + (r_d - l_d) / 2, so the total is
      // minimized at a median of the district midpoints.
      std::vector<double> midpoints;
      midpoints.reserve(instance.k());
      for (const District& d : instance.districts()) {
        double lo = x[d.front()];
        double hi = lo;
        for (std::size_t i : d) {
          lo = std::min(lo, x[i]);
          hi = std::max(hi, x[i]);
        }
        midpoints.push_back(lo + (hi - lo) / 2.0);
      }
      location = leftmost_median(std::move(midpoints));
      break;
    }
    case Objective::MaxOfSum:
      return max_of_sum_optimum(instance);
  }
  return {location, cost(objective, instance, location)};
}

}  // namespace distloc
