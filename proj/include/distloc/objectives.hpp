#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "distloc/instance.hpp"

namespace distloc {

enum class Objective { Sum, Max, SumOfMax, MaxOfSum };

/// Kebab-case names: sum, max, sum-of-max, max-of-sum.
std::string_view to_string(Objective objective);
std::optional<Objective> parse_objective(std::string_view name);
const std::vector<Objective>& all_objectives();

struct Optimum {
  double location = 0.0;
  double cost = 0.0;
};

/// |x_agent - z|. Throws std::out_of_range for a bad agent index.
double individual_cost(const Instance& instance, std::size_t agent, double z);

/// Social cost of placing the facility at z.
double cost(Objective objective, const Instance& instance, double z);

/// Exact global minimizer of cost(objective, instance, .).
///
/// Sum and Sum-of-Max return the leftmost point of the optimal interval
/// (leftmost median agent, leftmost median district midpoint). Max returns
/// the midpoint of the extreme agents. Max-of-Sum is located by walking the
/// upper envelope of the per-district cost lines, so the result is exact up
/// to rounding rather than a search tolerance.
Optimum optimal_location(Objective objective, const Instance& instance);

}  // namespace distloc
