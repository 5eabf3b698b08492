#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace distloc {

/// Thrown when an instance (or the data it is built from) breaks a partition
/// or finiteness invariant. The message names the violated invariant.
class InvalidInstance : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using District = std::vector<std::size_t>;

struct ValidationResult {
  bool ok = true;
  std::string message;

  explicit operator bool() const { return ok; }
};

/// Checks every instance invariant: districts partition the agents, each has
/// exactly `lambda` members, and all positions are finite.
ValidationResult validate(std::span<const double> positions,
                          std::span<const District> districts,
                          std::size_t lambda);

/// Agents on the real line split into k districts of lambda agents each.
///
/// Districts hold agent indices rather than positions so an agent keeps its
/// identity when its report changes (see with_position).
class Instance {
 public:
  /// Throws InvalidInstance if validate() fails.
  Instance(std::vector<double> positions, std::vector<District> districts,
           std::size_t lambda);

  /// Builds an instance from positions grouped by district. Agent indices
  /// are assigned district-major, in the order given.
  static Instance from_districts(
      const std::vector<std::vector<double>>& grouped);

  std::span<const double> positions() const { return positions_; }
  std::span<const District> districts() const { return districts_; }
  std::size_t lambda() const { return lambda_; }
  std::size_t k() const { return districts_.size(); }
  std::size_t n() const { return positions_.size(); }

  double position(std::size_t agent) const;

  /// Positions of one district's members, in district order.
  std::vector<double> district_positions(std::size_t d) const;

  /// District index of an agent.
  std::size_t district_of(std::size_t agent) const;

  /// Same instance with one agent's position replaced.
  Instance with_position(std::size_t agent, double x) const;

  /// Affine image x -> scale * x + shift of every position.
  Instance transformed(double scale, double shift) const;

  /// Positions grouped by district (the inverse of from_districts).
  std::vector<std::vector<double>> grouped_positions() const;

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  std::vector<double> positions_;
  std::vector<District> districts_;
  std::size_t lambda_;
};

// Random instances.

struct UniformLaw {
  double lo = 0.0;
  double hi = 1.0;
};

/// Each agent sits at one of `clusters` centres (drawn uniformly in
/// [lo, hi]) plus uniform jitter in [-jitter, jitter].
struct ClusteredLaw {
  std::size_t clusters = 2;
  double lo = 0.0;
  double hi = 1.0;
  double jitter = 0.0;
};

using PositionLaw = std::variant<UniformLaw, ClusteredLaw>;

/// Deterministic in (k, lambda, law, seed). Throws std::invalid_argument on
/// bad sizes or distribution bounds.
Instance generate_random(std::size_t k, std::size_t lambda,
                         const PositionLaw& law, std::uint64_t seed);

// Structured families from the lower-bound and tightness constructions.

struct InstanceFamily {
  std::string name;
  std::map<std::string, double> params;
};

/// Known family names: max-lb, som-I1, som-I2, som-I3, mos-J, sc-tight.
const std::vector<std::string>& family_names();

/// Throws std::invalid_argument for unknown names or out-of-domain params.
///
///   max-lb(lambda=1)      lambda agents at -1, lambda agents at +1
///   som-I1                {0, 1} and {1/2, 1/2}
///   som-I2(alpha, beta)   alpha districts {1/2, 1/2}, beta districts {1, 1}
///   som-I3(alpha, beta)   alpha districts {1/2, 1/2}, beta districts {0, 1}
///   mos-J(x)              {ceil((1+sqrt2)x) at 0, x at 1},
///                         {x at 1, ceil((1+sqrt2)x) at 2}
///   sc-tight(a)           {-a, -a, a, a} and {a, a, a, a}
Instance build_family(const InstanceFamily& family);

}  // namespace distloc
