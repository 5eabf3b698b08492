#include "distloc/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "distloc/random.hpp"

namespace distloc {

ValidationResult validate(std::span<const double> positions,
                          std::span<const District> districts,
                          std::size_t lambda) {
  auto fail = [](std::string msg) { return ValidationResult{false, std::move(msg)}; };

  if (lambda == 0) return fail("lambda must be positive");
  if (districts.empty()) return fail("instance has no districts");
  if (positions.size() != districts.size() * lambda) {
    std::ostringstream os;
    os << "agent count " << positions.size() << " != k * lambda = "
       << districts.size() << " * " << lambda;
    return fail(os.str());
  }
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (!std::isfinite(positions[i])) {
      return fail("agent " + std::to_string(i) + " has a non-finite position");
    }
  }

  std::vector<std::size_t> owner(positions.size(), districts.size());
  for (std::size_t d = 0; d < districts.size(); ++d) {
    if (districts[d].size() != lambda) {
      std::ostringstream os;
      os << "district " << d << " has " << districts[d].size()
         << " agents, expected lambda = " << lambda;
      return fail(os.str());
    }
    for (std::size_t agent : districts[d]) {
      if (agent >= positions.size()) {
        return fail("district " + std::to_string(d) + " names unknown agent " +
                    std::to_string(agent));
      }
      if (owner[agent] != districts.size()) {
        return fail("agent " + std::to_string(agent) +
                    " appears in more than one district");
      }
      owner[agent] = d;
    }
  }
  for (std::size_t i = 0; i < owner.size(); ++i) {
    if (owner[i] == districts.size()) {
      return fail("agent " + std::to_string(i) + " is not in any district");
    }
  }
  return {};
}

Instance::Instance(std::vector<double> positions, std::vector<District> districts,
                   std::size_t lambda)
    : positions_(std::move(positions)),
      districts_(std::move(districts)),
      lambda_(lambda) {
  if (auto result = validate(positions_, districts_, lambda_); !result) {
    throw InvalidInstance(result.message);
  }
}

Instance Instance::from_districts(
    const std::vector<std::vector<double>>& grouped) {
  if (grouped.empty()) throw InvalidInstance("instance has no districts");
  const std::size_t lambda = grouped.front().size();
  std::vector<double> positions;
  std::vector<District> districts;
  districts.reserve(grouped.size());
  for (const auto& group : grouped) {
    District d;
    for (double x : group) {
      d.push_back(positions.size());
      positions.push_back(x);
    }
    districts.push_back(std::move(d));
  }
  return Instance(std::move(positions), std::move(districts), lambda);
}

double Instance::position(std::size_t agent) const {
  if (agent >= positions_.size()) {
    throw std::out_of_range("agent index " + std::to_string(agent) +
                            " out of range");
  }
  return positions_[agent];
}

std::vector<double> Instance::district_positions(std::size_t d) const {
  std::vector<double> out;
  out.reserve(lambda_);
  for (std::size_t agent : districts_.at(d)) out.push_back(positions_[agent]);
  return out;
}

std::size_t Instance::district_of(std::size_t agent) const {
  for (std::size_t d = 0; d < districts_.size(); ++d) {
    if (std::find(districts_[d].begin(), districts_[d].end(), agent) !=
        districts_[d].end()) {
      return d;
    }
  }
  throw std::out_of_range("agent index " + std::to_string(agent) +
                          " out of range");
}

Instance Instance::with_position(std::size_t agent, double x) const {
  Instance copy = *this;
  if (agent >= copy.positions_.size()) {
    throw std::out_of_range("agent index " + std::to_string(agent) +
                            " out of range");
  }
  if (!std::isfinite(x)) {
    throw InvalidInstance("agent " + std::to_string(agent) +
                          " has a non-finite position");
  }
  copy.positions_[agent] = x;
  return copy;
}

Instance Instance::transformed(double scale, double shift) const {
  std::vector<double> moved(positions_.begin(), positions_.end());
  for (double& x : moved) x = scale * x + shift;
  return Instance(std::move(moved), districts_, lambda_);
}

std::vector<std::vector<double>> Instance::grouped_positions() const {
  std::vector<std::vector<double>> out;
  out.reserve(k());
  for (std::size_t d = 0; d < k(); ++d) out.push_back(district_positions(d));
  return out;
}

Instance generate_random(std::size_t k, std::size_t lambda,
                         const PositionLaw& law, std::uint64_t seed) {
  if (k == 0 || lambda == 0) {
    throw std::invalid_argument("k and lambda must be at least 1");
  }
  auto engine = make_engine({seed});
  std::vector<double> positions(k * lambda);

  if (const auto* uniform = std::get_if<UniformLaw>(&law)) {
    if (!(uniform->lo <= uniform->hi) || !std::isfinite(uniform->lo) ||
        !std::isfinite(uniform->hi)) {
      throw std::invalid_argument("uniform law needs finite lo <= hi");
    }
    for (double& x : positions) x = uniform_real(engine, uniform->lo, uniform->hi);
  } else {
    const auto& clustered = std::get<ClusteredLaw>(law);
    if (!(clustered.lo <= clustered.hi) || !std::isfinite(clustered.lo) ||
        !std::isfinite(clustered.hi)) {
      throw std::invalid_argument("clustered law needs finite lo <= hi");
    }
    if (clustered.clusters == 0) {
      throw std::invalid_argument("clustered law needs at least one cluster");
    }
    if (!(clustered.jitter >= 0.0) || !std::isfinite(clustered.jitter)) {
      throw std::invalid_argument("clustered law needs finite jitter >= 0");
    }
    std::vector<double> centres(clustered.clusters);
    for (double& c : centres) c = uniform_real(engine, clustered.lo, clustered.hi);
    for (double& x : positions) {
      x = centres[uniform_index(engine, centres.size())];
      if (clustered.jitter > 0.0) {
        x += uniform_real(engine, -clustered.jitter, clustered.jitter);
      }
    }
  }

  std::vector<District> districts(k);
  for (std::size_t d = 0; d < k; ++d) {
    for (std::size_t j = 0; j < lambda; ++j) districts[d].push_back(d * lambda + j);
  }
  return Instance(std::move(positions), std::move(districts), lambda);
}

namespace {

double param(const InstanceFamily& family, const std::string& key,
             std::optional<double> fallback = std::nullopt) {
  auto it = family.params.find(key);
  if (it == family.params.end()) {
    if (fallback) return *fallback;
    throw std::invalid_argument("family " + family.name +
                                " requires parameter '" + key + "'");
  }
  if (!std::isfinite(it->second)) {
    throw std::invalid_argument("parameter '" + key + "' must be finite");
  }
  return it->second;
}

std::size_t count_param(const InstanceFamily& family, const std::string& key,
                        std::optional<double> fallback = std::nullopt) {
  const double value = param(family, key, fallback);
  if (value < 1.0 || value != std::floor(value) || value > 1e6) {
    throw std::invalid_argument("parameter '" + key +
                                "' must be a positive integer");
  }
  return static_cast<std::size_t>(value);
}

void reject_unknown(const InstanceFamily& family,
                    std::initializer_list<const char*> known) {
  for (const auto& [key, value] : family.params) {
    if (std::none_of(known.begin(), known.end(),
                     [&](const char* k) { return key == k; })) {
      throw std::invalid_argument("family " + family.name +
                                  " has no parameter '" + key + "'");
    }
  }
}

std::vector<double> repeat(std::size_t count, double x) {
  return std::vector<double>(count, x);
}

std::vector<double> concat(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// Grows the minority group of a short two-group district in place so every
// district reaches the common size. Cost contributions then scale with the
// group sizes already in the construction.
void equalize_two_group_districts(std::vector<std::vector<double>>& grouped,
                                  const std::vector<double>& minority_at) {
  std::size_t target = 0;
  for (const auto& g : grouped) target = std::max(target, g.size());
  for (std::size_t d = 0; d < grouped.size(); ++d) {
    while (grouped[d].size() < target) grouped[d].push_back(minority_at[d]);
  }
}

}  // namespace

const std::vector<std::string>& family_names() {
  static const std::vector<std::string> names = {
      "max-lb", "som-I1", "som-I2", "som-I3", "mos-J", "sc-tight"};
  return names;
}

Instance build_family(const InstanceFamily& family) {
  const std::string& name = family.name;

  if (name == "max-lb") {
    reject_unknown(family, {"lambda"});
    const std::size_t lambda = count_param(family, "lambda", 1.0);
    return Instance::from_districts({repeat(lambda, -1.0), repeat(lambda, 1.0)});
  }
  if (name == "som-I1") {
    reject_unknown(family, {});
    return Instance::from_districts({{0.0, 1.0}, {0.5, 0.5}});
  }
  if (name == "som-I2" || name == "som-I3") {
    reject_unknown(family, {"alpha", "beta"});
    const std::size_t alpha = count_param(family, "alpha");
    const std::size_t beta = count_param(family, "beta");
    if (alpha >= beta) {
      throw std::invalid_argument(name + " requires alpha < beta");
    }
    std::vector<std::vector<double>> grouped(alpha, {0.5, 0.5});
    const std::vector<double> other =
        name == "som-I2" ? std::vector<double>{1.0, 1.0}
                         : std::vector<double>{0.0, 1.0};
    grouped.insert(grouped.end(), beta, other);
    return Instance::from_districts(grouped);
  }
  if (name == "mos-J") {
    reject_unknown(family, {"x"});
    const std::size_t x = count_param(family, "x");
    const auto majority = static_cast<std::size_t>(
        std::ceil((1.0 + std::numbers::sqrt2) * static_cast<double>(x)));
    std::vector<std::vector<double>> grouped = {
        concat(repeat(majority, 0.0), repeat(x, 1.0)),
        concat(repeat(x, 1.0), repeat(majority, 2.0))};
    equalize_two_group_districts(grouped, {1.0, 1.0});
    return Instance::from_districts(grouped);
  }
  if (name == "sc-tight") {
    reject_unknown(family, {"a"});
    const double a = param(family, "a");
    if (!(a > 0.0)) throw std::invalid_argument("sc-tight requires a > 0");
    return Instance::from_districts({{-a, -a, a, a}, {a, a, a, a}});
  }

  std::string known;
  for (const auto& n : family_names()) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown family '" + name + "' (known: " + known +
                              ")");
}

}  // namespace distloc
