#include "distloc/mechanisms.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

namespace distloc {

namespace {
constexpr double kOneMinusInvSqrt2 = 1.0 - 1.0 / std::numbers::sqrt2;
}

Rank Rank::fixed(std::size_t rank) { return Rank(Kind::Fixed, rank, 0.0); }
Rank Rank::leftmost_median() { return Rank(Kind::LeftmostMedian, 0, 0.0); }
Rank Rank::last() { return Rank(Kind::Last, 0, 0.0); }
Rank Rank::ceil_fraction(double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw MechanismError("rank fraction must lie in (0, 1]");
  }
  return Rank(Kind::CeilFraction, 0, fraction);
}

std::size_t Rank::resolve(std::size_t m) const {
  std::size_t r = 0;
  switch (kind_) {
    case Kind::Fixed: r = fixed_; break;
    case Kind::LeftmostMedian: r = (m + 1) / 2; break;
    case Kind::Last: r = m; break;
    case Kind::CeilFraction:
      r = static_cast<std::size_t>(std::ceil(fraction_ * static_cast<double>(m)));
      r = std::max<std::size_t>(r, 1);
      break;
  }
  if (r < 1 || r > m) {
    throw MechanismError("rank " + std::to_string(r) + " out of range [1, " +
                         std::to_string(m) + "]");
  }
  return r;
}

std::string Rank::describe() const {
  switch (kind_) {
    case Kind::Fixed: return std::to_string(fixed_);
    case Kind::LeftmostMedian: return "floor((m+1)/2)";
    case Kind::Last: return "m";
    case Kind::CeilFraction: return "ceil(" + std::to_string(fraction_) + "*m)";
  }
  return "?";
}

bool Mechanism::is_statistic() const {
  return std::holds_alternative<QStatistic>(district_rule);
}

namespace {

// Sorted copy; every rule works on the sorted district so the result does not
// depend on the order agents are listed in.
std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  return out;
}

double truncated_average(const std::vector<double>& sorted) {
  const double size = static_cast<double>(sorted.size());
  const double trim = size / 4.0;
  // Offsets from the minimum keep a unanimous district exactly unanimous.
  const double base = sorted.front();
  double weighted = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double lo = std::max(static_cast<double>(i), trim);
    const double hi = std::min(static_cast<double>(i + 1), size - trim);
    const double weight = std::max(0.0, hi - lo);
    weighted += weight * (sorted[i] - base);
    mass += weight;
  }
  return base + weighted / mass;
}

double mean(const std::vector<double>& sorted) {
  const double base = sorted.front();
  double total = 0.0;
  for (double x : sorted) total += x - base;
  return base + total / static_cast<double>(sorted.size());
}

}  // namespace

double district_representative(const DistrictRule& rule,
                               std::span<const double> district_positions) {
  if (district_positions.empty()) throw MechanismError("empty district");
  const std::vector<double> sorted = sorted_copy(district_positions);
  return std::visit(
      [&](const auto& r) -> double {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, QStatistic>) {
          return sorted[r.q.resolve(sorted.size()) - 1];
        } else if constexpr (std::is_same_v<R, TruncatedAverage>) {
          return truncated_average(sorted);
        } else if constexpr (std::is_same_v<R, Midpoint>) {
          return sorted.front() + (sorted.back() - sorted.front()) / 2.0;
        } else {
          return mean(sorted);
        }
      },
      rule);
}

double aggregate(const AggregationRule& rule, std::span<const double> representatives) {
  if (representatives.empty()) throw MechanismError("no representatives");
  const std::size_t m = representatives.size();
  const std::size_t rank = std::visit(
      [&](const auto& r) -> std::size_t {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, PStatistic>) {
          return r.p.resolve(m);
        } else {
          return (m + 1) / 2;
        }
      },
      rule);
  std::vector<double> values(representatives.begin(), representatives.end());
  std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
  return values[rank - 1];
}

MechanismRun run(const Mechanism& mechanism, const Instance& instance) {
  return run(mechanism, instance, instance.positions());
}

MechanismRun run(const Mechanism& mechanism, const Instance& instance,
                 std::span<const double> reports) {
  if (reports.size() != instance.n()) {
    throw MechanismError("expected one report per agent");
  }
  MechanismRun result;
  result.representatives.reserve(instance.k());
  std::vector<double> local;
  local.reserve(instance.lambda());
  const auto x = reports;
  for (const District& d : instance.districts()) {
    local.clear();
    for (std::size_t i : d) local.push_back(x[i]);
    result.representatives.push_back(
        district_representative(mechanism.district_rule, local));
  }
  result.winner = aggregate(mechanism.aggregation_rule, result.representatives);
  return result;
}

double winner(const Mechanism& mechanism, const Instance& instance) {
  return run(mechanism, instance).winner;
}

double winner(const Mechanism& mechanism, const Instance& instance,
              std::span<const double> reports) {
  return run(mechanism, instance, reports).winner;
}

const std::vector<Mechanism>& catalog() {
  static const std::vector<Mechanism> mechanisms = {
      {"median_of_truncated_avg", TruncatedAverage{}, LeftmostMedian{}},
      {"leftmost_of_leftmost", QStatistic{Rank::fixed(1)}, PStatistic{Rank::fixed(1)}},
      {"median_of_midpoints", Midpoint{}, LeftmostMedian{}},
      {"lor_sqrt2", QStatistic{Rank::last()},
       PStatistic{Rank::ceil_fraction(kOneMinusInvSqrt2)}},
      {"arbitrary_of_avg", Average{}, PStatistic{Rank::fixed(1)}},
      {"rol_sqrt2", QStatistic{Rank::ceil_fraction(kOneMinusInvSqrt2)},
       PStatistic{Rank::last()}},
      {"median_of_medians", QStatistic{Rank::leftmost_median()},
       PStatistic{Rank::leftmost_median()}},
  };
  return mechanisms;
}

Mechanism resolve(const Mechanism& mechanism, std::size_t k, std::size_t lambda) {
  Mechanism out = mechanism;
  if (auto* q = std::get_if<QStatistic>(&out.district_rule)) {
    q->q = Rank::fixed(q->q.resolve(lambda));
  }
  if (auto* p = std::get_if<PStatistic>(&out.aggregation_rule)) {
    p->p = Rank::fixed(p->p.resolve(k));
  }
  return out;
}

std::vector<Mechanism> catalog(std::size_t k, std::size_t lambda) {
  std::vector<Mechanism> out;
  for (const Mechanism& m : catalog()) out.push_back(resolve(m, k, lambda));
  return out;
}

Mechanism statistic_mechanism(std::size_t p, std::size_t q) {
  if (p == 0 || q == 0) throw MechanismError("p and q are 1-based ranks");
  return {"qstat_of_pstat:p=" + std::to_string(p) + ",q=" + std::to_string(q),
          QStatistic{Rank::fixed(q)}, PStatistic{Rank::fixed(p)}};
}

std::vector<std::string> mechanism_vocabulary() {
  std::vector<std::string> names;
  for (const Mechanism& m : catalog()) {
    std::string name = m.name;
    std::replace(name.begin(), name.end(), '_', '-');
    names.push_back(name);
  }
  names.push_back("qstat-of-pstat");
  return names;
}

Mechanism parse_mechanism_spec(std::string_view spec) {
  const std::size_t colon = spec.find(':');
  std::string name(spec.substr(0, colon));
  std::replace(name.begin(), name.end(), '-', '_');

  std::vector<std::pair<std::string, std::size_t>> params;
  if (colon != std::string_view::npos) {
    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
      const std::size_t comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const std::size_t eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw MechanismError("malformed mechanism parameter '" + std::string(item) + "'");
      }
      const std::string_view value = item.substr(eq + 1);
      std::size_t parsed = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw MechanismError("mechanism parameter '" + std::string(item) +
                             "' needs a non-negative integer value");
      }
      params.emplace_back(std::string(item.substr(0, eq)), parsed);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
  }

  if (name == "qstat_of_pstat") {
    std::size_t p = 0;
    std::size_t q = 0;
    for (const auto& [key, value] : params) {
      if (key == "p") {
        p = value;
      } else if (key == "q") {
        q = value;
      } else {
        throw MechanismError("qstat-of-pstat has no parameter '" + key + "'");
      }
    }
    if (p == 0 || q == 0) {
      throw MechanismError("qstat-of-pstat requires p>=1 and q>=1, e.g. qstat-of-pstat:p=2,q=1");
    }
    return statistic_mechanism(p, q);
  }

  for (const Mechanism& m : catalog()) {
    if (m.name == name) {
      if (!params.empty()) {
        throw MechanismError("mechanism '" + m.name + "' takes no parameters");
      }
      return m;
    }
  }

  std::string known;
  for (const auto& n : mechanism_vocabulary()) known += (known.empty() ? "" : ", ") + n;
  throw MechanismError("unknown mechanism '" + std::string(spec.substr(0, colon)) +
                       "' (known: " + known + ")");
}

}  // namespace distloc
