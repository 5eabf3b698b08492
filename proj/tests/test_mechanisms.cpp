#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "distloc/mechanisms.hpp"
#include "oracles.hpp"

using namespace distloc;

namespace {

const Mechanism& by_name(const std::string& name) {
  for (const Mechanism& m : catalog()) {
    if (m.name == name) return m;
  }
  throw std::out_of_range(name);
}

std::size_t fixed_rank(const Rank& r) { return r.resolve(1000000); }

}  // namespace

TEST_CASE("ranks resolve against the list size") {
  CHECK(Rank::fixed(2).resolve(5) == 2);
  CHECK(Rank::leftmost_median().resolve(4) == 2);
  CHECK(Rank::leftmost_median().resolve(5) == 3);
  CHECK(Rank::last().resolve(7) == 7);
  CHECK(Rank::ceil_fraction(0.5).resolve(3) == 2);
  CHECK(Rank::ceil_fraction(0.01).resolve(3) == 1);
  CHECK_THROWS_AS(Rank::fixed(4).resolve(3), MechanismError);
  CHECK_THROWS_AS(Rank::fixed(0).resolve(3), MechanismError);
}

TEST_CASE("district rules on small districts") {
  const std::vector<double> d = {4, 0, 2, 100};
  CHECK(district_representative(QStatistic{Rank::fixed(1)}, d) == 0.0);
  CHECK(district_representative(QStatistic{Rank::fixed(3)}, d) == 4.0);
  CHECK(district_representative(QStatistic{Rank::last()}, d) == 100.0);
  CHECK(district_representative(TruncatedAverage{}, d) == 3.0);
  CHECK(district_representative(Midpoint{}, d) == 50.0);
  CHECK(district_representative(Average{}, d) == 26.5);

  const std::vector<double> one = {-3.25};
  CHECK(district_representative(TruncatedAverage{}, one) == -3.25);
  CHECK(district_representative(Midpoint{}, one) == -3.25);

  const std::vector<double> empty;
  CHECK_THROWS_AS(district_representative(Average{}, empty), MechanismError);
  CHECK_THROWS_AS(district_representative(QStatistic{Rank::fixed(5)}, d), MechanismError);
}

TEST_CASE("truncated average trims a quarter of the weight from each end") {
  auto engine = make_engine({31});
  for (std::size_t lambda = 1; lambda <= 9; ++lambda) {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> d;
      for (std::size_t i = 0; i < lambda; ++i) d.push_back(uniform_real(engine, -5, 5));
      CHECK(district_representative(TruncatedAverage{}, d) ==
            doctest::Approx(oracle::quarter_trimmed_mean(d)).epsilon(1e-12));
    }
  }
  // lambda = 3: weights 1/4, 1, 1/4 over the sorted values.
  const std::vector<double> three = {0, 0, 12};
  CHECK(district_representative(TruncatedAverage{}, three) == doctest::Approx(2.0));
}

TEST_CASE("aggregation rules") {
  const std::vector<double> reps = {5, 1, 3, 2};
  CHECK(aggregate(PStatistic{Rank::fixed(1)}, reps) == 1.0);
  CHECK(aggregate(PStatistic{Rank::last()}, reps) == 5.0);
  CHECK(aggregate(LeftmostMedian{}, reps) == 2.0);
  const std::vector<double> empty;
  CHECK_THROWS_AS(aggregate(LeftmostMedian{}, empty), MechanismError);
  CHECK_THROWS_AS(aggregate(PStatistic{Rank::fixed(9)}, reps), MechanismError);
}

TEST_CASE("run on the known constructions") {
  const Instance tight = build_family({"sc-tight", {{"a", 1}}});
  const MechanismRun mota = run(by_name("median_of_truncated_avg"), tight);
  CHECK(mota.representatives == std::vector<double>{0, 1});
  CHECK(mota.winner == 0.0);

  const Instance i1 = build_family({"som-I1", {}});
  const MechanismRun momid = run(by_name("median_of_midpoints"), i1);
  CHECK(momid.representatives == std::vector<double>{0.5, 0.5});
  CHECK(momid.winner == 0.5);

  const Instance same = Instance::from_districts({{7, 7, 7}, {7, 7, 7}});
  for (const Mechanism& m : catalog()) CHECK(winner(m, same) == 7.0);
}

TEST_CASE("run on reports keeps the instance's districts") {
  const Instance inst = Instance::from_districts({{0, 1}, {2, 3}});
  const std::vector<double> reports = {0, 1, 2, -10};
  const MechanismRun r = run(by_name("leftmost_of_leftmost"), inst, reports);
  CHECK(r.representatives == std::vector<double>{0, -10});
  CHECK(r.winner == -10.0);
  const std::vector<double> short_reports = {0, 1};
  CHECK_THROWS(run(by_name("leftmost_of_leftmost"), inst, short_reports));
}

TEST_CASE("catalog ranks match integer arithmetic") {
  for (std::size_t k = 1; k <= 12; ++k) {
    for (std::size_t lambda = 1; lambda <= 12; ++lambda) {
      const auto resolved = catalog(k, lambda);
      REQUIRE(resolved.size() == catalog().size());
      for (const Mechanism& m : resolved) {
        if (m.name == "lor_sqrt2") {
          CHECK(fixed_rank(std::get<QStatistic>(m.district_rule).q) == lambda);
          CHECK(fixed_rank(std::get<PStatistic>(m.aggregation_rule).p) ==
                oracle::ceil_one_minus_inv_sqrt2(k));
        } else if (m.name == "rol_sqrt2") {
          CHECK(fixed_rank(std::get<QStatistic>(m.district_rule).q) ==
                oracle::ceil_one_minus_inv_sqrt2(lambda));
          CHECK(fixed_rank(std::get<PStatistic>(m.aggregation_rule).p) == k);
        } else if (m.name == "median_of_medians") {
          CHECK(fixed_rank(std::get<QStatistic>(m.district_rule).q) == (lambda + 1) / 2);
          CHECK(fixed_rank(std::get<PStatistic>(m.aggregation_rule).p) == (k + 1) / 2);
        }
      }
    }
  }
  CHECK(oracle::ceil_one_minus_inv_sqrt2(2) == 1);
  CHECK(oracle::ceil_one_minus_inv_sqrt2(4) == 2);
  CHECK(oracle::ceil_one_minus_inv_sqrt2(7) == 3);
}

TEST_CASE("statistic mechanisms are recognized") {
  CHECK(by_name("leftmost_of_leftmost").is_statistic());
  CHECK(by_name("median_of_medians").is_statistic());
  CHECK(by_name("lor_sqrt2").is_statistic());
  CHECK_FALSE(by_name("median_of_truncated_avg").is_statistic());
  CHECK_FALSE(by_name("arbitrary_of_avg").is_statistic());
  CHECK_FALSE(by_name("median_of_midpoints").is_statistic());
  CHECK(statistic_mechanism(2, 3).is_statistic());
}

TEST_CASE("winner is always one of the representatives") {
  auto engine = make_engine({5});
  for (int trial = 0; trial < 300; ++trial) {
    const Instance inst = oracle::random_instance(engine, 6, 5);
    for (const Mechanism& m : catalog()) {
      const MechanismRun r = run(m, inst);
      CHECK(std::find(r.representatives.begin(), r.representatives.end(), r.winner) !=
            r.representatives.end());
      CHECK(r.winner == winner(m, inst));
    }
  }
}

TEST_CASE("unanimity, translation and anonymity") {
  auto engine = make_engine({6});
  for (int trial = 0; trial < 300; ++trial) {
    const Instance inst = oracle::random_instance(engine, 6, 5);
    const double x = uniform_real(engine, -100, 100);
    std::vector<std::vector<double>> flat(inst.k(), std::vector<double>(inst.lambda(), x));
    const Instance unanimous = Instance::from_districts(flat);

    const double shift = uniform_real(engine, -10, 10);
    const double scale = uniform_real(engine, 0.1, 10);
    const Instance moved = inst.transformed(scale, shift);

    auto grouped = inst.grouped_positions();
    for (auto& g : grouped) std::reverse(g.begin(), g.end());
    std::reverse(grouped.begin(), grouped.end());
    const Instance shuffled = Instance::from_districts(grouped);

    for (const Mechanism& m : catalog()) {
      CHECK(winner(m, unanimous) == x);
      const double w = winner(m, inst);
      CHECK(winner(m, moved) == doctest::Approx(scale * w + shift).epsilon(1e-12).scale(10));
      CHECK(winner(m, shuffled) == doctest::Approx(w).epsilon(1e-15));
    }
  }
}

TEST_CASE("representatives depend only on their own district") {
  auto engine = make_engine({12});
  for (int trial = 0; trial < 200; ++trial) {
    const Instance inst = oracle::random_instance(engine, 5, 4);
    if (inst.k() < 2) continue;
    const std::size_t agent = uniform_index(engine, inst.lambda());  // district 0
    const Instance changed = inst.with_position(agent, uniform_real(engine, -3, 3));
    for (const Mechanism& m : catalog()) {
      const auto before = run(m, inst).representatives;
      const auto after = run(m, changed).representatives;
      for (std::size_t d = 1; d < inst.k(); ++d) CHECK(before[d] == after[d]);
    }
  }
}

TEST_CASE("mechanism specs") {
  CHECK(parse_mechanism_spec("median-of-medians").name == "median_of_medians");
  CHECK(parse_mechanism_spec("lor_sqrt2").name == "lor_sqrt2");
  const Mechanism m = parse_mechanism_spec("qstat-of-pstat:p=2,q=3");
  CHECK(m.is_statistic());
  CHECK(m == statistic_mechanism(2, 3));
  CHECK_THROWS_AS(parse_mechanism_spec("nope"), MechanismError);
  CHECK_THROWS_AS(parse_mechanism_spec("qstat-of-pstat:p=2"), MechanismError);
  CHECK_THROWS_AS(parse_mechanism_spec("qstat-of-pstat:p=0,q=1"), MechanismError);
  CHECK_THROWS_AS(parse_mechanism_spec("qstat-of-pstat:p=x,q=1"), MechanismError);
  const auto vocab = mechanism_vocabulary();
  CHECK(std::find(vocab.begin(), vocab.end(), "median-of-truncated-avg") != vocab.end());
}
