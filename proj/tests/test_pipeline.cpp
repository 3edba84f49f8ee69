#include <doctest.h>

#include <cmath>

#include "wfusion/pipeline.hpp"
#include "wfusion/stats.hpp"

using wfusion::Primitive;
using wfusion::StrategyConfig;
using wfusion::YieldStats;

namespace {

StrategyConfig strategy(Primitive p, int target, bool recycle,
                        std::optional<long> rounds = std::nullopt) {
  StrategyConfig cfg;
  cfg.primitive = p;
  cfg.target_size = target;
  cfg.recycle = recycle;
  cfg.max_rounds = rounds;
  return cfg;
}

}  // namespace

TEST_CASE("a Bell pair already is the size-2 target") {
  CHECK(wfusion::expected_cost(strategy(Primitive::two_fusion, 2, false)) == 1.0);
  CHECK(wfusion::expected_cost(strategy(Primitive::three_fusion, 2, true)) == 1.0);
}

TEST_CASE("expected cost of the smallest two-fusion pipeline") {
  // p = 1/2 per attempt, two pairs per attempt, independent retries
  CHECK(wfusion::expected_cost(strategy(Primitive::two_fusion, 3, false)) ==
        doctest::Approx(4.0).epsilon(1e-13));
  // with recycling the gg->e branch refunds one pair at probability 1/6:
  //   E = 2 + E2/6 + E/3,  E2 = 1 + E2/6 + E/3  =>  E = 11/3
  CHECK(wfusion::expected_cost(strategy(Primitive::two_fusion, 3, true)) ==
        doctest::Approx(11.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("expected cost of the smallest three-fusion pipeline") {
  // success 3/8; the all-ground branch refunds only worthless singles
  CHECK(wfusion::expected_cost(strategy(Primitive::three_fusion, 3, false)) ==
        doctest::Approx(8.0).epsilon(1e-13));
  CHECK(wfusion::expected_cost(strategy(Primitive::three_fusion, 3, true)) ==
        doctest::Approx(8.0).epsilon(1e-13));
}

TEST_CASE("recycling never raises the expected cost") {
  for (Primitive p : {Primitive::two_fusion, Primitive::three_fusion})
    for (int target = 3; target <= 8; ++target) {
      const double plain = wfusion::expected_cost(strategy(p, target, false));
      const double recycled = wfusion::expected_cost(strategy(p, target, true));
      CHECK(recycled <= plain + 1e-12);
    }
}

TEST_CASE("strategy validation") {
  CHECK_THROWS_AS(wfusion::expected_cost(strategy(Primitive::two_fusion, 1, false)),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      wfusion::expected_cost(strategy(Primitive::two_fusion, 3, false, 0L)),
      std::invalid_argument);
  CHECK_THROWS_AS(wfusion::simulate_pipeline(
                      strategy(Primitive::two_fusion, 3, false), 0, 1),
                  std::invalid_argument);
}

TEST_CASE("bounded rounds: renewal cost and unreachable targets") {
  // one round: 2 pairs spent, success 1/2 -> 4 per produced state
  CHECK(wfusion::expected_cost(strategy(Primitive::two_fusion, 3, false, 1L)) ==
        doctest::Approx(4.0).epsilon(1e-13));
  // target 4 needs two rounds: E = 2 + 1/2 + 1 = 3.5, P = (1/2)(4/9)
  CHECK(wfusion::expected_cost(strategy(Primitive::two_fusion, 4, false, 2L)) ==
        doctest::Approx(15.75).epsilon(1e-13));
  CHECK_THROWS_AS(
      wfusion::expected_cost(strategy(Primitive::two_fusion, 4, false, 1L)),
      std::invalid_argument);
}

TEST_CASE("single-trial histogram has exactly one entry") {
  const YieldStats ys =
      wfusion::simulate_pipeline(strategy(Primitive::two_fusion, 3, false), 1, 42);
  CHECK(ys.outcome_histogram.size() == 1);
  CHECK(ys.trials == 1);
}

TEST_CASE("identical seeds give identical statistics") {
  const auto cfg = strategy(Primitive::two_fusion, 4, true);
  const YieldStats a = wfusion::simulate_pipeline(cfg, 5000, 99);
  const YieldStats b = wfusion::simulate_pipeline(cfg, 5000, 99);
  CHECK(a.expected_bell_pairs == b.expected_bell_pairs);
  CHECK(a.bell_pairs_stderr == b.bell_pairs_stderr);
  CHECK(a.ancilla_atoms == b.ancilla_atoms);
  CHECK(a.outcome_histogram == b.outcome_histogram);
  CHECK(a.targets_produced == b.targets_produced);
  CHECK(a.rng_algorithm == wfusion::kRngAlgorithm);
}

TEST_CASE("Monte Carlo mean agrees with the exact recursion") {
  const auto cfg = strategy(Primitive::two_fusion, 3, false);
  const YieldStats ys = wfusion::simulate_pipeline(cfg, 100000, 7);
  CHECK(ys.targets_produced == ys.trials);
  CHECK(std::abs(ys.expected_bell_pairs - 4.0) < 3.0 * ys.bell_pairs_stderr);
  // one ancilla per attempt, two attempts expected
  CHECK(std::abs(ys.ancilla_atoms - 2.0) < 0.05);

  const auto recycled = strategy(Primitive::two_fusion, 3, true);
  const YieldStats yr = wfusion::simulate_pipeline(recycled, 100000, 11);
  CHECK(std::abs(yr.expected_bell_pairs - 11.0 / 3.0) < 3.0 * yr.bell_pairs_stderr);

  const auto three = strategy(Primitive::three_fusion, 3, false);
  const YieldStats yt = wfusion::simulate_pipeline(three, 50000, 5);
  CHECK(yt.ancilla_atoms == 0.0);
  CHECK(std::abs(yt.expected_bell_pairs - 8.0) < 3.0 * yt.bell_pairs_stderr);
}

TEST_CASE("sampled branch classes pass a chi-square test") {
  const auto cfg = strategy(Primitive::two_fusion, 3, false);
  const YieldStats ys = wfusion::simulate_pipeline(cfg, 100000, 2024);

  const std::vector<std::string> classes{"Success", "ByproductSuccess",
                                         "Recyclable", "HardFailure"};
  const std::vector<double> probs{0.5, 1.0 / 6.0, 0.25, 1.0 / 12.0};
  std::vector<long> observed;
  for (const auto& c : classes) {
    auto it = ys.outcome_histogram.find(c);
    observed.push_back(it == ys.outcome_histogram.end() ? 0 : it->second);
  }
  long total = 0;
  for (long c : observed) total += c;
  CHECK(total == ys.trials);

  const double chi2 = wfusion::stats::chi_square_statistic(observed, probs);
  CHECK(wfusion::stats::chi_square_pvalue(chi2, 3) > 0.001);
}

TEST_CASE("bounded-round simulation tracks the bounded recursion") {
  const auto cfg = strategy(Primitive::two_fusion, 4, false, 2L);
  const YieldStats ys = wfusion::simulate_pipeline(cfg, 200000, 31);
  CHECK(ys.targets_produced < ys.trials);
  CHECK(std::abs(ys.expected_bell_pairs - 15.75) < 0.75);
}

TEST_CASE("upper-tail gamma matches reference values") {
  using wfusion::stats::gamma_q;
  // chi-square survival values: Q(dof/2, x/2)
  CHECK(gamma_q(0.5, 3.841 / 2) ==
        doctest::Approx(0.0500136837639568).epsilon(1e-12));
  CHECK(gamma_q(1.5, 7.0 / 2) ==
        doctest::Approx(0.0718977724964651).epsilon(1e-12));
  CHECK(gamma_q(2.0, 0.5) == doctest::Approx(0.90979598956895).epsilon(1e-12));
  CHECK(gamma_q(3.5, 14.067 / 2) ==
        doctest::Approx(0.0500024446807977).epsilon(1e-12));
  CHECK(gamma_q(1.5, 0.35 / 2) ==
        doctest::Approx(0.950366117368476).epsilon(1e-12));
  CHECK(gamma_q(1.0, 0.0) == 1.0);
  CHECK_THROWS_AS(gamma_q(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(wfusion::stats::chi_square_pvalue(-1.0, 3),
                  std::invalid_argument);
}

TEST_CASE("feasibility margins at the reference operating point") {
  const double g = 2.0 * 3.14159265358979323846 * 24e3;
  const auto r = wfusion::feasibility_report(g, 10.0 * g, 3e-2, 3e-2);
  CHECK(r.interaction_time == doctest::Approx(1.0 / 21600.0).epsilon(1e-12));
  CHECK(r.time_margin_atomic == doctest::Approx(648.0).epsilon(1e-12));
  CHECK(r.time_margin_cavity == doctest::Approx(648.0).epsilon(1e-12));

  // halving the interaction time by doubling g at fixed delta/g
  const auto r2 = wfusion::feasibility_report(2 * g, 20.0 * g, 3e-2, 3e-2);
  CHECK(r2.interaction_time ==
        doctest::Approx(r.interaction_time / 2.0).epsilon(1e-12));

  CHECK_THROWS_AS(wfusion::feasibility_report(0.0, 1.0, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(wfusion::feasibility_report(1.0, 1.0, -1.0, 1.0),
                  std::invalid_argument);
}
