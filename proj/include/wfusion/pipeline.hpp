#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "wfusion/fusion.hpp"

// Iterative-fusion resource analysis. The accounting unit is one Bell pair
// (W_2), bought on demand at cost 1; ancilla ground-state atoms are counted
// separately. Interaction angle is always the magic time, where every
// success branch yields an exact standard W.
//
// Policy (fixed): keep an inventory of held W states. Each round, pick the
// fusion inputs that maximize the fused size without exceeding the target,
// preferring held pieces over purchased Bell pairs and larger pieces over
// smaller; buy Bell pairs only for input slots no held piece can legally
// fill. Success products stay in the inventory (or finish the run at the
// target size). With recycle on, Recyclable pieces and ByproductSuccess
// states also return to the inventory; with recycle off they are discarded.
// W_1 remnants are worthless and always dropped.

namespace wfusion {

enum class Primitive { two_fusion, three_fusion };

std::string_view to_string(Primitive p);

struct StrategyConfig {
  Primitive primitive = Primitive::two_fusion;
  bool recycle = false;
  std::optional<long> max_rounds;  // fusion attempts per run; nullopt = unbounded
  int target_size = 0;

  void validate() const;
};

// RNG contract: mt19937_64 seeded directly; uniform doubles are
// (next() >> 11) * 2^-53, so results are reproducible across platforms.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64/u53";

struct YieldStats {
  double expected_bell_pairs = 0.0;  // consumed per target state produced
  double bell_pairs_stderr = 0.0;    // standard error of the estimate
  double ancilla_atoms = 0.0;        // consumed per target state produced
  // Classification of each run's first fusion attempt ("Success" directly
  // for target 2, which needs no fusion). Frequencies sum to `trials`.
  std::map<std::string, long> outcome_histogram;
  long trials = 0;
  std::uint64_t seed = 0;
  std::string rng_algorithm{kRngAlgorithm};
  long targets_produced = 0;  // == trials unless max_rounds cuts runs short
};

// Exact expected Bell pairs consumed per produced target W, from the
// branch-probability recursion over inventory states (linear solve when
// unbounded, finite-horizon induction under max_rounds).
double expected_cost(const StrategyConfig& strategy);

YieldStats simulate_pipeline(const StrategyConfig& strategy, long trials,
                             std::uint64_t seed);

struct FeasibilityReport {
  double lambda = 0.0;             // rad/s
  double interaction_time = 0.0;   // seconds, (2*pi/9)/lambda
  double atomic_decay_time = 0.0;  // seconds
  double cavity_decay_time = 0.0;  // seconds
  double time_margin_atomic = 0.0; // decay time / interaction time
  double time_margin_cavity = 0.0;
};

FeasibilityReport feasibility_report(double g, double delta,
                                     double atomic_decay, double cavity_decay);

}  // namespace wfusion
