#include "wfusion/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace wfusion {

std::string_view to_string(Primitive p) {
  return p == Primitive::two_fusion ? "two" : "three";
}

void StrategyConfig::validate() const {
  if (target_size < 2)
    throw std::invalid_argument("StrategyConfig: target_size must be >= 2");
  if (target_size > 64)
    throw std::invalid_argument("StrategyConfig: target_size above 64 not supported");
  if (max_rounds && *max_rounds < 1)
    throw std::invalid_argument("StrategyConfig: max_rounds must be >= 1");
  if (max_rounds && *max_rounds > 1000000)
    throw std::invalid_argument("StrategyConfig: max_rounds above 1e6 not supported");
}

namespace {

using Inventory = std::vector<int>;  // held W sizes, sorted descending

struct BranchChoice {
  OutcomeClass cls;
  double probability;
};

// Class-level outcome distribution of one fusion attempt, from the exact
// branch probabilities at the magic interaction angle.
std::vector<BranchChoice> class_distribution(Primitive primitive,
                                             std::span<const int> inputs) {
  std::vector<BranchChoice> dist;
  if (primitive == Primitive::two_fusion) {
    const double n = inputs[0], m = inputs[1];
    dist.push_back({OutcomeClass::success, 2.0 * (n + m - 1.0) / (3.0 * n * m)});
    dist.push_back({OutcomeClass::byproduct_success, (n + m - 2.0) / (3.0 * n * m)});
    dist.push_back({OutcomeClass::recyclable, (n - 1.0) * (m - 1.0) / (n * m)});
    dist.push_back({OutcomeClass::hard_failure, 1.0 / (3.0 * n * m)});
  } else {
    const double n = inputs[0], m = inputs[1], t = inputs[2];
    dist.push_back({OutcomeClass::success, (n + m + t - 3.0) / (n * m * t)});
    dist.push_back(
        {OutcomeClass::recyclable, (n - 1.0) * (m - 1.0) * (t - 1.0) / (n * m * t)});
    double rest = 1.0;
    for (const BranchChoice& b : dist) rest -= b.probability;
    dist.push_back({OutcomeClass::hard_failure, rest});
  }
  return dist;
}

struct FusionPlan {
  std::vector<int> inputs;  // sorted descending
  int purchases = 0;        // Bell pairs bought for this attempt
};

// Pick the inputs of the next fusion: maximize the fused size without
// exceeding the target, prefer held pieces over purchases, prefer larger
// pieces. Always feasible because an all-Bell-pair attempt fuses to 3.
FusionPlan plan_next(const Inventory& held, const StrategyConfig& cfg) {
  const int arity = cfg.primitive == Primitive::two_fusion ? 2 : 3;
  const int consumed = cfg.primitive == Primitive::two_fusion ? 1 : 3;

  FusionPlan best;
  int best_result = -1;
  auto consider = [&](std::vector<int> inputs, int purchases) {
    int sum = 0;
    for (int s : inputs) sum += s;
    const int result = sum - consumed;
    if (result > cfg.target_size) return;
    std::sort(inputs.begin(), inputs.end(), std::greater<>());
    if (result < best_result) return;
    if (result == best_result) {
      if (purchases > best.purchases) return;
      if (purchases == best.purchases && inputs <= best.inputs) return;
    }
    best_result = result;
    best = {std::move(inputs), purchases};
  };

  const int h = static_cast<int>(held.size());
  if (arity == 2) {
    for (int i = 0; i < h; ++i)
      for (int j = i + 1; j < h; ++j) consider({held[i], held[j]}, 0);
    for (int i = 0; i < h; ++i) consider({held[i], 2}, 1);
    consider({2, 2}, 2);
  } else {
    for (int i = 0; i < h; ++i)
      for (int j = i + 1; j < h; ++j)
        for (int l = j + 1; l < h; ++l) consider({held[i], held[j], held[l]}, 0);
    for (int i = 0; i < h; ++i)
      for (int j = i + 1; j < h; ++j) consider({held[i], held[j], 2}, 1);
    for (int i = 0; i < h; ++i) consider({held[i], 2, 2}, 2);
    consider({2, 2, 2}, 3);
  }
  return best;
}

// Inventory after one attempt; `produced_target` reports a finished run.
Inventory apply_outcome(const Inventory& held, const FusionPlan& plan,
                        OutcomeClass cls, const StrategyConfig& cfg,
                        bool* produced_target) {
  *produced_target = false;
  Inventory next = held;
  {  // remove the held pieces the plan consumed (purchases are not held)
    Inventory used = plan.inputs;
    for (int p = 0; p < plan.purchases; ++p)
      used.erase(std::find(used.begin(), used.end(), 2));
    for (int s : used) next.erase(std::find(next.begin(), next.end(), s));
  }

  int sum = 0;
  for (int s : plan.inputs) sum += s;
  const int fused = cfg.primitive == Primitive::two_fusion ? sum - 1 : sum - 3;

  switch (cls) {
    case OutcomeClass::success:
      if (fused == cfg.target_size)
        *produced_target = true;
      else
        next.push_back(fused);
      break;
    case OutcomeClass::byproduct_success:
      if (cfg.recycle && sum - 2 >= 2) next.push_back(sum - 2);
      break;
    case OutcomeClass::recyclable:
      if (cfg.recycle)
        for (int s : plan.inputs)
          if (s - 1 >= 2) next.push_back(s - 1);
      break;
    case OutcomeClass::hard_failure:
      break;
  }
  std::sort(next.begin(), next.end(), std::greater<>());
  return next;
}

struct StateSpace {
  std::vector<Inventory> states;
  std::map<Inventory, int> index;
  // per state: plan purchases and transitions (probability, next index or -1
  // for "target produced")
  std::vector<int> purchases;
  std::vector<std::vector<std::pair<double, int>>> edges;
};

StateSpace build_state_space(const StrategyConfig& cfg) {
  StateSpace sp;
  std::vector<int> pending;
  auto intern = [&](const Inventory& inv) {
    auto it = sp.index.find(inv);
    if (it != sp.index.end()) return it->second;
    const int id = static_cast<int>(sp.states.size());
    sp.states.push_back(inv);
    sp.index.emplace(inv, id);
    pending.push_back(id);
    if (sp.states.size() > 100000)
      throw std::invalid_argument("expected_cost: inventory state space exploded");
    return id;
  };

  intern(Inventory{});
  while (!pending.empty()) {
    const int id = pending.back();
    pending.pop_back();
    const Inventory held = sp.states[static_cast<std::size_t>(id)];
    const FusionPlan plan = plan_next(held, cfg);
    const auto dist = class_distribution(cfg.primitive, plan.inputs);

    sp.purchases.resize(sp.states.size(), 0);
    sp.edges.resize(sp.states.size());
    sp.purchases[static_cast<std::size_t>(id)] = plan.purchases;
    auto& out = sp.edges[static_cast<std::size_t>(id)];
    for (const BranchChoice& b : dist) {
      if (b.probability <= 0.0) continue;
      bool produced = false;
      const Inventory next = apply_outcome(held, plan, b.cls, cfg, &produced);
      out.emplace_back(b.probability, produced ? -1 : intern(next));
    }
  }
  sp.purchases.resize(sp.states.size(), 0);
  sp.edges.resize(sp.states.size());
  return sp;
}

// Every state must have a positive-probability path to the absorbing
// "target produced" event, or the expectation diverges.
void check_progress(const StateSpace& sp) {
  const std::size_t n = sp.states.size();
  std::vector<char> can_finish(n, 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t s = 0; s < n; ++s) {
      if (can_finish[s]) continue;
      for (const auto& [p, next] : sp.edges[s]) {
        if (next == -1 || can_finish[static_cast<std::size_t>(next)]) {
          can_finish[s] = 1;
          changed = true;
          break;
        }
      }
    }
  }
  for (std::size_t s = 0; s < n; ++s)
    if (!can_finish[s])
      throw std::invalid_argument(
          "expected_cost: strategy cannot reach the target from a reachable "
          "inventory state");
}

// Solve (I - P) x = c by Gaussian elimination with partial pivoting.
std::vector<double> solve_linear(const StateSpace& sp,
                                 const std::vector<double>& c) {
  const int n = static_cast<int>(sp.states.size());
  std::vector<double> a(static_cast<std::size_t>(n) * (n + 1), 0.0);
  auto at = [&](int i, int j) -> double& {
    return a[static_cast<std::size_t>(i) * (n + 1) + j];
  };
  for (int i = 0; i < n; ++i) {
    at(i, i) = 1.0;
    for (const auto& [p, next] : sp.edges[static_cast<std::size_t>(i)])
      if (next >= 0) at(i, next) -= p;
    at(i, n) = c[static_cast<std::size_t>(i)];
  }
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(at(r, col)) > std::abs(at(pivot, col))) pivot = r;
    if (std::abs(at(pivot, col)) < 1e-14)
      throw numerical_error("expected_cost: singular recursion system");
    if (pivot != col)
      for (int j = col; j <= n; ++j) std::swap(at(pivot, j), at(col, j));
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = at(r, col) / at(col, col);
      if (f == 0.0) continue;
      for (int j = col; j <= n; ++j) at(r, j) -= f * at(col, j);
    }
  }
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = at(i, n) / at(i, i);
  return x;
}

double expected_cost_bounded(const StateSpace& sp, long rounds) {
  const std::size_t n = sp.states.size();
  std::vector<double> cost(n, 0.0), succ(n, 0.0);
  for (long r = 0; r < rounds; ++r) {
    std::vector<double> cost_next(n), succ_next(n);
    for (std::size_t s = 0; s < n; ++s) {
      double ec = sp.purchases[s];
      double ps = 0.0;
      for (const auto& [p, next] : sp.edges[s]) {
        if (next == -1) {
          ps += p;
        } else {
          ec += p * cost[static_cast<std::size_t>(next)];
          ps += p * succ[static_cast<std::size_t>(next)];
        }
      }
      cost_next[s] = ec;
      succ_next[s] = ps;
    }
    cost.swap(cost_next);
    succ.swap(succ_next);
  }
  if (succ[0] <= 0.0)
    throw std::invalid_argument(
        "expected_cost: target unreachable within max_rounds");
  return cost[0] / succ[0];
}

}  // namespace

double expected_cost(const StrategyConfig& strategy) {
  strategy.validate();
  if (strategy.target_size == 2) return 1.0;  // a Bell pair already is W_2

  const StateSpace sp = build_state_space(strategy);
  check_progress(sp);
  if (strategy.max_rounds) return expected_cost_bounded(sp, *strategy.max_rounds);

  std::vector<double> c(sp.states.size());
  for (std::size_t s = 0; s < sp.states.size(); ++s)
    c[s] = static_cast<double>(sp.purchases[s]);
  return solve_linear(sp, c)[0];
}

YieldStats simulate_pipeline(const StrategyConfig& strategy, long trials,
                             std::uint64_t seed) {
  strategy.validate();
  if (trials < 1) throw std::invalid_argument("simulate_pipeline: trials < 1");

  std::mt19937_64 rng(seed);
  auto next_double = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };

  YieldStats ys;
  ys.trials = trials;
  ys.seed = seed;

  double sum_cost = 0.0, sum_cost_sq = 0.0;
  long total_attempts = 0;

  for (long trial = 0; trial < trials; ++trial) {
    double cost = 0.0;
    long attempts = 0;
    bool produced = false;
    std::string first_class;

    if (strategy.target_size == 2) {
      cost = 1.0;
      produced = true;
      first_class = "Success";
    } else {
      Inventory held;
      while (!produced) {
        if (strategy.max_rounds && attempts >= *strategy.max_rounds) break;
        if (attempts >= 100000000L)
          throw numerical_error("simulate_pipeline: run did not terminate");
        const FusionPlan plan = plan_next(held, strategy);
        cost += plan.purchases;
        ++attempts;

        const auto dist = class_distribution(strategy.primitive, plan.inputs);
        const double u = next_double();
        double cum = 0.0;
        OutcomeClass cls = dist.back().cls;
        for (const BranchChoice& b : dist) {
          cum += b.probability;
          if (u < cum) {
            cls = b.cls;
            break;
          }
        }
        if (first_class.empty()) first_class = to_string(cls);
        held = apply_outcome(held, plan, cls, strategy, &produced);
      }
    }

    sum_cost += cost;
    sum_cost_sq += cost * cost;
    total_attempts += attempts;
    if (produced) ++ys.targets_produced;
    ++ys.outcome_histogram[first_class];
  }

  if (ys.targets_produced == 0)
    throw numerical_error("simulate_pipeline: no target state was produced");

  const double nt = static_cast<double>(trials);
  const double mean = sum_cost / nt;
  const double var = std::max(0.0, (sum_cost_sq - nt * mean * mean) /
                                       std::max(1.0, nt - 1.0));
  const double produced_fraction =
      static_cast<double>(ys.targets_produced) / nt;

  ys.expected_bell_pairs = sum_cost / static_cast<double>(ys.targets_produced);
  ys.bell_pairs_stderr = std::sqrt(var / nt) / produced_fraction;
  ys.ancilla_atoms =
      strategy.primitive == Primitive::two_fusion
          ? static_cast<double>(total_attempts) /
                static_cast<double>(ys.targets_produced)
          : 0.0;
  return ys;
}

FeasibilityReport feasibility_report(double g, double delta,
                                     double atomic_decay, double cavity_decay) {
  if (!(g > 0.0) || !(delta > 0.0) || !(atomic_decay > 0.0) ||
      !(cavity_decay > 0.0))
    throw std::invalid_argument("feasibility_report: all inputs must be > 0");
  FeasibilityReport r;
  r.lambda = g * g / delta;
  r.interaction_time = cavity::magic_time() / r.lambda;
  r.atomic_decay_time = atomic_decay;
  r.cavity_decay_time = cavity_decay;
  r.time_margin_atomic = atomic_decay / r.interaction_time;
  r.time_margin_cavity = cavity_decay / r.interaction_time;
  return r;
}

}  // namespace wfusion
