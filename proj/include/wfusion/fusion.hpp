#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wfusion/cavity.hpp"
#include "wfusion/wstate.hpp"

// End-to-end fusion protocols: branch enumeration, outcome classification,
// closed-form success probabilities and per-branch residual quality.

namespace wfusion {

enum class Protocol { two_fusion, three_fusion };

// Success          -> the target W state was produced
// ByproductSuccess -> a smaller W was produced (two-fusion gg->e branch)
// Recyclable       -> a product of smaller W states, re-fusable
// HardFailure      -> nothing usable remains
enum class OutcomeClass { success, byproduct_success, recyclable, hard_failure };

std::string_view to_string(Protocol p);
std::string_view to_string(OutcomeClass c);

// Total, deterministic classification of a measurement record.
// Two-fusion outcomes: "ge", "eg", "ee", "gg->e", "gg->g".
// Three-fusion outcomes: the eight three-letter g/e strings.
OutcomeClass classify_outcome(Protocol protocol, std::string_view outcome);

struct Branch {
  std::string outcome;
  double probability = 0.0;
  OutcomeClass classification = OutcomeClass::hard_failure;
  std::vector<int> residual_sizes;  // usable W sizes left behind (may contain 1)
  // Fidelity to the standard W after phase correction; set for Success and
  // ByproductSuccess branches only.
  std::optional<double> post_correction_fidelity;
  CompactFusionState residual;  // normalized, pre-correction
};

struct BranchReport {
  Protocol protocol = Protocol::two_fusion;
  std::vector<int> inputs;
  double lambda_t = 0.0;
  std::vector<Branch> branches;

  double total_probability() const;
  double success_probability() const;  // Success class only
  const Branch* find(std::string_view outcome) const;
};

// Fuse W_N and W_M with one ancilla atom: detect atoms 1 and 2, and atom 3
// as well when 1 and 2 are both ground. Branches with zero probability are
// omitted (all five are present at the magic interaction angle).
BranchReport fuse_two(int n, int m, double lambda_t);
BranchReport fuse_two(int n, int m);

// Fuse W_N, W_M and W_T: detect all three extracted atoms.
BranchReport fuse_three(int n, int m, int t, double lambda_t);
BranchReport fuse_three(int n, int m, int t);

// 2(N+M-1)/(3NM)
double success_probability_two(int n, int m);

// (N+M+T-3)/(NMT)
double success_probability_three(int n, int m, int t);

}  // namespace wfusion
