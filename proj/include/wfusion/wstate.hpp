#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wfusion/linalg.hpp"

// Compact state model for W-state fusion registers.
//
// A register is a set of spectator groups (the atoms of each input W state
// that stay outside the cavity) plus a list of extracted slots (the atoms
// sent through the cavity; the two-W protocol's third slot is the ancilla).
// Each spectator group is tracked only by its excitation class: 0 means all
// atoms ground, 1 means the symmetric one-excitation ket over the group,
// which is *unnormalized* (its norm is sqrt(group size)). A stored amplitude
// multiplies that unnormalized ket, so the squared norm of a term is
// |amplitude|^2 times the product of the sizes of its excited groups. This
// keeps protocol amplitudes in the same form as the closed-form expressions
// they come from.

namespace wfusion {

struct TermKey {
  std::uint8_t group_bits = 0;  // bit i: spectator group i holds one excitation
  std::uint8_t slot_bits = 0;   // bit j: extracted slot j excited

  auto operator<=>(const TermKey&) const = default;
};

class CompactFusionState {
 public:
  CompactFusionState() = default;
  // Validates: group sizes >= 0, no excitation on a size-0 group, <= 8
  // groups/slots, finite amplitudes.
  CompactFusionState(std::vector<int> group_sizes, std::vector<int> slot_labels,
                     std::map<TermKey, cxd> terms);

  const std::vector<int>& group_sizes() const { return group_sizes_; }
  const std::vector<int>& slot_labels() const { return slot_labels_; }
  const std::map<TermKey, cxd>& terms() const { return terms_; }

  int total_atoms() const;  // spectators + remaining slots
  bool same_layout(const CompactFusionState& other) const;

  // Product of the sizes of the groups excited in `key`.
  double multiplicity(TermKey key) const;

  double norm_sq() const;
  bool is_normalized(double tol = 1e-10) const;

  // Divides by the norm and fixes the global phase so the first nonzero
  // term (in key order) has a real positive amplitude.
  CompactFusionState normalized() const;

 private:
  std::vector<int> group_sizes_;
  std::vector<int> slot_labels_;
  std::map<TermKey, cxd> terms_;
};

// <a|b>, honoring group multiplicities. Layouts must match.
cxd overlap(const CompactFusionState& a, const CompactFusionState& b);

// |<reference|state>|^2 over the product of squared norms.
double fidelity(const CompactFusionState& state,
                const CompactFusionState& reference);

// max over terms of |a_t - b_t| after aligning b's global phase to a.
double distance_up_to_phase(const CompactFusionState& a,
                            const CompactFusionState& b);

// |W_n> as a single spectator group of size n (no extracted slots).
// W_1 = |e>, W_2 = (|ge> + |eg>)/sqrt(2).
CompactFusionState standard_w(int n);

// Standard W over all atoms of `shape`'s layout (groups and slots alike).
CompactFusionState standard_w_like(const CompactFusionState& shape);

// W_N x W_M x |g> with one atom of each W extracted into slots 1 and 2 and
// the ancilla as slot 3; spectator groups of sizes N-1 and M-1.
CompactFusionState initial_two_fusion_state(int n, int m);

// W_N x W_M x W_T with one atom extracted from each (slots 1..3);
// spectator groups of sizes N-1, M-1, T-1.
CompactFusionState initial_three_fusion_state(int n, int m, int t);

// Applies a unitary on the extracted slots (dim 2^slots); slot j is bit j.
CompactFusionState apply_extracted_propagator(const CompactFusionState& state,
                                              const SquareOperator& u);

struct MeasurementOutcome {
  std::vector<int> measured_atoms;  // slot labels, in measurement order
  std::string bitstring;            // 'g'/'e' per measured atom
  double probability = 0.0;
  CompactFusionState residual;      // normalized, measured slots removed
};

// Projective measurement of a subset of extracted slots. Returns one outcome
// per bitstring with nonzero probability, in binary order (g before e).
// Spectator groups cannot be measured directly.
std::vector<MeasurementOutcome> measure(const CompactFusionState& state,
                                        std::span<const int> atoms);

// Removes the relative phases between the components of a single-excitation
// (W-class) state, the compact equivalent of a uniform phase pulse on each
// spectator group plus one on each remaining extracted atom. After it, the
// state equals the standard W of its size exactly when all component
// magnitudes are equal (they are at lambda_t = 2*pi/9). Rejects states that
// are not W-class (non-success residuals).
CompactFusionState phase_correction(const CompactFusionState& state);

struct FullRegisterState {
  int qubit_count = 0;
  StateVector state;                          // dim 2^qubit_count
  std::vector<std::vector<int>> group_qubits; // physical qubits per group
  std::vector<int> slot_qubits;               // physical qubit per slot
};

// Explicit 2^n expansion: group atoms first (group 0, group 1, ...), then
// slot atoms in slot order; qubit q is bit q of the basis index, |e> = 1.
// Guarded at 14 qubits.
FullRegisterState expand_to_full(const CompactFusionState& state);

}  // namespace wfusion
