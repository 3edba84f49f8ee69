#include "oracle_helpers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oracle {

using wfusion::cxd;
using wfusion::StateVector;

Register two_fusion_initial(int n, int m) {
  Register reg;
  reg.qubits = (n - 1) + (m - 1) + 3;
  std::vector<int> wn, wm;
  int q = 0;
  reg.group_qubits.emplace_back();
  for (int i = 0; i < n - 1; ++i) reg.group_qubits[0].push_back(q++);
  reg.group_qubits.emplace_back();
  for (int i = 0; i < m - 1; ++i) reg.group_qubits[1].push_back(q++);
  reg.slot_qubits = {q, q + 1, q + 2};
  reg.slot_labels = {1, 2, 3};

  wn = reg.group_qubits[0];
  wn.push_back(reg.slot_qubits[0]);
  wm = reg.group_qubits[1];
  wm.push_back(reg.slot_qubits[1]);

  reg.state = StateVector(1 << reg.qubits);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n) * m);
  for (int i : wn)
    for (int j : wm)
      reg.state.amps[(std::size_t{1} << i) | (std::size_t{1} << j)] = amp;
  return reg;
}

Register three_fusion_initial(int n, int m, int t) {
  Register reg;
  reg.qubits = (n - 1) + (m - 1) + (t - 1) + 3;
  int q = 0;
  for (int size : {n - 1, m - 1, t - 1}) {
    reg.group_qubits.emplace_back();
    for (int i = 0; i < size; ++i) reg.group_qubits.back().push_back(q++);
  }
  reg.slot_qubits = {q, q + 1, q + 2};
  reg.slot_labels = {1, 2, 3};

  std::vector<std::vector<int>> blocks;
  for (int b = 0; b < 3; ++b) {
    blocks.push_back(reg.group_qubits[b]);
    blocks.back().push_back(reg.slot_qubits[b]);
  }

  reg.state = StateVector(1 << reg.qubits);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n) * m * t);
  for (int i : blocks[0])
    for (int j : blocks[1])
      for (int k : blocks[2])
        reg.state.amps[(std::size_t{1} << i) | (std::size_t{1} << j) |
                       (std::size_t{1} << k)] = amp;
  return reg;
}

void apply_cavity(Register& reg, const wfusion::SquareOperator& u) {
  wfusion::apply_embedded(u, reg.slot_qubits, reg.state);
}

std::vector<Outcome> measure(const Register& reg,
                             const std::vector<int>& atom_labels) {
  std::vector<int> measured_qubits;
  for (int label : atom_labels) {
    auto it = std::find(reg.slot_labels.begin(), reg.slot_labels.end(), label);
    if (it == reg.slot_labels.end())
      throw std::invalid_argument("oracle::measure: unknown atom label");
    measured_qubits.push_back(
        reg.slot_qubits[static_cast<std::size_t>(it - reg.slot_labels.begin())]);
  }

  std::vector<int> remaining;
  for (int qb = 0; qb < reg.qubits; ++qb)
    if (std::find(measured_qubits.begin(), measured_qubits.end(), qb) ==
        measured_qubits.end())
      remaining.push_back(qb);
  std::vector<int> old_to_new(static_cast<std::size_t>(reg.qubits), -1);
  for (std::size_t i = 0; i < remaining.size(); ++i)
    old_to_new[static_cast<std::size_t>(remaining[i])] = static_cast<int>(i);

  const std::size_t k = measured_qubits.size();
  std::vector<Outcome> outcomes;
  for (std::uint32_t assign = 0; assign < (1u << k); ++assign) {
    std::size_t fixed = 0;
    for (std::size_t j = 0; j < k; ++j)
      if (assign & (1u << j)) fixed |= std::size_t{1} << measured_qubits[j];

    Outcome out;
    out.residual.qubits = static_cast<int>(remaining.size());
    out.residual.state = StateVector(1 << out.residual.qubits);
    double p = 0.0;
    for (std::size_t r = 0; r < out.residual.state.amps.size(); ++r) {
      std::size_t idx = fixed;
      for (std::size_t i = 0; i < remaining.size(); ++i)
        if (r & (std::size_t{1} << i)) idx |= std::size_t{1} << remaining[i];
      const cxd a = reg.state.amps[idx];
      out.residual.state.amps[r] = a;
      p += std::norm(a);
    }
    if (p <= 1e-14) continue;

    const double inv = 1.0 / std::sqrt(p);
    for (cxd& a : out.residual.state.amps) a *= inv;
    out.probability = p;
    out.bitstring.reserve(k);
    for (std::size_t j = 0; j < k; ++j)
      out.bitstring.push_back((assign & (1u << j)) ? 'e' : 'g');

    for (const auto& gq : reg.group_qubits) {
      out.residual.group_qubits.emplace_back();
      for (int qb : gq)
        out.residual.group_qubits.back().push_back(old_to_new[qb]);
    }
    for (std::size_t s = 0; s < reg.slot_qubits.size(); ++s) {
      const int nq = old_to_new[static_cast<std::size_t>(reg.slot_qubits[s])];
      if (nq >= 0) {
        out.residual.slot_qubits.push_back(nq);
        out.residual.slot_labels.push_back(reg.slot_labels[s]);
      }
    }
    outcomes.push_back(std::move(out));
  }
  return outcomes;
}

double diff_up_to_phase(const Register& reg,
                        const wfusion::CompactFusionState& compact) {
  const wfusion::FullRegisterState expanded = wfusion::expand_to_full(compact);
  if (expanded.qubit_count != reg.qubits)
    throw std::invalid_argument("diff_up_to_phase: qubit count mismatch");
  // <reg|exp> = e^{i phi} for equal states; rotate exp back by conj(phase)
  const cxd ov = wfusion::inner(reg.state, expanded.state);
  const cxd phase = std::abs(ov) > 0.0 ? std::conj(ov) / std::abs(ov) : cxd{1.0};
  double worst = 0.0;
  for (std::size_t i = 0; i < reg.state.amps.size(); ++i)
    worst = std::max(worst,
                     std::abs(reg.state.amps[i] - phase * expanded.state.amps[i]));
  return worst;
}

}  // namespace oracle
