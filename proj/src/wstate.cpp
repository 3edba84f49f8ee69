#include "wfusion/wstate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace wfusion {

namespace {

constexpr double kZeroTol = 1e-14;

int popcount8(std::uint8_t b) { return std::popcount(static_cast<unsigned>(b)); }

}  // namespace

CompactFusionState::CompactFusionState(std::vector<int> group_sizes,
                                       std::vector<int> slot_labels,
                                       std::map<TermKey, cxd> terms)
    : group_sizes_(std::move(group_sizes)),
      slot_labels_(std::move(slot_labels)),
      terms_(std::move(terms)) {
  if (group_sizes_.size() > 8 || slot_labels_.size() > 8)
    throw std::invalid_argument("CompactFusionState: too many groups/slots");
  for (int s : group_sizes_)
    if (s < 0) throw std::invalid_argument("CompactFusionState: negative group size");
  {
    auto sorted = slot_labels_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("CompactFusionState: duplicate slot label");
  }
  const std::uint8_t gmask =
      static_cast<std::uint8_t>((1u << group_sizes_.size()) - 1u);
  const std::uint8_t smask =
      static_cast<std::uint8_t>((1u << slot_labels_.size()) - 1u);
  for (const auto& [key, amp] : terms_) {
    if ((key.group_bits & ~gmask) || (key.slot_bits & ~smask))
      throw std::invalid_argument("CompactFusionState: term key out of range");
    for (std::size_t i = 0; i < group_sizes_.size(); ++i)
      if ((key.group_bits & (1u << i)) && group_sizes_[i] == 0)
        throw std::invalid_argument(
            "CompactFusionState: excitation assigned to empty group");
    if (!std::isfinite(amp.real()) || !std::isfinite(amp.imag()))
      throw std::invalid_argument("CompactFusionState: non-finite amplitude");
  }
}

int CompactFusionState::total_atoms() const {
  return std::accumulate(group_sizes_.begin(), group_sizes_.end(), 0) +
         static_cast<int>(slot_labels_.size());
}

bool CompactFusionState::same_layout(const CompactFusionState& other) const {
  return group_sizes_ == other.group_sizes_ && slot_labels_ == other.slot_labels_;
}

double CompactFusionState::multiplicity(TermKey key) const {
  double w = 1.0;
  for (std::size_t i = 0; i < group_sizes_.size(); ++i)
    if (key.group_bits & (1u << i)) w *= static_cast<double>(group_sizes_[i]);
  return w;
}

double CompactFusionState::norm_sq() const {
  double s = 0.0;
  for (const auto& [key, amp] : terms_) s += std::norm(amp) * multiplicity(key);
  return s;
}

bool CompactFusionState::is_normalized(double tol) const {
  return std::abs(norm_sq() - 1.0) <= tol;
}

CompactFusionState CompactFusionState::normalized() const {
  const double n2 = norm_sq();
  if (n2 <= 0.0)
    throw std::invalid_argument("CompactFusionState: cannot normalize zero state");
  const double inv = 1.0 / std::sqrt(n2);
  cxd phase = 1.0;
  for (const auto& [key, amp] : terms_) {
    if (std::abs(amp) * inv > kZeroTol) {
      phase = std::conj(amp) / std::abs(amp);
      break;
    }
  }
  std::map<TermKey, cxd> out;
  for (const auto& [key, amp] : terms_) {
    const cxd v = amp * inv * phase;
    if (std::abs(v) > kZeroTol) out.emplace(key, v);
  }
  return CompactFusionState(group_sizes_, slot_labels_, std::move(out));
}

cxd overlap(const CompactFusionState& a, const CompactFusionState& b) {
  if (!a.same_layout(b)) throw std::invalid_argument("overlap: layout mismatch");
  cxd s = 0.0;
  for (const auto& [key, amp] : a.terms()) {
    auto it = b.terms().find(key);
    if (it != b.terms().end())
      s += std::conj(amp) * it->second * a.multiplicity(key);
  }
  return s;
}

double fidelity(const CompactFusionState& state,
                const CompactFusionState& reference) {
  const double denom = state.norm_sq() * reference.norm_sq();
  if (denom <= 0.0) throw std::invalid_argument("fidelity: zero state");
  return std::norm(overlap(reference, state)) / denom;
}

double distance_up_to_phase(const CompactFusionState& a,
                            const CompactFusionState& b) {
  if (!a.same_layout(b))
    throw std::invalid_argument("distance_up_to_phase: layout mismatch");
  // <a|b> = e^{i phi} for equal states; rotate b back by conj(phase)
  cxd ov = overlap(a, b);
  cxd phase = std::abs(ov) > 0.0 ? std::conj(ov) / std::abs(ov) : cxd{1.0};
  double worst = 0.0;
  auto ita = a.terms().begin();
  auto itb = b.terms().begin();
  while (ita != a.terms().end() || itb != b.terms().end()) {
    if (itb == b.terms().end() ||
        (ita != a.terms().end() && ita->first < itb->first)) {
      worst = std::max(worst, std::abs(ita->second));
      ++ita;
    } else if (ita == a.terms().end() || itb->first < ita->first) {
      worst = std::max(worst, std::abs(itb->second));
      ++itb;
    } else {
      worst = std::max(worst, std::abs(ita->second - phase * itb->second));
      ++ita;
      ++itb;
    }
  }
  return worst;
}

CompactFusionState standard_w(int n) {
  if (n < 1) throw std::invalid_argument("standard_w: n must be >= 1");
  std::map<TermKey, cxd> terms;
  terms[TermKey{1, 0}] = 1.0 / std::sqrt(static_cast<double>(n));
  return CompactFusionState({n}, {}, std::move(terms));
}

CompactFusionState standard_w_like(const CompactFusionState& shape) {
  const int n = shape.total_atoms();
  if (n < 1) throw std::invalid_argument("standard_w_like: empty layout");
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  std::map<TermKey, cxd> terms;
  for (std::size_t i = 0; i < shape.group_sizes().size(); ++i)
    if (shape.group_sizes()[i] > 0)
      terms[TermKey{static_cast<std::uint8_t>(1u << i), 0}] = amp;
  for (std::size_t j = 0; j < shape.slot_labels().size(); ++j)
    terms[TermKey{0, static_cast<std::uint8_t>(1u << j)}] = amp;
  return CompactFusionState(shape.group_sizes(), shape.slot_labels(),
                            std::move(terms));
}

CompactFusionState initial_two_fusion_state(int n, int m) {
  if (n < 2 || m < 2)
    throw std::invalid_argument("initial_two_fusion_state: sizes must be >= 2");
  const double amp = 1.0 / std::sqrt(static_cast<double>(n) * m);
  std::map<TermKey, cxd> terms;
  // Each input W splits into (spectators ground, extracted excited) and
  // (one spectator excited, extracted ground); the ancilla slot stays ground.
  for (std::uint8_t gn = 0; gn <= 1; ++gn)
    for (std::uint8_t gm = 0; gm <= 1; ++gm) {
      const std::uint8_t group_bits = static_cast<std::uint8_t>(gn | (gm << 1));
      const std::uint8_t slot_bits =
          static_cast<std::uint8_t>((gn ? 0 : 1) | ((gm ? 0 : 1) << 1));
      terms[TermKey{group_bits, slot_bits}] = amp;
    }
  return CompactFusionState({n - 1, m - 1}, {1, 2, 3}, std::move(terms));
}

CompactFusionState initial_three_fusion_state(int n, int m, int t) {
  if (n < 2 || m < 2 || t < 2)
    throw std::invalid_argument("initial_three_fusion_state: sizes must be >= 2");
  const double amp = 1.0 / std::sqrt(static_cast<double>(n) * m * t);
  std::map<TermKey, cxd> terms;
  for (std::uint8_t bits = 0; bits < 8; ++bits) {
    const std::uint8_t slot_bits = static_cast<std::uint8_t>(~bits & 0x7u);
    terms[TermKey{bits, slot_bits}] = amp;
  }
  return CompactFusionState({n - 1, m - 1, t - 1}, {1, 2, 3}, std::move(terms));
}

CompactFusionState apply_extracted_propagator(const CompactFusionState& state,
                                              const SquareOperator& u) {
  const std::size_t k = state.slot_labels().size();
  const int dim = 1 << k;
  if (u.dim != dim)
    throw std::invalid_argument(
        "apply_extracted_propagator: operator dimension does not match slots");
  if (u.unitarity_violation() > 1e-10)
    throw std::invalid_argument("apply_extracted_propagator: operator not unitary");

  std::map<TermKey, cxd> out;
  for (const auto& [key, amp] : state.terms()) {
    for (int row = 0; row < dim; ++row) {
      const cxd factor = u.at(row, key.slot_bits);
      if (factor == cxd{}) continue;
      out[TermKey{key.group_bits, static_cast<std::uint8_t>(row)}] += factor * amp;
    }
  }
  for (auto it = out.begin(); it != out.end();)
    it = (std::abs(it->second) <= kZeroTol) ? out.erase(it) : std::next(it);
  return CompactFusionState(state.group_sizes(), state.slot_labels(),
                            std::move(out));
}

std::vector<MeasurementOutcome> measure(const CompactFusionState& state,
                                        std::span<const int> atoms) {
  if (atoms.empty()) throw std::invalid_argument("measure: no atoms given");
  std::vector<int> slot_index;
  for (int label : atoms) {
    auto it = std::find(state.slot_labels().begin(), state.slot_labels().end(),
                        label);
    if (it == state.slot_labels().end())
      throw std::invalid_argument(
          "measure: atom " + std::to_string(label) +
          " is not an extracted slot (spectator groups cannot be measured)");
    slot_index.push_back(
        static_cast<int>(it - state.slot_labels().begin()));
  }
  {
    auto sorted = slot_index;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("measure: duplicate atom");
  }

  std::vector<int> kept_index;
  for (std::size_t j = 0; j < state.slot_labels().size(); ++j)
    if (std::find(slot_index.begin(), slot_index.end(), static_cast<int>(j)) ==
        slot_index.end())
      kept_index.push_back(static_cast<int>(j));
  std::vector<int> kept_labels;
  for (int j : kept_index) kept_labels.push_back(state.slot_labels()[j]);

  const double total = state.norm_sq();
  const std::size_t k = slot_index.size();
  std::vector<MeasurementOutcome> outcomes;
  double prob_sum = 0.0;

  for (std::uint32_t assign = 0; assign < (1u << k); ++assign) {
    std::map<TermKey, cxd> proj;
    for (const auto& [key, amp] : state.terms()) {
      bool match = true;
      for (std::size_t j = 0; j < k; ++j) {
        const bool excited = key.slot_bits & (1u << slot_index[j]);
        if (excited != static_cast<bool>(assign & (1u << j))) {
          match = false;
          break;
        }
      }
      if (!match) continue;
      std::uint8_t new_bits = 0;
      for (std::size_t j = 0; j < kept_index.size(); ++j)
        if (key.slot_bits & (1u << kept_index[j]))
          new_bits |= static_cast<std::uint8_t>(1u << j);
      proj[TermKey{key.group_bits, new_bits}] += amp;
    }
    CompactFusionState residual(state.group_sizes(), kept_labels, std::move(proj));
    const double p = residual.norm_sq() / total;
    prob_sum += p;
    if (p <= 1e-14) continue;

    MeasurementOutcome out;
    out.measured_atoms.assign(atoms.begin(), atoms.end());
    out.bitstring.reserve(k);
    for (std::size_t j = 0; j < k; ++j)
      out.bitstring.push_back((assign & (1u << j)) ? 'e' : 'g');
    out.probability = p;
    out.residual = residual.normalized();
    outcomes.push_back(std::move(out));
  }

  if (std::abs(prob_sum - 1.0) > 1e-10)
    throw numerical_error("measure: outcome probabilities sum to " +
                          std::to_string(prob_sum));
  return outcomes;
}

CompactFusionState phase_correction(const CompactFusionState& state) {
  for (const auto& [key, amp] : state.terms()) {
    if (std::abs(amp) <= kZeroTol) continue;
    if (popcount8(key.group_bits) + popcount8(key.slot_bits) != 1)
      throw std::invalid_argument(
          "phase_correction: state is not a single-excitation (W-class) "
          "residual; only success branches can be corrected");
  }
  std::map<TermKey, cxd> out;
  for (const auto& [key, amp] : state.terms())
    if (std::abs(amp) > kZeroTol) out.emplace(key, std::abs(amp));
  return CompactFusionState(state.group_sizes(), state.slot_labels(),
                            std::move(out));
}

FullRegisterState expand_to_full(const CompactFusionState& state) {
  const int qubits = state.total_atoms();
  if (qubits > 14)
    throw std::invalid_argument("expand_to_full: register larger than 14 qubits");
  if (qubits < 1)
    throw std::invalid_argument("expand_to_full: empty register");

  FullRegisterState full;
  full.qubit_count = qubits;
  int next = 0;
  for (int size : state.group_sizes()) {
    std::vector<int> qs(static_cast<std::size_t>(size));
    std::iota(qs.begin(), qs.end(), next);
    next += size;
    full.group_qubits.push_back(std::move(qs));
  }
  for (std::size_t j = 0; j < state.slot_labels().size(); ++j)
    full.slot_qubits.push_back(next++);

  full.state = StateVector(1 << qubits);
  for (const auto& [key, amp] : state.terms()) {
    std::size_t base = 0;
    for (std::size_t j = 0; j < full.slot_qubits.size(); ++j)
      if (key.slot_bits & (1u << j)) base |= std::size_t{1} << full.slot_qubits[j];

    std::vector<int> excited_groups;
    for (std::size_t i = 0; i < full.group_qubits.size(); ++i)
      if (key.group_bits & (1u << i)) excited_groups.push_back(static_cast<int>(i));

    // The excited class of a group is the plain sum over positions, so each
    // position combination contributes the term amplitude unchanged.
    std::vector<std::size_t> choice(excited_groups.size(), 0);
    while (true) {
      std::size_t idx = base;
      for (std::size_t c = 0; c < excited_groups.size(); ++c)
        idx |= std::size_t{1}
               << full.group_qubits[excited_groups[c]][choice[c]];
      full.state.amps[idx] += amp;

      std::size_t c = 0;
      for (; c < choice.size(); ++c) {
        if (++choice[c] <
            full.group_qubits[excited_groups[c]].size())
          break;
        choice[c] = 0;
      }
      if (c == choice.size()) break;
    }
  }
  return full;
}

}  // namespace wfusion
