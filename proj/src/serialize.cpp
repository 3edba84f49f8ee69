#include "wfusion/serialize.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace wfusion {

double round15(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return std::strtod(buf, nullptr);
}

namespace {

std::string format15(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

std::string join_sizes(const std::vector<int>& sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i) out.push_back(';');
    out += std::to_string(sizes[i]);
  }
  return out;
}

std::string pattern_of(const CompactFusionState& state, TermKey key) {
  std::string p;
  for (std::size_t i = 0; i < state.group_sizes().size(); ++i)
    p.push_back((key.group_bits & (1u << i)) ? '1' : '0');
  p.push_back('|');
  for (std::size_t j = 0; j < state.slot_labels().size(); ++j)
    p.push_back((key.slot_bits & (1u << j)) ? 'e' : 'g');
  return p;
}

}  // namespace

ordered_json state_to_json(const CompactFusionState& state) {
  ordered_json j;
  j["groups"] = state.group_sizes();
  j["slots"] = state.slot_labels();
  ordered_json terms = ordered_json::array();
  for (const auto& [key, amp] : state.terms()) {
    ordered_json t;
    t["pattern"] = pattern_of(state, key);
    t["re"] = round15(amp.real());
    t["im"] = round15(amp.imag());
    terms.push_back(std::move(t));
  }
  j["terms"] = std::move(terms);
  return j;
}

ordered_json report_to_json(const BranchReport& report) {
  ordered_json j;
  j["protocol"] = to_string(report.protocol);
  j["inputs"] = report.inputs;
  j["lambda_t"] = round15(report.lambda_t);
  j["success_probability"] = round15(report.success_probability());
  ordered_json branches = ordered_json::array();
  for (const Branch& b : report.branches) {
    ordered_json jb;
    jb["outcome"] = b.outcome;
    jb["probability"] = round15(b.probability);
    jb["class"] = to_string(b.classification);
    jb["residual_sizes"] = b.residual_sizes;
    if (b.post_correction_fidelity)
      jb["post_correction_fidelity"] = round15(*b.post_correction_fidelity);
    else
      jb["post_correction_fidelity"] = nullptr;
    jb["residual_state"] = state_to_json(b.residual);
    branches.push_back(std::move(jb));
  }
  j["branches"] = std::move(branches);
  return j;
}

std::string report_to_csv(const BranchReport& report) {
  std::ostringstream out;
  out << "protocol,sizes,outcome,probability,class,residual_sizes,fidelity\n";
  for (const Branch& b : report.branches) {
    out << to_string(report.protocol) << ',' << join_sizes(report.inputs) << ','
        << b.outcome << ',' << format15(b.probability) << ','
        << to_string(b.classification) << ',' << join_sizes(b.residual_sizes)
        << ',';
    if (b.post_correction_fidelity)
      out << format15(*b.post_correction_fidelity);
    out << '\n';
  }
  return out.str();
}

ordered_json yield_to_json(const YieldStats& ys) {
  ordered_json j;
  j["expected_bell_pairs"] = round15(ys.expected_bell_pairs);
  j["bell_pairs_stderr"] = round15(ys.bell_pairs_stderr);
  j["ancilla_atoms"] = round15(ys.ancilla_atoms);
  ordered_json hist = ordered_json::object();
  for (const auto& [cls, count] : ys.outcome_histogram) hist[cls] = count;
  j["outcome_histogram"] = std::move(hist);
  j["trials"] = ys.trials;
  j["targets_produced"] = ys.targets_produced;
  j["seed"] = ys.seed;
  j["rng_algorithm"] = ys.rng_algorithm;
  return j;
}

ordered_json feasibility_to_json(const FeasibilityReport& r) {
  ordered_json j;
  j["lambda_rad_per_s"] = round15(r.lambda);
  j["interaction_time_s"] = round15(r.interaction_time);
  j["atomic_decay_time_s"] = round15(r.atomic_decay_time);
  j["cavity_decay_time_s"] = round15(r.cavity_decay_time);
  j["time_margin_atomic"] = round15(r.time_margin_atomic);
  j["time_margin_cavity"] = round15(r.time_margin_cavity);
  return j;
}

std::string feasibility_to_csv(const FeasibilityReport& r) {
  std::ostringstream out;
  out << "lambda_rad_per_s,interaction_time_s,atomic_decay_time_s,"
         "cavity_decay_time_s,time_margin_atomic,time_margin_cavity\n";
  out << format15(r.lambda) << ',' << format15(r.interaction_time) << ','
      << format15(r.atomic_decay_time) << ',' << format15(r.cavity_decay_time)
      << ',' << format15(r.time_margin_atomic) << ','
      << format15(r.time_margin_cavity) << '\n';
  return out.str();
}

}  // namespace wfusion
