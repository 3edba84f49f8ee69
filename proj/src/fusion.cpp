#include "wfusion/fusion.hpp"

#include <algorithm>
#include <array>

namespace wfusion {

std::string_view to_string(Protocol p) {
  return p == Protocol::two_fusion ? "two-fusion" : "three-fusion";
}

std::string_view to_string(OutcomeClass c) {
  switch (c) {
    case OutcomeClass::success:
      return "Success";
    case OutcomeClass::byproduct_success:
      return "ByproductSuccess";
    case OutcomeClass::recyclable:
      return "Recyclable";
    case OutcomeClass::hard_failure:
      return "HardFailure";
  }
  return "?";
}

OutcomeClass classify_outcome(Protocol protocol, std::string_view outcome) {
  if (protocol == Protocol::two_fusion) {
    if (outcome == "ge" || outcome == "eg") return OutcomeClass::success;
    if (outcome == "ee") return OutcomeClass::hard_failure;
    if (outcome == "gg->e") return OutcomeClass::byproduct_success;
    if (outcome == "gg->g") return OutcomeClass::recyclable;
    throw std::invalid_argument("classify_outcome: unknown two-fusion outcome '" +
                                std::string(outcome) + "'");
  }
  if (outcome.size() != 3 ||
      outcome.find_first_not_of("ge") != std::string_view::npos)
    throw std::invalid_argument("classify_outcome: unknown three-fusion outcome '" +
                                std::string(outcome) + "'");
  const int excited = static_cast<int>(std::count(outcome.begin(), outcome.end(), 'e'));
  switch (excited) {
    case 2:
      return OutcomeClass::success;
    case 0:
      return OutcomeClass::recyclable;
    default:
      // eee leaves everything ground; a single excitation leaves the
      // spectator groups entangled with each other and no recovery exists.
      return OutcomeClass::hard_failure;
  }
}

double BranchReport::total_probability() const {
  double s = 0.0;
  for (const Branch& b : branches) s += b.probability;
  return s;
}

double BranchReport::success_probability() const {
  double s = 0.0;
  for (const Branch& b : branches)
    if (b.classification == OutcomeClass::success) s += b.probability;
  return s;
}

const Branch* BranchReport::find(std::string_view outcome) const {
  for (const Branch& b : branches)
    if (b.outcome == outcome) return &b;
  return nullptr;
}

namespace {

// residual_sizes for a classified branch; hard failures leave nothing usable.
std::vector<int> residual_sizes_for(OutcomeClass cls,
                                    const CompactFusionState& residual) {
  switch (cls) {
    case OutcomeClass::success:
    case OutcomeClass::byproduct_success:
      return {residual.total_atoms()};
    case OutcomeClass::recyclable:
      return residual.group_sizes();
    case OutcomeClass::hard_failure:
      return {};
  }
  return {};
}

Branch make_branch(Protocol protocol, std::string outcome, double probability,
                   CompactFusionState residual) {
  Branch b;
  b.outcome = std::move(outcome);
  b.probability = probability;
  b.classification = classify_outcome(protocol, b.outcome);
  b.residual_sizes = residual_sizes_for(b.classification, residual);
  if (b.classification == OutcomeClass::success ||
      b.classification == OutcomeClass::byproduct_success) {
    b.post_correction_fidelity =
        fidelity(phase_correction(residual), standard_w_like(residual));
  }
  b.residual = std::move(residual);
  return b;
}

void check_report(const BranchReport& report) {
  if (std::abs(report.total_probability() - 1.0) > 1e-10)
    throw numerical_error("fusion: branch probabilities sum to " +
                          std::to_string(report.total_probability()));
}

}  // namespace

BranchReport fuse_two(int n, int m, double lambda_t) {
  if (n < 2 || m < 2)
    throw std::invalid_argument("fuse_two: input sizes must be >= 2");

  BranchReport report;
  report.protocol = Protocol::two_fusion;
  report.inputs = {n, m};
  report.lambda_t = lambda_t;

  CompactFusionState state = apply_extracted_propagator(
      initial_two_fusion_state(n, m), cavity::effective_propagator(lambda_t));

  const std::array<int, 2> detected{1, 2};
  for (const MeasurementOutcome& out : measure(state, detected)) {
    if (out.bitstring == "gg") {
      // The third atom must be detected to finish the branch.
      const std::array<int, 1> third{3};
      for (const MeasurementOutcome& sub : measure(out.residual, third)) {
        report.branches.push_back(
            make_branch(Protocol::two_fusion, "gg->" + sub.bitstring,
                        out.probability * sub.probability, sub.residual));
      }
    } else {
      report.branches.push_back(make_branch(Protocol::two_fusion, out.bitstring,
                                            out.probability, out.residual));
    }
  }

  // Report order: success outcomes first, then the conditional gg leaves.
  const std::array<std::string_view, 5> order{"ge", "eg", "ee", "gg->e", "gg->g"};
  std::sort(report.branches.begin(), report.branches.end(),
            [&](const Branch& a, const Branch& b) {
              const auto ia = std::find(order.begin(), order.end(), a.outcome);
              const auto ib = std::find(order.begin(), order.end(), b.outcome);
              return ia < ib;
            });
  check_report(report);
  return report;
}

BranchReport fuse_two(int n, int m) { return fuse_two(n, m, cavity::magic_time()); }

BranchReport fuse_three(int n, int m, int t, double lambda_t) {
  if (n < 2 || m < 2 || t < 2)
    throw std::invalid_argument("fuse_three: input sizes must be >= 2");

  BranchReport report;
  report.protocol = Protocol::three_fusion;
  report.inputs = {n, m, t};
  report.lambda_t = lambda_t;

  CompactFusionState state = apply_extracted_propagator(
      initial_three_fusion_state(n, m, t), cavity::effective_propagator(lambda_t));

  const std::array<int, 3> detected{1, 2, 3};
  for (const MeasurementOutcome& out : measure(state, detected))
    report.branches.push_back(make_branch(Protocol::three_fusion, out.bitstring,
                                          out.probability, out.residual));

  const std::array<std::string_view, 8> order{"gee", "ege", "eeg", "gge",
                                              "geg", "egg", "ggg", "eee"};
  std::sort(report.branches.begin(), report.branches.end(),
            [&](const Branch& a, const Branch& b) {
              const auto ia = std::find(order.begin(), order.end(), a.outcome);
              const auto ib = std::find(order.begin(), order.end(), b.outcome);
              return ia < ib;
            });
  check_report(report);
  return report;
}

BranchReport fuse_three(int n, int m, int t) {
  return fuse_three(n, m, t, cavity::magic_time());
}

double success_probability_two(int n, int m) {
  if (n < 2 || m < 2)
    throw std::invalid_argument("success_probability_two: sizes must be >= 2");
  return 2.0 * (n + m - 1) / (3.0 * n * m);
}

double success_probability_three(int n, int m, int t) {
  if (n < 2 || m < 2 || t < 2)
    throw std::invalid_argument("success_probability_three: sizes must be >= 2");
  return static_cast<double>(n + m + t - 3) /
         (static_cast<double>(n) * m * t);
}

}  // namespace wfusion
