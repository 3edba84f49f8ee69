#include "wfusion/cavity.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace wfusion::cavity {

void CavityParams::validate() const {
  if (!(g > 0.0)) throw std::invalid_argument("CavityParams: g must be > 0");
  if (!(delta > 0.0))
    throw std::invalid_argument("CavityParams: delta must be > 0");
  if (n_max < 3) throw std::invalid_argument("CavityParams: n_max must be >= 3");
}

EffectiveParams lambda_from(const CavityParams& params) {
  params.validate();
  return {params.g * params.g / params.delta, 0.0};
}

SectorCoefficients coeff_ab(double lambda_t) {
  const cxd e3 = std::exp(cxd(0.0, -3.0 * lambda_t));
  const cxd a = (e3 - 1.0) / 3.0;
  SectorCoefficients c;
  c.a = a;
  c.b = a + 1.0;  // keeps b - a == 1 exact
  c.phase_two_exc = std::exp(cxd(0.0, -lambda_t));
  c.phase_three_exc = e3;
  return c;
}

double magic_time() { return 2.0 * std::numbers::pi / 9.0; }

SquareOperator build_effective_hamiltonian() {
  SquareOperator h(kAtomicDim, true);
  for (int b = 0; b < kAtomicDim; ++b) {
    h.at(b, b) = static_cast<double>(std::popcount(static_cast<unsigned>(b)));
    for (int i = 0; i < kAtoms; ++i) {
      if (!(b & (1 << i))) continue;
      for (int j = 0; j < kAtoms; ++j) {
        if (j == i || (b & (1 << j))) continue;
        const int to = (b & ~(1 << i)) | (1 << j);  // S+_j S-_i
        h.at(to, b) += 1.0;
      }
    }
  }
  return h;
}

SquareOperator effective_propagator(double lambda_t) {
  const SectorCoefficients c = coeff_ab(lambda_t);
  SquareOperator u(kAtomicDim);
  for (int b = 0; b < kAtomicDim; ++b) {
    const int exc = std::popcount(static_cast<unsigned>(b));
    switch (exc) {
      case 0:
        u.at(b, b) = 1.0;
        break;
      case 3:
        u.at(b, b) = c.phase_three_exc;
        break;
      default: {
        // Both one-excitation and two-excitation sectors evolve with "stay"
        // coefficient b and "hop" coefficient a; the two-excitation sector
        // carries the extra e^{-i lambda t} prefactor.
        const cxd pre = (exc == 2) ? c.phase_two_exc : cxd{1.0};
        u.at(b, b) = pre * c.b;
        for (int i = 0; i < kAtoms; ++i) {
          if (!(b & (1 << i))) continue;
          for (int j = 0; j < kAtoms; ++j) {
            if (j == i || (b & (1 << j))) continue;
            const int to = (b & ~(1 << i)) | (1 << j);
            u.at(to, b) = pre * c.a;
          }
        }
        break;
      }
    }
  }
  return u;
}

SquareOperator build_full_hamiltonian(const CavityParams& params, double t) {
  params.validate();
  const int dim = kAtomicDim * (params.n_max + 1);
  SquareOperator h(dim, true);
  const cxd down_phase = params.g * std::exp(cxd(0.0, -params.delta * t));
  for (int n = 0; n < params.n_max; ++n) {
    const double root = std::sqrt(static_cast<double>(n + 1));
    for (int b = 0; b < kAtomicDim; ++b) {
      for (int j = 0; j < kAtoms; ++j) {
        if (!(b & (1 << j))) continue;
        // a^dag S-_j : |b, n> -> |b with atom j dropped, n+1>
        const int from = b + kAtomicDim * n;
        const int to = (b & ~(1 << j)) + kAtomicDim * (n + 1);
        h.at(to, from) += down_phase * root;
        h.at(from, to) += std::conj(down_phase) * root;
      }
    }
  }
  return h;
}

DispersiveError dispersive_error(const CavityParams& params,
                                 double lambda_t_target,
                                 int steps_per_period) {
  params.validate();
  if (!(lambda_t_target > 0.0))
    throw std::invalid_argument("dispersive_error: lambda_t_target must be > 0");
  if (steps_per_period < 8)
    throw std::invalid_argument("dispersive_error: steps_per_period too small");

  const EffectiveParams eff = lambda_from(params);
  const double t_final = eff.time_for(lambda_t_target);
  const double dt = (2.0 * std::numbers::pi / params.delta) /
                    static_cast<double>(steps_per_period);
  const int full_dim = kAtomicDim * (params.n_max + 1);
  const SquareOperator predicted = effective_propagator(lambda_t_target);

  auto h_of_t = [&params](double t) { return build_full_hamiltonian(params, t); };

  double worst_fidelity = 1.0;
  double worst_leakage = 0.0;
  for (int b = 0; b < kAtomicDim; ++b) {
    const StateVector psi =
        integrate_schrodinger(h_of_t, StateVector::basis(full_dim, b), t_final, dt);

    StateVector vacuum(kAtomicDim);
    for (int a = 0; a < kAtomicDim; ++a) vacuum.amps[a] = psi.amps[a];
    const double in_vacuum = vacuum.norm_sq();
    const double leakage = std::max(0.0, 1.0 - in_vacuum);

    StateVector expect(kAtomicDim);
    for (int a = 0; a < kAtomicDim; ++a) expect.amps[a] = predicted.at(a, b);
    const double fid = std::norm(inner(expect, vacuum)) / in_vacuum;

    worst_fidelity = std::min(worst_fidelity, fid);
    worst_leakage = std::max(worst_leakage, leakage);
  }
  return {worst_fidelity, worst_leakage};
}

}  // namespace wfusion::cavity
