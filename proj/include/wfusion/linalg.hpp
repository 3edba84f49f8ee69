#pragma once

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "wfusion/kernels.hpp"

// Dense complex linear algebra for small Hilbert spaces: state vectors,
// Hermitian operators, unitary propagators, a fixed-step Schrodinger
// integrator and operator embedding into multi-qubit registers.

namespace wfusion {

using cxd = std::complex<double>;

// Integration/accuracy failures, as opposed to caller errors
// (std::invalid_argument). The CLI maps them to distinct exit codes.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StateVector {
  std::vector<cxd> amps;

  StateVector() = default;
  explicit StateVector(int dim) : amps(static_cast<std::size_t>(dim)) {}
  explicit StateVector(std::vector<cxd> a) : amps(std::move(a)) {}

  int dim() const { return static_cast<int>(amps.size()); }
  double norm_sq() const { return kernels::norm_sq(amps); }
  double norm() const;
  bool finite() const;

  static StateVector basis(int dim, int index);
};

cxd inner(const StateVector& x, const StateVector& y);  // <x|y>

struct SquareOperator {
  int dim = 0;
  std::vector<cxd> entries;  // row-major
  bool hermitian = false;

  SquareOperator() = default;
  explicit SquareOperator(int n, bool herm = false)
      : dim(n), entries(static_cast<std::size_t>(n) * n), hermitian(herm) {}

  cxd& at(int i, int j) { return entries[static_cast<std::size_t>(i) * dim + j]; }
  const cxd& at(int i, int j) const {
    return entries[static_cast<std::size_t>(i) * dim + j];
  }

  static SquareOperator identity(int n);

  SquareOperator dagger() const;
  SquareOperator operator*(const SquareOperator& rhs) const;
  StateVector apply(const StateVector& psi) const;

  // max_ij |A_ij - conj(A_ji)|
  double hermiticity_violation() const;
  // max_ij |(U^dag U - I)_ij|
  double unitarity_violation() const;
  double max_abs() const;
};

struct Eigensystem {
  std::vector<double> values;  // ascending
  SquareOperator vectors;      // eigenvectors as columns
};

// Cyclic complex Jacobi diagonalization of a Hermitian operator.
Eigensystem eigh(const SquareOperator& h);

// U = exp(-i H t) via spectral decomposition; rejects non-Hermitian input.
SquareOperator matrix_exponential(const SquareOperator& h, double t);

// Fixed-step RK4 for i d/dt psi = H(t) psi. Every sampled H must be
// Hermitian; a relative norm drift beyond 1e-6 raises numerical_error.
StateVector integrate_schrodinger(
    const std::function<SquareOperator(double)>& h_of_t,
    const StateVector& psi0, double t_final, double dt);

// Lift a k-qubit operator to a dense operator on `total_qubits` qubits,
// acting as identity elsewhere. Qubit q is bit q of the basis index.
// Dense output is capped at 12 qubits; use apply_embedded beyond that.
SquareOperator embed_operator(const SquareOperator& u,
                              std::span<const int> positions,
                              int total_qubits);

// In-place equivalent of embed_operator(...).apply(psi).
void apply_embedded(const SquareOperator& u, std::span<const int> positions,
                    StateVector& psi);

}  // namespace wfusion
