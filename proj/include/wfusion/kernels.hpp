#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

// Low-level complex-double kernels behind the state-vector engine.
//
// Every kernel has a scalar reference implementation and, on x86-64 with
// AVX2+FMA, a vectorized variant. The backend is picked once at startup from
// CPUID and can be overridden with set_backend() (the equivalence tests run
// both paths on the same inputs).
//
// Complex data is the usual interleaved re,im layout of std::complex<double>.

namespace wfusion::kernels {

using cxd = std::complex<double>;

enum class Backend { scalar, avx2 };

std::string_view backend_name(Backend b);

// True if the backend is compiled in and supported by the running CPU.
bool backend_available(Backend b);

Backend active_backend();

// Override the dispatch choice; throws std::invalid_argument if unavailable.
void set_backend(Backend b);

// x *= a
void scale(cxd a, std::span<cxd> x);

// y += a * x
void axpy(cxd a, std::span<const cxd> x, std::span<cxd> y);

// sum_i |x_i|^2
double norm_sq(std::span<const cxd> x);

// <x|y> = sum_i conj(x_i) * y_i
cxd dot(std::span<const cxd> x, std::span<const cxd> y);

// y = A x with A row-major n*n, n = x.size() = y.size(); y must not alias x.
void matvec(std::span<const cxd> a, std::span<const cxd> x, std::span<cxd> y);

// Apply a k-qubit gate (2^k x 2^k, row-major) to the amplitudes of an
// n-qubit state at the given qubit positions. Qubit q is bit q of the basis
// index (LSB first); bit value 1 means the excited/|1> state. positions[j]
// is the physical qubit acting as gate qubit j. k <= 8.
void apply_gate(std::span<const cxd> gate, std::span<const int> positions,
                std::span<cxd> state);

}  // namespace wfusion::kernels
