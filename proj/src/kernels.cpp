#include "wfusion/kernels.hpp"

#include <array>
#include <atomic>
#include <stdexcept>

#include "kernels_detail.hpp"

namespace wfusion::kernels {

namespace detail {

namespace {

void scale_scalar(cxd a, cxd* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void axpy_scalar(cxd a, const cxd* x, cxd* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double norm_sq_scalar(const cxd* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

cxd dot_scalar(const cxd* x, const cxd* y, std::size_t n) {
  cxd s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::conj(x[i]) * y[i];
  return s;
}

void matvec_scalar(const cxd* a, const cxd* x, cxd* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    cxd s = 0.0;
    const cxd* row = a + i * n;
    for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

}  // namespace

const Vtable& scalar_vtable() {
  static const Vtable vt{scale_scalar, axpy_scalar, norm_sq_scalar, dot_scalar,
                         matvec_scalar};
  return vt;
}

}  // namespace detail

namespace {

bool cpu_supports_avx2() {
#if defined(WFUSION_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const detail::Vtable* vtable_for(Backend b) {
  switch (b) {
    case Backend::scalar:
      return &detail::scalar_vtable();
    case Backend::avx2:
#if defined(WFUSION_HAVE_AVX2)
      return &detail::avx2_vtable();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::atomic<const detail::Vtable*>& active_vtable() {
  static std::atomic<const detail::Vtable*> vt{
      cpu_supports_avx2() ? vtable_for(Backend::avx2)
                          : &detail::scalar_vtable()};
  return vt;
}

std::atomic<Backend>& active_backend_id() {
  static std::atomic<Backend> b{cpu_supports_avx2() ? Backend::avx2
                                                    : Backend::scalar};
  return b;
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
  }
  return "unknown";
}

bool backend_available(Backend b) {
  if (b == Backend::scalar) return true;
  return cpu_supports_avx2();
}

Backend active_backend() { return active_backend_id().load(); }

void set_backend(Backend b) {
  if (!backend_available(b))
    throw std::invalid_argument("kernel backend not available: " +
                                std::string(backend_name(b)));
  active_vtable().store(vtable_for(b));
  active_backend_id().store(b);
}

void scale(cxd a, std::span<cxd> x) {
  active_vtable().load()->scale(a, x.data(), x.size());
}

void axpy(cxd a, std::span<const cxd> x, std::span<cxd> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  active_vtable().load()->axpy(a, x.data(), y.data(), x.size());
}

double norm_sq(std::span<const cxd> x) {
  return active_vtable().load()->norm_sq(x.data(), x.size());
}

cxd dot(std::span<const cxd> x, std::span<const cxd> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
  return active_vtable().load()->dot(x.data(), y.data(), x.size());
}

void matvec(std::span<const cxd> a, std::span<const cxd> x, std::span<cxd> y) {
  const std::size_t n = x.size();
  if (y.size() != n || a.size() != n * n)
    throw std::invalid_argument("matvec: size mismatch");
  if (x.data() == y.data()) throw std::invalid_argument("matvec: y aliases x");
  active_vtable().load()->matvec(a.data(), x.data(), y.data(), n);
}

void apply_gate(std::span<const cxd> gate, std::span<const int> positions,
                std::span<cxd> state) {
  const int k = static_cast<int>(positions.size());
  if (k < 1 || k > 8) throw std::invalid_argument("apply_gate: need 1..8 qubits");
  const std::size_t gdim = std::size_t{1} << k;
  if (gate.size() != gdim * gdim)
    throw std::invalid_argument("apply_gate: gate dimension mismatch");

  std::size_t n_states = state.size();
  int n = 0;
  while ((std::size_t{1} << n) < n_states) ++n;
  if ((std::size_t{1} << n) != n_states)
    throw std::invalid_argument("apply_gate: state size not a power of two");

  std::size_t pos_mask = 0;
  for (int j = 0; j < k; ++j) {
    const int p = positions[j];
    if (p < 0 || p >= n) throw std::invalid_argument("apply_gate: position out of range");
    if (pos_mask & (std::size_t{1} << p))
      throw std::invalid_argument("apply_gate: duplicate position");
    pos_mask |= std::size_t{1} << p;
  }

  // offset[r] = basis-index contribution of gate pattern r
  std::array<std::size_t, 256> offset{};
  for (std::size_t r = 0; r < gdim; ++r) {
    std::size_t off = 0;
    for (int j = 0; j < k; ++j)
      if (r & (std::size_t{1} << j)) off |= std::size_t{1} << positions[j];
    offset[r] = off;
  }

  // complement qubits, ascending
  std::array<int, 64> comp{};
  int n_comp = 0;
  for (int q = 0; q < n; ++q)
    if (!(pos_mask & (std::size_t{1} << q))) comp[n_comp++] = q;

  std::array<cxd, 256> in{}, out{};
  const std::size_t n_outer = std::size_t{1} << n_comp;
  for (std::size_t m = 0; m < n_outer; ++m) {
    std::size_t base = 0;
    for (int i = 0; i < n_comp; ++i)
      if (m & (std::size_t{1} << i)) base |= std::size_t{1} << comp[i];
    for (std::size_t r = 0; r < gdim; ++r) in[r] = state[base + offset[r]];
    matvec(gate, std::span<const cxd>(in.data(), gdim),
           std::span<cxd>(out.data(), gdim));
    for (std::size_t r = 0; r < gdim; ++r) state[base + offset[r]] = out[r];
  }
}

}  // namespace wfusion::kernels
