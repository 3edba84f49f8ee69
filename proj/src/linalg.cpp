#include "wfusion/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace wfusion {

double StateVector::norm() const { return std::sqrt(norm_sq()); }

bool StateVector::finite() const {
  for (const cxd& a : amps)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
  return true;
}

StateVector StateVector::basis(int dim, int index) {
  if (dim <= 0 || index < 0 || index >= dim)
    throw std::invalid_argument("StateVector::basis: bad dim/index");
  StateVector v(dim);
  v.amps[static_cast<std::size_t>(index)] = 1.0;
  return v;
}

cxd inner(const StateVector& x, const StateVector& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("inner: dim mismatch");
  return kernels::dot(x.amps, y.amps);
}

SquareOperator SquareOperator::identity(int n) {
  SquareOperator m(n, true);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

SquareOperator SquareOperator::dagger() const {
  SquareOperator m(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m.at(i, j) = std::conj(at(j, i));
  m.hermitian = hermitian;
  return m;
}

SquareOperator SquareOperator::operator*(const SquareOperator& rhs) const {
  if (dim != rhs.dim) throw std::invalid_argument("operator*: dim mismatch");
  SquareOperator m(dim);
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < dim; ++k) {
      const cxd aik = at(i, k);
      if (aik == cxd{}) continue;
      for (int j = 0; j < dim; ++j) m.at(i, j) += aik * rhs.at(k, j);
    }
  return m;
}

StateVector SquareOperator::apply(const StateVector& psi) const {
  if (psi.dim() != dim) throw std::invalid_argument("apply: dim mismatch");
  StateVector out(dim);
  kernels::matvec(entries, psi.amps, out.amps);
  return out;
}

double SquareOperator::hermiticity_violation() const {
  double worst = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j)
      worst = std::max(worst, std::abs(at(i, j) - std::conj(at(j, i))));
  return worst;
}

double SquareOperator::unitarity_violation() const {
  const SquareOperator p = dagger() * (*this);
  double worst = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const cxd expect = (i == j) ? cxd{1.0} : cxd{};
      worst = std::max(worst, std::abs(p.at(i, j) - expect));
    }
  return worst;
}

double SquareOperator::max_abs() const {
  double m = 0.0;
  for (const cxd& e : entries) m = std::max(m, std::abs(e));
  return m;
}

namespace {

void check_hermitian(const SquareOperator& h, const char* who) {
  const double tol = 1e-12 * std::max(1.0, h.max_abs());
  if (h.hermiticity_violation() > tol)
    throw std::invalid_argument(std::string(who) +
                                ": operator is not Hermitian within tolerance");
}

}  // namespace

Eigensystem eigh(const SquareOperator& h) {
  check_hermitian(h, "eigh");
  const int n = h.dim;
  SquareOperator a = h;
  SquareOperator v = SquareOperator::identity(n);

  const double scale = std::max(1.0, a.max_abs());
  constexpr int kMaxSweeps = 60;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += std::norm(a.at(p, q));
    if (std::sqrt(off) <= 1e-15 * scale) break;
    if (sweep == kMaxSweeps - 1)
      throw numerical_error("eigh: Jacobi sweep limit reached");

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cxd apq = a.at(p, q);
        const double absa = std::abs(apq);
        if (absa <= 1e-300) {
          a.at(p, q) = 0.0;
          a.at(q, p) = 0.0;
          continue;
        }
        // Phase rotation makes the pivot real, then a real Jacobi rotation
        // zeroes it: R differs from identity by
        //   R[p][p]=c  R[p][q]=s  R[q][p]=-s*conj(u)  R[q][q]=c*conj(u)
        // with u = apq/|apq|.
        const cxd u = apq / absa;
        const double app = a.at(p, p).real();
        const double aqq = a.at(q, q).real();
        const double tau = (aqq - app) / (2.0 * absa);
        const double t =
            (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cxd uc = std::conj(u);

        for (int k = 0; k < n; ++k) {  // A <- A R
          const cxd akp = a.at(k, p);
          const cxd akq = a.at(k, q);
          a.at(k, p) = c * akp - s * uc * akq;
          a.at(k, q) = s * akp + c * uc * akq;
        }
        for (int k = 0; k < n; ++k) {  // A <- R^dag A
          const cxd apk = a.at(p, k);
          const cxd aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * u * aqk;
          a.at(q, k) = s * apk + c * u * aqk;
        }
        for (int k = 0; k < n; ++k) {  // V <- V R
          const cxd vkp = v.at(k, p);
          const cxd vkq = v.at(k, q);
          v.at(k, p) = c * vkp - s * uc * vkq;
          v.at(k, q) = s * vkp + c * uc * vkq;
        }
        a.at(p, q) = 0.0;
        a.at(q, p) = 0.0;
      }
    }
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return a.at(i, i).real() < a.at(j, j).real();
  });

  Eigensystem es;
  es.values.resize(static_cast<std::size_t>(n));
  es.vectors = SquareOperator(n);
  for (int j = 0; j < n; ++j) {
    es.values[static_cast<std::size_t>(j)] = a.at(order[j], order[j]).real();
    for (int i = 0; i < n; ++i) es.vectors.at(i, j) = v.at(i, order[j]);
  }
  return es;
}

SquareOperator matrix_exponential(const SquareOperator& h, double t) {
  check_hermitian(h, "matrix_exponential");
  const Eigensystem es = eigh(h);
  const int n = h.dim;
  // U = V diag(e^{-i w t}) V^dag; unit-modulus eigenphases keep U unitary.
  SquareOperator u(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      cxd s = 0.0;
      for (int k = 0; k < n; ++k) {
        const cxd phase = std::exp(cxd(0.0, -es.values[static_cast<std::size_t>(k)] * t));
        s += es.vectors.at(i, k) * phase * std::conj(es.vectors.at(j, k));
      }
      u.at(i, j) = s;
    }
  }
  return u;
}

StateVector integrate_schrodinger(
    const std::function<SquareOperator(double)>& h_of_t,
    const StateVector& psi0, double t_final, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("integrate_schrodinger: dt <= 0");
  if (t_final < 0.0)
    throw std::invalid_argument("integrate_schrodinger: t_final < 0");
  if (!psi0.finite())
    throw std::invalid_argument("integrate_schrodinger: non-finite input");

  const int n = psi0.dim();
  const double norm0 = psi0.norm();
  const long steps = std::max(1L, std::lround(std::ceil(t_final / dt - 1e-12)));
  const double h = t_final / static_cast<double>(steps);

  auto eval = [&](double t) {
    SquareOperator op = h_of_t(t);
    if (op.dim != n)
      throw std::invalid_argument("integrate_schrodinger: H dim mismatch");
    check_hermitian(op, "integrate_schrodinger");
    return op;
  };

  StateVector y = psi0;
  StateVector k1(n), k2(n), k3(n), k4(n), tmp(n);
  const cxd mi(0.0, -1.0);

  for (long step = 0; step < steps; ++step) {
    const double t = static_cast<double>(step) * h;

    SquareOperator ht = eval(t);
    kernels::matvec(ht.entries, y.amps, k1.amps);
    kernels::scale(mi, k1.amps);

    SquareOperator hm = eval(t + 0.5 * h);
    tmp.amps = y.amps;
    kernels::axpy(0.5 * h, k1.amps, tmp.amps);
    kernels::matvec(hm.entries, tmp.amps, k2.amps);
    kernels::scale(mi, k2.amps);

    tmp.amps = y.amps;
    kernels::axpy(0.5 * h, k2.amps, tmp.amps);
    kernels::matvec(hm.entries, tmp.amps, k3.amps);
    kernels::scale(mi, k3.amps);

    SquareOperator he = eval(t + h);
    tmp.amps = y.amps;
    kernels::axpy(h, k3.amps, tmp.amps);
    kernels::matvec(he.entries, tmp.amps, k4.amps);
    kernels::scale(mi, k4.amps);

    kernels::axpy(h / 6.0, k1.amps, y.amps);
    kernels::axpy(h / 3.0, k2.amps, y.amps);
    kernels::axpy(h / 3.0, k3.amps, y.amps);
    kernels::axpy(h / 6.0, k4.amps, y.amps);

    const double drift = std::abs(y.norm() - norm0) / std::max(norm0, 1e-300);
    if (drift > 1e-6)
      throw numerical_error(
          "integrate_schrodinger: norm drift " + std::to_string(drift) +
          " exceeds 1e-6 (dt too large)");
  }
  if (!y.finite())
    throw numerical_error("integrate_schrodinger: non-finite state");
  return y;
}

namespace {

void check_positions(std::span<const int> positions, int total_qubits, int k) {
  if (static_cast<int>(positions.size()) != k)
    throw std::invalid_argument("embed: operator size vs positions mismatch");
  unsigned long long mask = 0;
  for (int p : positions) {
    if (p < 0 || p >= total_qubits)
      throw std::invalid_argument("embed: position out of range");
    if (mask & (1ULL << p))
      throw std::invalid_argument("embed: duplicate position");
    mask |= 1ULL << p;
  }
}

int log2_exact(int dim, const char* who) {
  int k = 0;
  while ((1 << k) < dim) ++k;
  if ((1 << k) != dim)
    throw std::invalid_argument(std::string(who) + ": dimension not a power of two");
  return k;
}

}  // namespace

SquareOperator embed_operator(const SquareOperator& u,
                              std::span<const int> positions,
                              int total_qubits) {
  const int k = log2_exact(u.dim, "embed_operator");
  if (total_qubits < 1 || total_qubits > 12)
    throw std::invalid_argument("embed_operator: total_qubits must be 1..12");
  check_positions(positions, total_qubits, k);

  const std::size_t dim = std::size_t{1} << total_qubits;
  const std::size_t gdim = std::size_t{1} << k;

  std::vector<std::size_t> offset(gdim, 0);
  for (std::size_t r = 0; r < gdim; ++r)
    for (int j = 0; j < k; ++j)
      if (r & (std::size_t{1} << j)) offset[r] |= std::size_t{1} << positions[j];

  std::size_t pos_mask = 0;
  for (int p : positions) pos_mask |= std::size_t{1} << p;
  std::vector<int> comp;
  for (int q = 0; q < total_qubits; ++q)
    if (!(pos_mask & (std::size_t{1} << q))) comp.push_back(q);

  SquareOperator out(static_cast<int>(dim));
  const std::size_t n_outer = std::size_t{1} << comp.size();
  for (std::size_t m = 0; m < n_outer; ++m) {
    std::size_t base = 0;
    for (std::size_t i = 0; i < comp.size(); ++i)
      if (m & (std::size_t{1} << i)) base |= std::size_t{1} << comp[i];
    for (std::size_t r = 0; r < gdim; ++r)
      for (std::size_t c = 0; c < gdim; ++c)
        out.at(static_cast<int>(base + offset[r]),
               static_cast<int>(base + offset[c])) = u.at(static_cast<int>(r),
                                                          static_cast<int>(c));
  }
  out.hermitian = u.hermitian;
  return out;
}

void apply_embedded(const SquareOperator& u, std::span<const int> positions,
                    StateVector& psi) {
  const int k = log2_exact(u.dim, "apply_embedded");
  const int total = log2_exact(psi.dim(), "apply_embedded");
  check_positions(positions, total, k);
  kernels::apply_gate(u.entries, positions, psi.amps);
}

}  // namespace wfusion
