#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "wfusion/cavity.hpp"

using wfusion::cxd;
using wfusion::SquareOperator;
using namespace wfusion::cavity;

namespace {

constexpr double kPi = std::numbers::pi;

double max_entry_diff(const SquareOperator& a, const SquareOperator& b) {
  double worst = 0.0;
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j)
      worst = std::max(worst, std::abs(a.at(i, j) - b.at(i, j)));
  return worst;
}

}  // namespace

TEST_CASE("lambda is g^2 over delta") {
  CavityParams p;
  p.g = 2.0 * kPi * 24e3;
  p.delta = 10.0 * p.g;
  CHECK(lambda_from(p).lambda ==
        doctest::Approx(2.0 * kPi * 2400.0).epsilon(1e-12));
  CHECK(p.dispersive_regime());

  CavityParams unit{1.0, 1.0, 3};
  CHECK(lambda_from(unit).lambda == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_FALSE(unit.dispersive_regime());

  CavityParams doubled{2.0, 1.0, 3};
  CHECK(lambda_from(doubled).lambda == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("invalid cavity parameters are rejected") {
  CHECK_THROWS_AS(lambda_from(CavityParams{0.0, 1.0, 3}), std::invalid_argument);
  CHECK_THROWS_AS(lambda_from(CavityParams{1.0, -1.0, 3}), std::invalid_argument);
  CHECK_THROWS_AS(lambda_from(CavityParams{1.0, 1.0, 2}), std::invalid_argument);
}

TEST_CASE("evolution coefficients at the design angles") {
  {
    const auto c = coeff_ab(0.0);
    CHECK(std::abs(c.a) == 0.0);
    CHECK(c.b == cxd{1.0});
  }
  {
    const auto c = coeff_ab(magic_time());
    CHECK(std::abs(c.a) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-13));
    CHECK(std::abs(c.b) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-13));
    CHECK(std::arg(c.a) == doctest::Approx(-5.0 * kPi / 6.0).epsilon(1e-13));
  }
  {
    // full revival after one exchange period
    const auto c = coeff_ab(2.0 * kPi / 3.0);
    CHECK(std::abs(c.a) < 1e-15);
    CHECK(std::abs(c.b - 1.0) < 1e-15);
  }
}

TEST_CASE("coefficient identities hold at arbitrary angles") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  for (int i = 0; i < 50; ++i) {
    const double lt = u(rng);
    const auto c = coeff_ab(lt);
    CHECK(std::abs(c.b - c.a - 1.0) < 1e-15);
    CHECK(std::abs(c.b + 2.0 * c.a - c.phase_three_exc) < 1e-12);
    CHECK(std::abs(c.phase_two_exc - std::exp(cxd(0.0, -lt))) < 1e-15);
  }
}

TEST_CASE("magic time value and derived physical time") {
  CHECK(magic_time() == doctest::Approx(0.6981317007977318).epsilon(1e-15));
  CavityParams p{2.0 * kPi * 24e3, 2.0 * kPi * 240e3, 3};
  // (2 pi / 9) / (2 pi 2400) = 1/21600 s
  CHECK(lambda_from(p).time_for(magic_time()) ==
        doctest::Approx(1.0 / 21600.0).epsilon(1e-12));
}

TEST_CASE("effective Hamiltonian diagonal and block structure") {
  const SquareOperator h = build_effective_hamiltonian();
  CHECK(h.hermitian);
  CHECK(h.hermiticity_violation() == 0.0);
  CHECK(std::abs(h.at(0, 0)) == 0.0);
  CHECK(h.at(7, 7) == cxd{3.0});
  // excitation number is conserved: no entries between sectors
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      if (std::popcount(unsigned(i)) != std::popcount(unsigned(j)))
        CHECK(h.at(i, j) == cxd{});
  // one-excitation block is the all-ones exchange matrix
  const int one_exc[] = {1, 2, 4};
  for (int i : one_exc)
    for (int j : one_exc) CHECK(h.at(i, j) == cxd{1.0});

  const auto es = wfusion::eigh(h);
  const std::vector<double> expect{0.0, 0.0, 0.0, 1.0, 1.0, 3.0, 3.0, 4.0};
  for (int i = 0; i < 8; ++i) CHECK(std::abs(es.values[i] - expect[i]) < 1e-12);
}

TEST_CASE("triple excitation only picks up the collective phase") {
  const double lt = 0.77;
  const SquareOperator u =
      wfusion::matrix_exponential(build_effective_hamiltonian(), lt);
  CHECK(std::abs(u.at(7, 7) - std::exp(cxd(0.0, -3.0 * lt))) < 1e-12);
  for (int i = 0; i < 7; ++i) CHECK(std::abs(u.at(i, 7)) < 1e-12);
}

TEST_CASE("closed-form propagator columns follow the stay/hop pattern") {
  const double lt = 0.52;
  const SquareOperator u = effective_propagator(lt);
  const auto c = coeff_ab(lt);

  CHECK(max_entry_diff(effective_propagator(0.0), SquareOperator::identity(8)) <
        1e-15);

  // |e g g> -> b stays, a hops to either other atom
  CHECK(u.at(1, 1) == c.b);
  CHECK(u.at(2, 1) == c.a);
  CHECK(u.at(4, 1) == c.a);
  // |e e g> -> e^{-i lt} (b stays, a hops the hole)
  CHECK(std::abs(u.at(3, 3) - c.phase_two_exc * c.b) < 1e-15);
  CHECK(std::abs(u.at(5, 3) - c.phase_two_exc * c.a) < 1e-15);
  CHECK(std::abs(u.at(6, 3) - c.phase_two_exc * c.a) < 1e-15);
  // excitation-preserving block structure is exact
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      if (std::popcount(unsigned(i)) != std::popcount(unsigned(j)))
        CHECK(u.at(i, j) == cxd{});
}

TEST_CASE("closed-form propagator equals the matrix exponential") {
  const SquareOperator h = build_effective_hamiltonian();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(0.0, 2.0 * kPi);
  for (int i = 0; i < 25; ++i) {
    const double lt = dist(rng);
    CHECK(max_entry_diff(effective_propagator(lt),
                         wfusion::matrix_exponential(h, lt)) < 1e-12);
  }
}

TEST_CASE("full Hamiltonian matrix elements and conservation law") {
  CavityParams p{1.0, 10.0, 3};
  const double t = 0.37;
  const SquareOperator h = build_full_hamiltonian(p, t);
  CHECK(h.dim == 32);
  CHECK(h.hermitian);
  CHECK(h.hermiticity_violation() < 1e-15);
  for (int i = 0; i < h.dim; ++i) CHECK(h.at(i, i) == cxd{});

  // <ggg;1| H |egg;0> = g e^{-i delta t}
  CHECK(std::abs(h.at(8, 1) - std::exp(cxd(0.0, -p.delta * t))) < 1e-15);
  // photon emission from |egg;1> into n=2 carries sqrt(2)
  CHECK(std::abs(h.at(16, 9) - std::sqrt(2.0) * std::exp(cxd(0.0, -p.delta * t))) <
        1e-15);

  // [H, N_total] = 0 with N = atomic excitations + photon number
  SquareOperator n_tot(32, true);
  for (int b = 0; b < 8; ++b)
    for (int n = 0; n <= 3; ++n)
      n_tot.at(b + 8 * n, b + 8 * n) =
          static_cast<double>(std::popcount(unsigned(b)) + n);
  const SquareOperator comm_a = h * n_tot;
  const SquareOperator comm_b = n_tot * h;
  CHECK(max_entry_diff(comm_a, comm_b) < 1e-12);
}

TEST_CASE("integrated full dynamics conserves total excitation") {
  CavityParams p{1.0, 5.0, 3};
  const double t_final = 2.0;
  const double dt = (2.0 * kPi / p.delta) / 256.0;
  auto h = [&p](double t) { return build_full_hamiltonian(p, t); };
  // |e e g> (x) |0>: two excitations split between atoms and photons
  const auto psi = wfusion::integrate_schrodinger(
      h, wfusion::StateVector::basis(32, 3), t_final, dt);
  double expectation = 0.0;
  for (int b = 0; b < 8; ++b)
    for (int n = 0; n <= 3; ++n)
      expectation += std::norm(psi.amps[b + 8 * n]) *
                     (std::popcount(unsigned(b)) + n);
  CHECK(expectation == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("dispersive error shrinks as the detuning ratio grows") {
  const int divisor = 128;  // coarse but converged to ~1e-7 here
  CavityParams p5{1.0, 5.0, 3};
  CavityParams p10{1.0, 10.0, 3};
  const DispersiveError e5 = dispersive_error(p5, magic_time(), divisor);
  const DispersiveError e10 = dispersive_error(p10, magic_time(), divisor);
  CHECK(e10.photon_leakage < e5.photon_leakage);
  CHECK(1.0 - e10.atomic_fidelity < 1.0 - e5.atomic_fidelity);
  CHECK(e5.photon_leakage > 0.0);
  CHECK(e5.atomic_fidelity < 1.0);
}

TEST_CASE("dispersive error regression anchor at the operating point") {
  CavityParams p{1.0, 10.0, 3};
  const DispersiveError e = dispersive_error(p, magic_time());
  // frozen from this integrator at the default step divisor
  CHECK(e.atomic_fidelity == doctest::Approx(0.999053345784747).epsilon(1e-9));
  CHECK(e.photon_leakage == doctest::Approx(0.0578065830380317).epsilon(1e-7));
}

TEST_CASE("dispersive error input validation") {
  CHECK_THROWS_AS(dispersive_error(CavityParams{0.0, 1.0, 3}, magic_time()),
                  std::invalid_argument);
  CHECK_THROWS_AS(dispersive_error(CavityParams{1.0, 10.0, 3}, -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(dispersive_error(CavityParams{1.0, 10.0, 3}, magic_time(), 2),
                  std::invalid_argument);
}
