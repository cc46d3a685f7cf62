#include "doctest.h"

#include <cmath>

#include "loggas/asymcheck.hpp"
#include "loggas/errors.hpp"
#include "loggas/spectral.hpp"

using namespace loggas;

TEST_CASE("log-log fit") {
  SlopeFit exact = loglog_fit({8, 16, 32, 64}, {3.0 / 64, 3.0 / 256, 3.0 / 1024, 3.0 / 4096});
  CHECK(exact.slope == doctest::Approx(-2));
  CHECK(std::exp(exact.intercept) == doctest::Approx(3));
  CHECK(exact.residual < 1e-12);
  CHECK(exact.stderr_slope < 1e-12);
  SlopeFit two = loglog_fit({10, 20}, {1.0, 0.5});
  CHECK(two.slope == doctest::Approx(-1));
  CHECK_THROWS_AS(loglog_fit({8}, {1.0}), ValidationError);
  CHECK_THROWS_AS(loglog_fit({8, 16}, {1.0}), ValidationError);
  CHECK_THROWS_AS(loglog_fit({8, 16}, {1.0, 0.0}), ValidationError);
}

TEST_CASE("half-shift and Airy constants") {
  PrecisionScope ps(256);
  CHECK(abs(half_shift_v(8) - pow(Real(17) / 16, Real(-2) / 3)) < 1e-60);
  auto [s1, t1] = airy_constants(1);
  CHECK(abs(s1 - Real(5) / 72) < 1e-60);
  CHECK(abs(t1 + Real(7) / 72) < 1e-60);
  CHECK_THROWS_AS(airy_constants(0), ValidationError);
  // s_2 = Γ(6.5)/(54²·2·Γ(2.5)) = 385/10368
  auto [s2, t2] = airy_constants(2);
  CHECK(abs(s2 - Real(385) / 10368) < 1e-60);
  CHECK(abs(t2 + Real(13) / 11 * s2) < 1e-60);
}

TEST_CASE("expected slopes follow the phase of t") {
  const auto ctx = PrecisionContext::with_bits(128);
  PrecisionScope ps(ctx);
  auto interior = expected_gamma_slope(Complex(2), ctx);
  CHECK(interior.first == doctest::Approx(-2));
  CHECK(interior.second == doctest::Approx(0.3));
  auto crit = expected_gamma_slope(t_critical(ctx), ctx);
  CHECK(crit.first == doctest::Approx(-0.4));
  CHECK(crit.second == doctest::Approx(0.15));
  auto split = expected_gamma_slope(representative_t(GraphCase::BoundarySplit, false, ctx), ctx);
  CHECK(split.first == doctest::Approx(-1));
  CHECK_THROWS_AS(expected_gamma_slope(Complex(1, 2), ctx), ValidationError);
}

TEST_CASE("precision grows with N") {
  const auto base = PrecisionContext::with_bits(256);
  CHECK(precision_for(8, base).bits == 256);
  CHECK(precision_for(32, base).bits == 576);
  CHECK(precision_for(64, base).bits == 1088);
}

TEST_CASE("property: gamma errors quarter on doubling N in the interior") {
  const auto ctx = PrecisionContext::with_bits(256);
  PrecisionScope ps(ctx);
  AsymptoticReport rep = rate_gamma(Complex(3, 1), {16, 32, 64}, ctx);
  REQUIRE(rep.errors.size() == 3);
  for (std::size_t j = 1; j < rep.errors.size(); ++j) {
    const double ratio = rep.errors[j - 1] / rep.errors[j];
    CAPTURE(ratio);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
  }
  CHECK(rep.pass);
}

TEST_CASE("beta rates at t = 2") {
  const auto ctx = PrecisionContext::with_bits(256);
  PrecisionScope ps(ctx);
  BetaReports rep = rate_beta(Complex(2), {8, 16, 32}, ctx);
  CHECK(rep.raw.expected_slope == doctest::Approx(-1));
  CHECK(rep.shifted.expected_slope == doctest::Approx(-2));
  CHECK(std::abs(rep.raw.fitted_slope + 1) <= 0.3);
  CHECK(std::abs(rep.shifted.fitted_slope + 2) <= 0.3);
}

TEST_CASE("strong asymptotics at t = 2") {
  const auto ctx = PrecisionContext::with_bits(256);
  PrecisionScope ps(ctx);
  AsymptoticReport rep = strong_asymptotics_check(Complex(2), Complex(2, 2), {8, 16, 32}, ctx);
  REQUIRE(rep.errors.size() == 3);
  CHECK(rep.errors.back() <= 0.1);
  const double halving = rep.errors[1] / rep.errors[2];
  CHECK(halving >= 1.6);
  CHECK(halving <= 2.6);
  CHECK(on_cut_check(Complex(2), 32, 0.5, ctx) <= 0.1);
  // z too close to the support
  CHECK_THROWS_AS(strong_asymptotics_check(Complex(2), Complex(-1, 0.1), {8, 16}, ctx), ValidationError);
}

TEST_CASE("free-energy second differences") {
  const auto ctx = PrecisionContext::with_bits(256);
  PrecisionScope ps(ctx);
  AsymptoticReport rep = free_energy_check(Complex(2), {8, 16, 32}, 1e-3, ctx);
  CHECK(std::abs(rep.fitted_slope + 2) <= 0.5);
  CHECK(rep.pass);
  AsymptoticReport f0 = free_energy_check(Complex(2), {8, 16, 32}, 1e-3, ctx, true);
  REQUIRE(f0.errors.size() == 3);
  // the two targets differ by the second difference of F0 minus −1/(2x) = 1/2
  for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(f0.errors[j] - rep.errors[j]) <= 1e-6);
}

TEST_CASE("scaled polynomial matches direct evaluation") {
  PrecisionScope ps(128);
  // β = 0, γ² = 1/4 gives the monic Chebyshev polynomials of the second kind, U_n/2ⁿ
  std::vector<Complex> beta(6, Complex(0)), gamma2(6, Complex(Real(1) / 4));
  gamma2[0] = Complex(0);
  const Complex z(Real(0.3));
  Complex p = scaled_polynomial(beta, gamma2, 5, z, Complex(0));
  // U_5(x) = 32x⁵ − 32x³ + 6x
  const Real x = Real(0.3);
  const Real U5 = 32 * pow(x, 5) - 32 * pow(x, 3) + 6 * x;
  CHECK(abs(p - Complex(U5 / 32)) < 1e-30);
  Complex scaled = scaled_polynomial(beta, gamma2, 5, z, Complex(Real(0.1), Real(0.2)));
  CHECK(abs(scaled - Complex(U5 / 32) * exp(-5 * Complex(Real(0.1), Real(0.2)))) < 1e-30);
}
