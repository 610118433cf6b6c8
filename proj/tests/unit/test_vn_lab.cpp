#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "lavaimex/butcher.hpp"
#include "lavaimex/vn_lab.hpp"

using namespace lavaimex;
using C = std::complex<double>;

namespace {

const double kSqrt2 = std::sqrt(2.0);

struct ModeRatios {
  C stage2, stage3, full;
};

// Evolves exp(i k x_j) on an n-cell periodic grid through the three staggered
// stages written out directly as stencils, and returns the observed ratios.
// Midpoint j stores q_{j+1/2}.
ModeRatios evolve_mode(const ButcherPair& p, double nu, double phi, int wave, int n = 64) {
  const auto& e = p.explicit_part.a;
  const auto& t = p.implicit_part.a;
  const double g = p.gamma();
  const double theta = 2.0 * std::numbers::pi * wave / n;
  std::vector<C> q(n), mid(n), s3(n);
  for (int j = 0; j < n; ++j) q[j] = std::polar(1.0, theta * j);
  auto at = [n](const std::vector<C>& v, int j) { return v[((j % n) + n) % n]; };
  for (int j = 0; j < n; ++j)
    mid[j] = ((1 - t[1][0] * phi) * (at(q, j) + at(q, j + 1)) / 2.0 -
              e[1][0] * nu * (at(q, j + 1) - at(q, j))) /
             (1 + g * phi);
  for (int j = 0; j < n; ++j) {
    const C ml = at(mid, j - 1), mr = at(mid, j);
    s3[j] = (q[j] - t[2][0] * phi * q[j] - t[2][1] * phi * (ml + mr) / 2.0 -
             e[2][0] * nu * (at(q, j + 1) - at(q, j - 1)) / 2.0 + e[2][1] * nu * (ml - mr)) /
            (1 + g * phi);
  }
  const auto& b = p.implicit_part.b;
  const int j = n / 3;
  const C ml = at(mid, j - 1), mr = at(mid, j);
  const C next = q[j] - b[0] * (phi * q[j] + nu * (at(q, j + 1) - at(q, j - 1)) / 2.0) -
                 b[1] * (phi * (ml + mr) / 2.0 - nu * (ml - mr)) -
                 b[2] * (phi * s3[j] + nu * (at(s3, j + 1) - at(s3, j - 1)) / 2.0);
  return {mid[j] / q[j], s3[j] / q[j], next / q[j]};
}

double theta_of(int wave, int n = 64) { return 2.0 * std::numbers::pi * wave / n; }

}  // namespace

TEST_CASE("stage 2 factor") {
  const auto p = canonical_pair(PairId::MaxNu);
  CHECK(std::abs(stage2_factor(p, {0, 0, 0}) - 1.0) < 1e-15);
  CHECK(std::abs(stage2_factor(p, {0, 0, std::numbers::pi})) < 1e-15);
  // theta = pi/2 is wave 16 of 64.
  const auto oracle = evolve_mode(p, 1.0, 1.0, 16);
  CHECK(std::abs(stage2_factor(p, {1.0, 1.0, theta_of(16)}) - oracle.stage2) < 1e-13);
}

TEST_CASE("stage 3 factor") {
  const auto p3 = canonical_pair(PairId::MaxNu);
  for (double th : {0.0, 1.0, 2.5}) CHECK(std::abs(stage3_factor(p3, {0, 0, th}) - 1.0) < 1e-15);
  CHECK(std::abs(stage3_factor(p3, {0.7, 1e8, std::numbers::pi / 3})) < 1e-6);

  const auto p2 = canonical_pair(PairId::CEqCTilde);
  // theta = 1 is not a grid wave number; use the nearest representable one and compare there.
  for (int wave : {5, 10, 11}) {
    const auto oracle = evolve_mode(p2, 0.5, 2.0, wave);
    CHECK(std::abs(stage3_factor(p2, {0.5, 2.0, theta_of(wave)}) - oracle.stage3) < 1e-12);
  }
}

TEST_CASE("full factor matches single-mode evolution") {
  const auto p = canonical_pair(PairId::MaxNu);
  for (double th : {0.0, 1.3, 4.0}) CHECK(std::abs(full_factor(p, {0, 0, th}) - 1.0) < 1e-15);
  const int wave = 20;  // theta close to 2.0
  const auto oracle = evolve_mode(p, 1.0, 10.0, wave);
  CHECK(std::abs(full_factor(p, {1.0, 10.0, theta_of(wave)}) - oracle.full) < 1e-12);

  std::mt19937_64 rng(20261018);
  std::uniform_real_distribution<double> nu_d(-1.22, 1.22), phi_d(0.0, 1e3);
  std::uniform_int_distribution<int> wave_d(0, 63);
  for (const auto id : {PairId::MaxNu, PairId::CEqCTilde}) {
    const auto pair = canonical_pair(id);
    for (int i = 0; i < 100; ++i) {
      const double nu = nu_d(rng), phi = phi_d(rng);
      const int w = wave_d(rng);
      const C expect = evolve_mode(pair, nu, phi, w).full;
      const C got = full_factor(pair, {nu, phi, theta_of(w)});
      CHECK(std::abs(got - expect) <= 1e-11 * std::max(std::abs(expect), 1e-3));
    }
  }
}

TEST_CASE("bounded modulus for pure advection at the reference Courant") {
  for (const auto id : {PairId::MaxNu, PairId::CEqCTilde}) {
    const auto p = canonical_pair(id);
    double worst = 0.0;
    for (double th : theta_grid()) worst = std::max(worst, std::abs(full_factor(p, {1.22, 0.0, th})));
    if (id == PairId::MaxNu) CHECK(worst <= 1.0 + 1e-12);
    CHECK(worst > 0.9);
  }
}

TEST_CASE("damping for every reaction number") {
  const auto p = canonical_pair(PairId::MaxNu);
  for (double nu : {0.3, 0.8, 1.2})
    for (double th : {0.4, 1.6, 3.0})
      for (double phi : phi_grid()) CHECK(std::abs(full_factor(p, {nu, phi, th})) <= 1.0 + 1e-12);
}

TEST_CASE("limit amplification") {
  for (const auto id : {PairId::MaxNu, PairId::CEqCTilde}) {
    const auto p = canonical_pair(id);
    for (double th : {0.0, 0.9, 2.2, 5.0}) {
      CHECK(g_lim(p, 1.1, th) == C(0.0));
      CHECK(std::abs(full_factor(p, {1.1, 1e9, th})) < 1e-7);
    }
  }
  ButcherPair toy;
  toy.implicit_part.a[1][1] = 0.5;
  toy.implicit_part.a[2][2] = 0.5;
  toy.implicit_part.a[2][0] = 0.1;
  const C v = g_lim(toy, 0.8, 1.234);
  CHECK(v.real() == doctest::Approx(-0.2));
  CHECK(v.imag() == doctest::Approx(0.0));
}

TEST_CASE("convergence toward the limit factor is first order in 1/phi") {
  // Companion pair with non-zero limit so the decay rate is observable.
  auto p = canonical_pair(PairId::MaxNu);
  p.implicit_part.a[1][0] = 0.1;
  p.implicit_part.a[1][1] = p.gamma();
  const double nu = 0.9, th = 1.1;
  std::vector<double> gaps;
  for (double phi : {1e3, 1e4, 1e5}) gaps.push_back(std::abs(full_factor(p, {nu, phi, th}) - g_lim(p, nu, th)));
  for (std::size_t i = 1; i < gaps.size(); ++i) {
    const double slope = std::log10(gaps[i - 1] / gaps[i]);
    CHECK(slope >= 0.9);
  }
  CHECK(gaps.back() * 1e5 < 10.0);
}

TEST_CASE("space-time L-stability certificate") {
  for (const auto id : {PairId::MaxNu, PairId::CEqCTilde}) {
    const auto cert = check_space_time_L_stability(canonical_pair(id));
    CHECK(cert.space_time_L_stable);
    for (double r : cert.conditions) CHECK(r == 0.0);
    CHECK(cert.max_abs_G_lim == 0.0);
    CHECK(cert.courant_bound > 0.0);
  }
  auto companion = canonical_pair(PairId::MaxNu);
  companion.implicit_part.a[1][0] = companion.gamma();
  const auto cert = check_space_time_L_stability(companion);
  CHECK_FALSE(cert.space_time_L_stable);
  CHECK(cert.conditions[0] == doctest::Approx(companion.gamma() * kSqrt2 / 2.0));
}

TEST_CASE("modified-equation diffusion and Courant bound") {
  const double a_opt = (kSqrt2 - 1.0) / (2.0 * (3.0 * kSqrt2 - 4.0));
  CHECK(optimal_a32() == doctest::Approx(a_opt).epsilon(1e-15));
  CHECK(optimal_a32() == doctest::Approx(0.8535534).epsilon(1e-7));
  CHECK(std::abs(diffusion_coefficient(a_opt, courant_bound(a_opt))) < 1e-12);

  const double direct = (2 - 3 / kSqrt2) - (0.5 - kSqrt2 / 2) + (0.5 - kSqrt2 / 2 + 1 / (4 * kSqrt2 * 0.25));
  CHECK(diffusion_coefficient(1.0, 0.5) == doctest::Approx(direct).epsilon(1e-15));
  CHECK(diffusion_coefficient(0.0, 1e9) == doctest::Approx(0.5 - kSqrt2 / 2).epsilon(1e-12));

  CHECK(courant_bound(a_opt) == doctest::Approx(1.2202).epsilon(1e-4));
  CHECK(std::abs(courant_bound(a_opt) -
                 std::sqrt(2 * (17 * kSqrt2 - 24) / (215 * kSqrt2 - 304))) < 1e-12);
  CHECK(std::abs(optimal_courant_bound() - courant_bound(a_opt)) < 1e-12);
  CHECK(courant_bound(1.0) < courant_bound(a_opt));
  CHECK(courant_bound(0.0) == doctest::Approx(std::pow(2.0, -0.75) / std::sqrt(kSqrt2 - 1)).epsilon(1e-15));
  CHECK(courant_bound(0.0) == doctest::Approx(0.9240).epsilon(1e-4));

  const double best = courant_bound(optimal_a32());
  for (int i = 0; i <= 2000; ++i) CHECK(courant_bound(2.0 * i / 2000.0) <= best + 1e-15);

  // The relation tying a21 to a32 gives sqrt(2)/4 at the optimum.
  const double a21 = (1.0 - a_opt * (2.0 - kSqrt2)) / kSqrt2;
  CHECK(a21 == doctest::Approx(kSqrt2 / 4.0).epsilon(1e-15));
}

TEST_CASE("grids") {
  const auto th = theta_grid();
  CHECK(th.size() == 720);
  CHECK(th.front() == 0.0);
  CHECK(th.back() < 2.0 * std::numbers::pi);
  const auto ph = phi_grid();
  CHECK(ph.size() == 92);
  CHECK(ph[1] == doctest::Approx(1e-3));
  CHECK(ph.back() == doctest::Approx(1e6));
  AmplificationInput in{1.0, 0.0, -0.5};
  CHECK(in.reduced_theta() == doctest::Approx(2.0 * std::numbers::pi - 0.5));
}
