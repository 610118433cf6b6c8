#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lavaimex/pc_wb.hpp"

using namespace lavaimex;

namespace {

constexpr double g = 9.81;

// Composite midpoint quadrature of the segment-path integral
// int_0^1 g h(s) dZ/ds ds n, with h and Z linear in s, halved to one side.
std::array<double, 2> path_integral(const EdgeState& e, int points = 10000) {
  double acc = 0.0;
  for (int k = 0; k < points; ++k) {
    const double s = (k + 0.5) / points;
    const double h = e.q_minus.h + s * (e.q_plus.h - e.q_minus.h);
    acc += g * h * (e.z_plus - e.z_minus) / points;
  }
  return {0.5 * acc * e.normal[0], 0.5 * acc * e.normal[1]};
}

}  // namespace

TEST_CASE("fluctuation examples") {
  EdgeState same{{1.3, 0.1, 0.2, 9.0}, {1.3, 0.1, 0.2, 9.0}, 0.4, 0.4, {0.6, 0.8}};
  CHECK(pc_fluctuation(same, g) == std::array<double, 2>{0.0, 0.0});

  EdgeState step{{1.0, 0, 0, 0}, {1.0, 0, 0, 0}, 0.0, 0.2, {1.0, 0.0}};
  const auto d = pc_fluctuation(step, g);
  CHECK(d[0] == doctest::Approx(0.981));
  CHECK(d[1] == 0.0);
}

TEST_CASE("conservation-sum relation") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0), ang(0.0, 6.283185307179586);
  for (int k = 0; k < 100; ++k) {
    const double a = ang(rng);
    EdgeState e{{u(rng), 0, 0, 0}, {u(rng), 0, 0, 0}, u(rng), u(rng), {std::cos(a), std::sin(a)}};
    EdgeState r{e.q_plus, e.q_minus, e.z_plus, e.z_minus, {-e.normal[0], -e.normal[1]}};
    const auto dm = pc_fluctuation(e, g), dp = pc_fluctuation(r, g);
    const double total = g * 0.5 * (e.q_minus.h + e.q_plus.h) * (e.z_plus - e.z_minus);
    CHECK(dm[0] + dp[0] == doctest::Approx(total * e.normal[0]).scale(1e-12));
    CHECK(dm[1] + dp[1] == doctest::Approx(total * e.normal[1]).scale(1e-12));

    EdgeState same{e.q_minus, e.q_minus, e.z_minus, e.z_minus, e.normal};
    CHECK(pc_fluctuation(same, g) == std::array<double, 2>{0.0, 0.0});

    const auto q = path_integral(e);
    CHECK(dm[0] == doctest::Approx(q[0]).epsilon(1e-12).scale(1e-12));
    CHECK(dm[1] == doctest::Approx(q[1]).epsilon(1e-12).scale(1e-12));
  }
}

TEST_CASE("dry-adjacent edges produce nothing") {
  EdgeState e{{1e-7, 0, 0, 0}, {1.0, 0, 0, 0}, 0.0, 1.0, {1.0, 0.0}};
  CHECK(pc_fluctuation(e, g, 1e-5) == std::array<double, 2>{0.0, 0.0});
  CHECK(pc_fluctuation(e, g, 0.0)[0] > 0.0);
}

TEST_CASE("node-averaged integrals") {
  const double dx = 0.3, dy = 0.7;
  CornerData flat{{1.0, 2.0, 3.0, 4.0}, {0.5, 0.5, 0.5, 0.5}};
  CHECK(wb_node_gradient_integral(flat, Direction::X, g, dx, dy) == 0.0);
  CHECK(wb_node_gradient_integral(flat, Direction::Y, g, dx, dy) == 0.0);

  // h = 1, Z = x.
  CornerData ramp{{1, 1, 1, 1}, {0.0, dx, 0.0, dx}};
  CHECK(wb_node_gradient_integral(ramp, Direction::X, g, dx, dy) == doctest::Approx(g * dx * dy));
  CHECK(wb_node_gradient_integral(ramp, Direction::Y, g, dx, dy) == 0.0);

  CornerData constant_h{{2, 2, 2, 2}, {0, 1, 2, 3}};
  CHECK(wb_pressure_integral(constant_h, Direction::X, g, dx, dy) == 0.0);

  // h = 1 + x on a unit cell: mean edge height 3/2, jump 1.
  CornerData lin{{1, 2, 1, 2}, {}};
  CHECK(wb_pressure_integral(lin, Direction::X, g, 1.0, 1.0) == doctest::Approx(g * 1.5 * 1.0));
  // Equals the exact integral of d(g h^2/2)/dx over the cell for bilinear h.
  CHECK(wb_pressure_integral(lin, Direction::X, g, 1.0, 1.0) == doctest::Approx(0.5 * g * (4.0 - 1.0)));
}

TEST_CASE("lake-at-rest cancellation on random corners") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> zu(-2.0, 2.0), su(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double zeta = 3.0 + su(rng);
    CornerData c;
    double hmax = 0.0;
    for (int i = 0; i < 4; ++i) {
      c.z[i] = zu(rng);
      c.h[i] = zeta - c.z[i];
      hmax = std::max(hmax, c.h[i]);
    }
    const double dx = 0.1 + su(rng), dy = 0.1 + su(rng);
    for (auto d : {Direction::X, Direction::Y}) {
      const double sum = wb_pressure_integral(c, d, g, dx, dy) + wb_node_gradient_integral(c, d, g, dx, dy);
      CHECK(std::abs(sum) <= 1e-13 * g * hmax * hmax * dx * dy);
    }
  }
}

TEST_CASE("free-surface form equals pressure plus bed slope") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    CornerData c;
    for (int i = 0; i < 4; ++i) {
      c.h[i] = u(rng);
      c.z[i] = u(rng);
    }
    for (Direction d : {Direction::X, Direction::Y}) {
      const double split = wb_pressure_integral(c, d, 9.81, 0.3, 0.7) + wb_node_gradient_integral(c, d, 9.81, 0.3, 0.7);
      CHECK(wb_surface_gradient_integral(c, d, 9.81, 0.3, 0.7) == doctest::Approx(split).epsilon(1e-12));
    }
  }
}

TEST_CASE("both fluctuations of a wet edge sum to g hbar times the bed jump") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int k = 0; k < 200; ++k) {
    const State qm{u(rng), 0.0, 0.0, 0.0}, qp{u(rng), 0.0, 0.0, 0.0};
    const double zm = u(rng), zp = u(rng);
    const EdgeState fwd{qm, qp, zm, zp, {0.6, 0.8}, 1.0};
    const EdgeState bwd{qp, qm, zp, zm, {-0.6, -0.8}, 1.0};
    const auto d1 = pc_fluctuation(fwd, 9.81), d2 = pc_fluctuation(bwd, 9.81);
    const double expected = 9.81 * 0.5 * (qm.h + qp.h) * (zp - zm);
    CHECK(d1[0] + d2[0] == doctest::Approx(expected * 0.6).epsilon(1e-12));
    CHECK(d1[1] + d2[1] == doctest::Approx(expected * 0.8).epsilon(1e-12));
  }
}
