#include "lavaimex/lava_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lavaimex/errors.hpp"

namespace lavaimex {

void PhysicsParams::validate() const {
  if (!(gravity >= 0.0)) throw ConfigError("physics.gravity must be non-negative");
  if (!(h_min > 0.0)) throw ConfigError("physics.h_min must be positive");
  if (!(lambda_cap > 0.0)) throw ConfigError("physics.lambda_cap must be positive");
  if (!(nu_r >= 0.0)) throw ConfigError("physics.nu_r must be non-negative");
  if (!std::isfinite(b_coeff) || !std::isfinite(T_r)) throw ConfigError("physics.b and physics.T_r must be finite");
}

bool is_wet(const State& s, double h_min) { return s.h >= h_min; }

Primitive primitive(const State& s, double h_min) {
  if (!is_wet(s, h_min)) return {};
  return {s.hu / s.h, s.hv / s.h, s.hT / s.h};
}

FluxTensor advective_flux(const State& s, double h_min) {
  if (!is_wet(s, h_min)) return {};
  const double u = s.hu / s.h, v = s.hv / s.h;
  return {{s.hu, s.hu * u, s.hv * u, s.hT * u}, {s.hv, s.hu * v, s.hv * v, s.hT * v}};
}

FluxTensor flux(const State& s, double gravity, double h_min) {
  FluxTensor f = advective_flux(s, h_min);
  if (!is_wet(s, h_min)) return f;
  const double p = 0.5 * gravity * s.h * s.h;
  f.x.hu += p;
  f.y.hv += p;
  return f;
}

double friction_lambda(double h, double T, const PhysicsParams& p) {
  if (!(h >= p.h_min)) throw std::domain_error("friction_lambda: dry state");
  const double lambda = 3.0 * p.nu_r / h * std::exp(-p.b_coeff * (T - p.T_r));
  return std::min(lambda, p.lambda_cap);
}

double logistic_cubed(double x) {
  auto f = [](double v) { return 3.7 * v * (1.0 - v); };
  return f(f(f(x)));
}

double chaotic_discharge(double t, double q0) {
  const double amplitude = logistic_cubed(q0);
  return std::max(0.0, amplitude * (0.5 + 0.5 * std::sin(4.0 * t)) * std::cos(12.0 * t));
}

double DischargeSpec::operator()(double t) const {
  switch (kind) {
    case Kind::Constant:
      return q0;
    case Kind::Chaotic:
      return chaotic_discharge(t, q0);
    case Kind::ChaoticNormalized:
      return std::max(0.0, q0 * logistic_cubed(seed) * (0.5 + 0.5 * std::sin(4.0 * t)) * std::cos(12.0 * t));
  }
  return 0.0;
}

double vent_density(const VentSpec& vent, double x, double y) {
  const double r2 = (x - vent.x) * (x - vent.x) + (y - vent.y) * (y - vent.y);
  return std::exp(-r2 / (2.0 * vent.sigma)) / (2.0 * std::numbers::pi * vent.sigma);
}

namespace {

// Integral of the unit 1D Gaussian (variance sigma, centred at c) over [a, b].
// Tails use erfc to avoid cancellation far from the centre.
double moment0(double a, double b, double c, double sigma) {
  const double s = std::sqrt(2.0 * sigma);
  const double alpha = (a - c) / s, beta = (b - c) / s;
  if (alpha > 0.0) return 0.5 * (std::erfc(alpha) - std::erfc(beta));
  if (beta < 0.0) return 0.5 * (std::erfc(-beta) - std::erfc(-alpha));
  return 0.5 * (std::erf(beta) - std::erf(alpha));
}

double gauss1d(double x, double c, double sigma) {
  if (std::isinf(x)) return 0.0;
  return std::exp(-(x - c) * (x - c) / (2.0 * sigma)) / std::sqrt(2.0 * std::numbers::pi * sigma);
}

// Integral of (x - c) times the 1D Gaussian over [a, b].
double moment1(double a, double b, double c, double sigma) {
  return -sigma * (gauss1d(b, c, sigma) - gauss1d(a, c, sigma));
}

// Integrals of the two 1D hat functions of [a, b] (left node, right node) against the Gaussian.
std::array<double, 2> hat_moments(double a, double b, double c, double sigma) {
  const double m0 = moment0(a, b, c, sigma);
  const double m1 = moment1(a, b, c, sigma);
  const double len = b - a;
  return {((b - c) * m0 - m1) / len, (m1 + (c - a) * m0) / len};
}

}  // namespace

double vent_cell_integral(const VentSpec& vent, double x_lo, double x_hi, double y_lo, double y_hi) {
  if (!(vent.sigma > 0.0)) throw ConfigError("vent sigma must be positive");
  return moment0(x_lo, x_hi, vent.x, vent.sigma) * moment0(y_lo, y_hi, vent.y, vent.sigma);
}

std::vector<double> vent_cell_weights(const VentSpec& vent, const Mesh2D& mesh) {
  std::vector<double> w(static_cast<std::size_t>(mesh.cell_count()));
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const auto [i, j] = mesh.cell_ij(c);
    const double xl = mesh.x0() + i * mesh.dx(), yl = mesh.y0() + j * mesh.dy();
    w[c] = vent_cell_integral(vent, xl, xl + mesh.dx(), yl, yl + mesh.dy()) / mesh.cell_area();
  }
  return w;
}

std::vector<double> vent_node_weights(const VentSpec& vent, const Mesh2D& mesh) {
  if (!(vent.sigma > 0.0)) throw ConfigError("vent sigma must be positive");
  std::vector<double> acc(static_cast<std::size_t>(mesh.node_count()), 0.0);
  // Precompute 1D hat moments per column and row of cells.
  std::vector<std::array<double, 2>> mx(static_cast<std::size_t>(mesh.nx())), my(static_cast<std::size_t>(mesh.ny()));
  for (int i = 0; i < mesh.nx(); ++i) {
    const double a = mesh.x0() + i * mesh.dx();
    mx[i] = hat_moments(a, a + mesh.dx(), vent.x, vent.sigma);
  }
  for (int j = 0; j < mesh.ny(); ++j) {
    const double a = mesh.y0() + j * mesh.dy();
    my[j] = hat_moments(a, a + mesh.dy(), vent.y, vent.sigma);
  }
  for (int n = 0; n < mesh.node_count(); ++n) {
    double sum = 0.0;
    for (const auto& [cell, slot] : mesh.cells_of_node(n)) {
      const auto [i, j] = mesh.cell_ij(cell);
      sum += mx[i][slot % 2] * my[j][slot / 2];
    }
    acc[n] = sum / mesh.lumped_mass(n);
  }
  return acc;
}

}  // namespace lavaimex
