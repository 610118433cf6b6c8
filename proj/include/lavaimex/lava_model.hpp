#pragma once

#include <vector>

#include "lavaimex/mesh2d.hpp"

namespace lavaimex {

struct PhysicsParams {
  double gravity = 9.81;
  double nu_r = 0.0;     // reference kinematic viscosity [m^2/s]
  double b_coeff = 0.0;  // viscosity-temperature coefficient [1/K]
  double T_r = 0.0;      // reference temperature [K]
  double h_min = 1e-5;   // wet threshold [m]
  double lambda_cap = 1e8;

  /// Throws ConfigError on non-physical values.
  void validate() const;
};

/// Flux columns F_x and F_y of the conserved vector.
struct FluxTensor {
  State x;
  State y;
};

/// Primitive velocities and temperature; zero for dry states.
struct Primitive {
  double u = 0.0;
  double v = 0.0;
  double T = 0.0;
};

bool is_wet(const State& s, double h_min);
Primitive primitive(const State& s, double h_min);

/// Full physical flux including the hydrostatic pressure g h^2 / 2.
FluxTensor flux(const State& s, double gravity, double h_min);

/// Flux without the pressure block (the pressure is discretized together
/// with the topography term to keep lake-at-rest states exact).
FluxTensor advective_flux(const State& s, double h_min);

/// min(3 nu_r / h * exp(-b (T - T_r)), lambda_cap). Throws std::domain_error for dry h.
double friction_lambda(double h, double T, const PhysicsParams& p);

/// f(x) = 3.7 x (1 - x) applied three times.
double logistic_cubed(double x);

/// max(0, f(f(f(Q0))) (1/2 + sin(4t)/2) cos(12t)).
double chaotic_discharge(double t, double q0);

struct DischargeSpec {
  enum class Kind { Constant, Chaotic, ChaoticNormalized };
  Kind kind = Kind::Constant;
  double q0 = 0.0;     // m^3/s
  double seed = 0.5;   // logistic start value of the normalized variant

  /// Discharge at time t (never negative).
  double operator()(double t) const;
};

struct VentSpec {
  double x = 0.0;
  double y = 0.0;
  double sigma = 0.1;  // Gaussian spread [m^2]
  DischargeSpec discharge;
  double T_e = 0.0;    // effusion temperature [K]
};

/// f_v(r) = exp(-r^2 / (2 sigma)) / (2 pi sigma).
double vent_density(const VentSpec& vent, double x, double y);

/// Exact integral of f_v over [x_lo, x_hi] x [y_lo, y_hi] (infinite bounds allowed).
double vent_cell_integral(const VentSpec& vent, double x_lo, double x_hi, double y_lo, double y_hi);

/// Cell-averaged density: integral over the cell divided by its area.
std::vector<double> vent_cell_weights(const VentSpec& vent, const Mesh2D& mesh);

/// Lumped L2 projection onto the bilinear basis: sum over cells of the exact
/// integral of f_v times the nodal hat function, divided by the lumped mass.
std::vector<double> vent_node_weights(const VentSpec& vent, const Mesh2D& mesh);

}  // namespace lavaimex
