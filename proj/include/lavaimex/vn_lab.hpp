#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "lavaimex/butcher.hpp"

namespace lavaimex {

/// Nondimensional inputs of the fully-discrete amplification factor:
/// Courant number a*dt/dx, reaction number chi*dt and phase k*dx.
struct AmplificationInput {
  double nu = 0.0;
  double phi = 0.0;
  double theta = 0.0;

  /// theta reduced to [0, 2*pi).
  double reduced_theta() const;
};

/// Courant number at which certificates and sweeps are evaluated by default.
inline constexpr double kReferenceCourant = 1.22;

struct StabilityCertificate {
  std::string pair_id;
  double max_abs_G = 0.0;      // over the default (phi, theta) sweep at the reference Courant
  double max_abs_G_lim = 0.0;  // over 720 theta points at the reference Courant
  std::array<double, 3> conditions{};  // the three space-time L-stability residuals
  double courant_bound = 0.0;
  bool space_time_L_stable = false;
};

std::complex<double> stage2_factor(const ButcherPair& pair, const AmplificationInput& in);
std::complex<double> stage3_factor(const ButcherPair& pair, const AmplificationInput& in);
std::complex<double> full_factor(const ButcherPair& pair, const AmplificationInput& in);

/// Limit of full_factor as phi -> infinity, in closed form.
std::complex<double> g_lim(const ButcherPair& pair, double nu, double theta);

/// Residuals (at21*at32, at21*(at32 - 2*a32) + 2*a31*gamma, at31*gamma).
std::array<double, 3> space_time_conditions(const ButcherPair& pair);
StabilityCertificate check_space_time_L_stability(const ButcherPair& pair);

/// Coefficient of the second-derivative term in the modified equation
/// (without the a^2 dt^2 chi factor). Must be >= 0 for chi > 0.
double diffusion_coefficient(double a32, double nu);

/// Largest |nu| keeping diffusion_coefficient non-negative. Throws
/// std::domain_error when the radicand is not positive.
double courant_bound(double a32);

/// a32 maximizing courant_bound: (sqrt2 - 1) / (2 (3 sqrt2 - 4)).
double optimal_a32();

/// Closed form of courant_bound(optimal_a32()).
double optimal_courant_bound();

std::vector<double> theta_grid(int points = 720);

/// 0 followed by a log-uniform sweep on [lo, hi] with `per_decade` points per decade.
std::vector<double> phi_grid(double lo = 1e-3, double hi = 1e6, int per_decade = 10);

struct SweepRow {
  double phi;
  double theta;
  std::complex<double> g;
};

std::vector<SweepRow> stability_sweep(const ButcherPair& pair, double nu, int theta_points = 720);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_certificate(std::ostream& out, const StabilityCertificate& cert);

}  // namespace lavaimex
