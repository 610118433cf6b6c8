#include "lavaimex/vn_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "lavaimex/errors.hpp"

namespace lavaimex {

namespace {

using C = std::complex<double>;

constexpr double kConditionTol = 1e-14;

struct Coefficients {
  double a21, a31, a32;     // explicit
  double at21, at31, at32;  // implicit
  double g2, g3;            // implicit diagonal of stages 2 and 3
  std::array<double, 3> b;  // explicit weights (advection)
  std::array<double, 3> bt; // implicit weights (reaction)
};

Coefficients coefficients(const ButcherPair& pair) {
  const auto& ex = pair.explicit_part;
  const auto& im = pair.implicit_part;
  return {ex.a[1][0], ex.a[2][0], ex.a[2][1], im.a[1][0], im.a[2][0], im.a[2][1],
          im.a[1][1], im.a[2][2], ex.b,       im.b};
}

void guard(double denom) {
  if (denom == 0.0) throw std::domain_error("amplification factor: 1 + gamma*phi vanishes");
}

// Mode multipliers: e = exp(i theta) and its inverse.
struct Phase {
  C e;
  C em;
  explicit Phase(double theta) : e(std::polar(1.0, theta)), em(std::conj(e)) {}
};

C g2_impl(const Coefficients& k, const AmplificationInput& in, const Phase& p) {
  const double denom = 1.0 + k.g2 * in.phi;
  guard(denom);
  return ((1.0 - k.at21 * in.phi) * (1.0 + p.e) / 2.0 - k.a21 * in.nu * (p.e - 1.0)) / denom;
}

C g3_impl(const Coefficients& k, const AmplificationInput& in, const Phase& p, C g2) {
  const double denom = 1.0 + k.g3 * in.phi;
  guard(denom);
  const C sum_mid = g2 * (p.em + 1.0);   // q_{j-1/2} + q_{j+1/2}
  const C diff_mid = g2 * (p.em - 1.0);  // q_{j-1/2} - q_{j+1/2}
  const C central = (p.e - p.em) / 2.0;  // (q_{j+1} - q_{j-1}) / 2
  return (1.0 - k.at31 * in.phi - k.a31 * in.nu * central - k.at32 * in.phi * sum_mid / 2.0 +
          k.a32 * in.nu * diff_mid) /
         denom;
}

}  // namespace

double AmplificationInput::reduced_theta() const {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(theta, two_pi);
  if (r < 0.0) r += two_pi;
  return r;
}

C stage2_factor(const ButcherPair& pair, const AmplificationInput& in) {
  return g2_impl(coefficients(pair), in, Phase(in.theta));
}

C stage3_factor(const ButcherPair& pair, const AmplificationInput& in) {
  const auto k = coefficients(pair);
  const Phase p(in.theta);
  return g3_impl(k, in, p, g2_impl(k, in, p));
}

C full_factor(const ButcherPair& pair, const AmplificationInput& in) {
  const auto k = coefficients(pair);
  const Phase p(in.theta);
  const C g2 = g2_impl(k, in, p);
  const C g3 = g3_impl(k, in, p, g2);
  const C central = (p.e - p.em) / 2.0;
  const C sum_mid = g2 * (p.em + 1.0);
  const C diff_mid = g2 * (p.em - 1.0);
  // Stage 1 is q^n itself; stage 2 lives on midpoints, stage 3 on nodes.
  if (last_row_is_b(pair.implicit_part) && pair.explicit_part.a[2][2] == 0.0)
    return g3 - in.nu * ((k.b[0] - k.a31) * central + (k.b[1] - k.a32) * (-diff_mid) + k.b[2] * g3 * central);
  const C advect = k.b[0] * central + k.b[1] * (-diff_mid) + k.b[2] * g3 * central;
  const C react = k.bt[0] * 1.0 + k.bt[1] * sum_mid / 2.0 + k.bt[2] * g3;
  return 1.0 - in.nu * advect - in.phi * react;
}

C g_lim(const ButcherPair& pair, double nu, double theta) {
  const auto k = coefficients(pair);
  const double gamma = pair.gamma();
  if (!(gamma > 0.0)) throw std::domain_error("g_lim: gamma must be positive");
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  const C imag_part(0.0, gamma * nu * sn *
                             (k.at21 * (k.at32 - 2.0 * k.a32) - k.at21 * k.at32 * cs + 2.0 * k.a31 * gamma));
  const double real_part = k.at21 * k.at32 * cs + k.at21 * k.at32 - 2.0 * k.at31 * gamma;
  return (imag_part + real_part) / (2.0 * gamma * gamma);
}

std::array<double, 3> space_time_conditions(const ButcherPair& pair) {
  const auto k = coefficients(pair);
  const double gamma = pair.gamma();
  return {k.at21 * k.at32, k.at21 * (k.at32 - 2.0 * k.a32) + 2.0 * k.a31 * gamma, k.at31 * gamma};
}

StabilityCertificate check_space_time_L_stability(const ButcherPair& pair) {
  StabilityCertificate cert;
  cert.pair_id = pair.name;
  cert.conditions = space_time_conditions(pair);
  cert.space_time_L_stable = std::all_of(cert.conditions.begin(), cert.conditions.end(),
                                         [](double r) { return std::abs(r) < kConditionTol; });
  for (double theta : theta_grid())
    cert.max_abs_G_lim = std::max(cert.max_abs_G_lim, std::abs(g_lim(pair, kReferenceCourant, theta)));
  for (const auto& row : stability_sweep(pair, kReferenceCourant))
    cert.max_abs_G = std::max(cert.max_abs_G, std::abs(row.g));
  cert.courant_bound = courant_bound(pair.explicit_part.a[2][1]);
  return cert;
}

double diffusion_coefficient(double a32, double nu) {
  const double s2 = std::numbers::sqrt2;
  return (2.0 - 3.0 / s2) * a32 * a32 - (0.5 - s2 / 2.0) * a32 +
         (0.5 - s2 / 2.0 + 1.0 / (4.0 * s2 * nu * nu));
}

double courant_bound(double a32) {
  const double s2 = std::numbers::sqrt2;
  const double radicand = (3.0 * s2 - 4.0) * a32 * a32 + (1.0 - s2) * a32 + (s2 - 1.0);
  if (!(radicand > 0.0)) throw std::domain_error("courant_bound: non-positive radicand");
  return std::pow(2.0, -0.75) / std::sqrt(radicand);
}

double optimal_a32() {
  const double s2 = std::numbers::sqrt2;
  return (s2 - 1.0) / (2.0 * (3.0 * s2 - 4.0));
}

double optimal_courant_bound() {
  const double s2 = std::numbers::sqrt2;
  return std::sqrt(2.0 * (17.0 * s2 - 24.0) / (215.0 * s2 - 304.0));
}

std::vector<double> theta_grid(int points) {
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = 2.0 * std::numbers::pi * i / points;
  return out;
}

std::vector<double> phi_grid(double lo, double hi, int per_decade) {
  std::vector<double> out{0.0};
  const double l0 = std::log10(lo);
  const int n = static_cast<int>(std::lround((std::log10(hi) - l0) * per_decade));
  for (int i = 0; i <= n; ++i) out.push_back(std::pow(10.0, l0 + static_cast<double>(i) / per_decade));
  return out;
}

std::vector<SweepRow> stability_sweep(const ButcherPair& pair, double nu, int theta_points) {
  const auto thetas = theta_grid(theta_points);
  std::vector<SweepRow> rows;
  for (double phi : phi_grid())
    for (double theta : thetas) rows.push_back({phi, theta, full_factor(pair, {nu, phi, theta})});
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  const auto old = out.precision(17);
  out << "phi,theta,abs_G,re_G,im_G\n";
  for (const auto& r : rows)
    out << r.phi << ',' << r.theta << ',' << std::abs(r.g) << ',' << r.g.real() << ',' << r.g.imag() << '\n';
  out.precision(old);
}

void write_certificate(std::ostream& out, const StabilityCertificate& cert) {
  const auto old = out.precision(17);
  out << "pair = " << cert.pair_id << '\n'
      << "eq_condition.at21_at32 = " << cert.conditions[0] << '\n'
      << "eq_condition.at21_at32m2a32_p_2a31g = " << cert.conditions[1] << '\n'
      << "eq_condition.at31_g = " << cert.conditions[2] << '\n'
      << "space_time_L_stable = " << (cert.space_time_L_stable ? "yes" : "no") << '\n'
      << "reference_courant = " << kReferenceCourant << '\n'
      << "max_abs_G = " << cert.max_abs_G << '\n'
      << "max_abs_G_lim = " << cert.max_abs_G_lim << '\n'
      << "courant_bound = " << cert.courant_bound << '\n';
  out.precision(old);
}

}  // namespace lavaimex
