#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <string>
#include <string_view>

namespace lavaimex {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

/// One Butcher tableau of a 3-stage Runge-Kutta method. Rows of `a` are
/// stages; the explicit part is strictly lower-triangular and the implicit
/// part is an ESDIRK (zero first diagonal entry, constant diagonal after).
struct Tableau {
  static constexpr int stage_count = 3;

  Mat3 a{};
  Vec3 b{};
  Vec3 c{};

  friend bool operator==(const Tableau&, const Tableau&) = default;
};

/// Explicit/implicit tableau pair of an IMEX-RK scheme.
struct ButcherPair {
  std::string name;
  Tableau explicit_part;
  Tableau implicit_part;

  /// Diagonal coefficient of the implicit part.
  double gamma() const noexcept { return implicit_part.a[1][1]; }
};

enum class PairId { CEqCTilde, MaxNu };

/// Residuals of the four second-order order/coupling conditions:
/// sum b_i c_i, sum bt_i ct_i, sum bt_i c_i, sum b_i ct_i (each minus 1/2).
struct ConditionReport {
  std::array<double, 4> residuals{};
  bool satisfied = false;
};

struct DaeResult {
  double value = 0.0;     // bhat^T Ahat^{-1} chat
  bool singular = false;  // Ahat not invertible
  bool satisfied = false;
};

bool check_first_order(const ButcherPair& pair);
bool check_compatibility(const Tableau& t);
ConditionReport check_second_order_coupling(const ButcherPair& pair);

/// y^4 coefficient of the E-polynomial of the ESDIRK family,
/// 4g^3 - 5g^2 + 2g - 1/4. Non-negative iff the implicit part is I-stable.
double e_polynomial_coefficient(double gamma);

/// R(z) = 1 + z b^T (I - zA)^{-1} 1. Throws SingularMatrixError at a pole.
std::complex<double> stability_function(const Tableau& t, std::complex<double> z);

bool check_stiff_accuracy(const Tableau& t);

/// True when b equals the last row of a bit for bit. The final update can
/// then be written as the last stage plus explicit corrections, which avoids
/// cancelling O(1) stiff terms against each other.
bool last_row_is_b(const Tableau& t);
DaeResult check_dae_condition(const Tableau& t);

/// Residual of -a21*sqrt(2) - a32*(2 - sqrt(2)) + 1, the relation tying the
/// explicit coefficients once the implicit part is fixed by space-time
/// L-stability.
double supplementary_relation_residual(const Tableau& explicit_part);

double first_order_residual(const Tableau& t);
double compatibility_residual(const Tableau& t);

ButcherPair canonical_pair(PairId which);

/// Parses "MAX_NU" / "C_EQ_CTILDE" (case-insensitive, '-' accepted for '_').
/// Throws ConfigError for anything else.
PairId parse_pair_id(std::string_view name);
std::string_view pair_id_name(PairId id);

/// Plain-text tableau pair: explicit block then implicit block, each with
/// three rows of `a`, one row `b`, one row `c`. '#' starts a comment.
ButcherPair read_pair(std::istream& in, std::string name = "file");
ButcherPair load_pair(const std::string& path);
void write_pair(std::ostream& out, const ButcherPair& pair);

/// Canonical name or path to a tableau file.
ButcherPair resolve_pair(const std::string& name_or_path);

/// Every algebraic condition of the IMEX family evaluated at once.
struct PairReport {
  double first_order_explicit = 0.0;
  double first_order_implicit = 0.0;
  double compatibility_explicit = 0.0;
  double compatibility_implicit = 0.0;
  ConditionReport coupling;
  bool stiffly_accurate = false;
  DaeResult dae;
  bool weights_equal = false;
  bool structure_ok = false;
  double e_polynomial = 0.0;
  double supplementary_residual = 0.0;

  bool first_order() const;
  bool compatibility() const;
  bool i_stable() const { return e_polynomial >= 0.0; }
  bool all_pass() const;
};

PairReport analyze_pair(const ButcherPair& pair);
void write_report(std::ostream& out, const ButcherPair& pair, const PairReport& report);

}  // namespace lavaimex
