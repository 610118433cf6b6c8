#include "lavaimex/butcher.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "lavaimex/errors.hpp"

namespace lavaimex {

namespace {

constexpr double kStructureTol = 1e-14;
constexpr double kCouplingTol = 1e-13;
constexpr double kDaeTol = 1e-13;

double sum(const Vec3& v) { return v[0] + v[1] + v[2]; }

double dot(const Vec3& x, const Vec3& y) { return x[0] * y[0] + x[1] * y[1] + x[2] * y[2]; }

bool strictly_lower(const Tableau& t) {
  for (int l = 0; l < 3; ++l)
    for (int m = l; m < 3; ++m)
      if (t.a[l][m] != 0.0) return false;
  return true;
}

bool esdirk(const Tableau& t) {
  for (int l = 0; l < 3; ++l)
    for (int m = l + 1; m < 3; ++m)
      if (t.a[l][m] != 0.0) return false;
  return t.a[0][0] == 0.0 && t.a[1][1] > 0.0 && t.a[1][1] == t.a[2][2];
}

std::string upper_name(std::string_view name) {
  std::string out(name);
  for (auto& ch : out) {
    ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (ch == '-') ch = '_';
  }
  return out;
}

}  // namespace

double first_order_residual(const Tableau& t) { return sum(t.b) - 1.0; }

double compatibility_residual(const Tableau& t) {
  double worst = 0.0;
  for (int l = 0; l < 3; ++l) worst = std::max(worst, std::abs(sum(t.a[l]) - t.c[l]));
  return worst;
}

bool check_first_order(const ButcherPair& pair) {
  return std::abs(first_order_residual(pair.explicit_part)) < kStructureTol &&
         std::abs(first_order_residual(pair.implicit_part)) < kStructureTol;
}

bool check_compatibility(const Tableau& t) { return compatibility_residual(t) < kStructureTol; }

ConditionReport check_second_order_coupling(const ButcherPair& pair) {
  const auto& ex = pair.explicit_part;
  const auto& im = pair.implicit_part;
  ConditionReport report;
  report.residuals = {dot(ex.b, ex.c) - 0.5, dot(im.b, im.c) - 0.5, dot(im.b, ex.c) - 0.5,
                      dot(ex.b, im.c) - 0.5};
  report.satisfied = std::all_of(report.residuals.begin(), report.residuals.end(),
                                 [](double r) { return std::abs(r) < kCouplingTol; });
  return report;
}

double e_polynomial_coefficient(double gamma) {
  return ((4.0 * gamma - 5.0) * gamma + 2.0) * gamma - 0.25;
}

std::complex<double> stability_function(const Tableau& t, std::complex<double> z) {
  using C = std::complex<double>;
  // Solve (I - zA) k = 1 by Gaussian elimination with partial pivoting.
  std::array<std::array<C, 4>, 3> m{};
  double scale = 1.0;
  for (int l = 0; l < 3; ++l) {
    for (int j = 0; j < 3; ++j) {
      m[l][j] = (l == j ? C(1.0) : C(0.0)) - z * t.a[l][j];
      scale = std::max(scale, std::abs(m[l][j]));
    }
    m[l][3] = 1.0;
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) <= 1e-12 * scale)
      throw SingularMatrixError("stability_function: I - zA is singular (z is a pole)");
    std::swap(m[piv], m[col]);
    for (int r = col + 1; r < 3; ++r) {
      const C f = m[r][col] / m[col][col];
      for (int j = col; j < 4; ++j) m[r][j] -= f * m[col][j];
    }
  }
  std::array<C, 3> k{};
  for (int l = 2; l >= 0; --l) {
    C acc = m[l][3];
    for (int j = l + 1; j < 3; ++j) acc -= m[l][j] * k[j];
    k[l] = acc / m[l][l];
  }
  return 1.0 + z * (t.b[0] * k[0] + t.b[1] * k[1] + t.b[2] * k[2]);
}

bool check_stiff_accuracy(const Tableau& t) {
  for (int m = 0; m < 3; ++m)
    if (std::abs(t.a[2][m] - t.b[m]) >= kStructureTol) return false;
  return true;
}

DaeResult check_dae_condition(const Tableau& t) {
  const double a11 = t.a[1][1], a12 = t.a[1][2];
  const double a21 = t.a[2][1], a22 = t.a[2][2];
  const double det = a11 * a22 - a12 * a21;
  const double norm = std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22)});
  DaeResult result;
  if (norm == 0.0 || std::abs(det) <= 1e-14 * norm * norm) {
    result.singular = true;
    return result;
  }
  const double x0 = (a22 * t.c[1] - a12 * t.c[2]) / det;
  const double x1 = (-a21 * t.c[1] + a11 * t.c[2]) / det;
  result.value = t.b[1] * x0 + t.b[2] * x1;
  result.satisfied = std::abs(result.value - 1.0) < kDaeTol;
  return result;
}

double supplementary_relation_residual(const Tableau& explicit_part) {
  const double s2 = std::sqrt(2.0);
  return -explicit_part.a[1][0] * s2 - explicit_part.a[2][1] * (2.0 - s2) + 1.0;
}

ButcherPair canonical_pair(PairId which) {
  // Built in long double from the closed forms, rounded once.
  const long double s2 = std::sqrt(2.0L);
  const long double gamma = 1.0L - s2 / 2.0L;

  ButcherPair pair;
  auto& im = pair.implicit_part;
  im.a[1][1] = static_cast<double>(gamma);
  im.a[2][1] = static_cast<double>(s2 / 2.0L);
  im.a[2][2] = static_cast<double>(gamma);
  im.b = {0.0, static_cast<double>(s2 / 2.0L), static_cast<double>(gamma)};
  im.c = {0.0, static_cast<double>(gamma), 1.0};

  auto& ex = pair.explicit_part;
  long double a21 = 0.0L;
  long double a32 = 0.0L;
  if (which == PairId::CEqCTilde) {
    a21 = gamma;
    a32 = 1.0L;
  } else {
    a21 = s2 / 4.0L;
    a32 = (s2 - 1.0L) / (2.0L * (3.0L * s2 - 4.0L));
  }
  ex.a[1][0] = static_cast<double>(a21);
  ex.a[2][1] = static_cast<double>(a32);
  ex.b = im.b;
  ex.c = {0.0, static_cast<double>(a21), static_cast<double>(a32)};
  pair.name = std::string(pair_id_name(which));
  return pair;
}

PairId parse_pair_id(std::string_view name) {
  const auto key = upper_name(name);
  if (key == "MAX_NU") return PairId::MaxNu;
  if (key == "C_EQ_CTILDE") return PairId::CEqCTilde;
  throw ConfigError("unknown IMEX pair '" + std::string(name) + "' (expected MAX_NU or C_EQ_CTILDE)");
}

std::string_view pair_id_name(PairId id) {
  return id == PairId::MaxNu ? "MAX_NU" : "C_EQ_CTILDE";
}

ButcherPair read_pair(std::istream& in, std::string name) {
  std::vector<Vec3> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<double> values;
    std::string token;
    while (ls >> token) {
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (end == token.c_str() || *end != '\0')
        throw ConfigError("tableau line " + std::to_string(line_no) + ": bad number '" + token + "'");
      values.push_back(v);
    }
    if (values.empty()) continue;
    if (values.size() != 3)
      throw ConfigError("tableau line " + std::to_string(line_no) + ": expected 3 numbers");
    rows.push_back({values[0], values[1], values[2]});
  }
  if (rows.size() != 10)
    throw ConfigError("tableau file must contain 10 data rows (5 per tableau), found " +
                      std::to_string(rows.size()));

  ButcherPair pair;
  pair.name = std::move(name);
  auto fill = [&](Tableau& t, std::size_t first) {
    t.a = {rows[first], rows[first + 1], rows[first + 2]};
    t.b = rows[first + 3];
    t.c = rows[first + 4];
  };
  fill(pair.explicit_part, 0);
  fill(pair.implicit_part, 5);
  if (!strictly_lower(pair.explicit_part))
    throw ConfigError("explicit tableau must be strictly lower-triangular");
  for (int l = 0; l < 3; ++l)
    for (int m = l + 1; m < 3; ++m)
      if (pair.implicit_part.a[l][m] != 0.0)
        throw ConfigError("implicit tableau must be lower-triangular");
  return pair;
}

ButcherPair load_pair(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tableau file '" + path + "'");
  return read_pair(in, path);
}

void write_pair(std::ostream& out, const ButcherPair& pair) {
  const auto old = out.precision(17);
  auto block = [&](const char* title, const Tableau& t) {
    out << "# " << title << "\n";
    for (const auto& row : t.a) out << row[0] << ' ' << row[1] << ' ' << row[2] << '\n';
    out << t.b[0] << ' ' << t.b[1] << ' ' << t.b[2] << "  # b\n";
    out << t.c[0] << ' ' << t.c[1] << ' ' << t.c[2] << "  # c\n";
  };
  block("explicit", pair.explicit_part);
  block("implicit", pair.implicit_part);
  out.precision(old);
}

ButcherPair resolve_pair(const std::string& name_or_path) {
  try {
    return canonical_pair(parse_pair_id(name_or_path));
  } catch (const ConfigError&) {
    return load_pair(name_or_path);
  }
}

bool last_row_is_b(const Tableau& t) { return t.a[2] == t.b; }

bool PairReport::first_order() const {
  return std::abs(first_order_explicit) < kStructureTol && std::abs(first_order_implicit) < kStructureTol;
}

bool PairReport::compatibility() const {
  return compatibility_explicit < kStructureTol && compatibility_implicit < kStructureTol;
}

bool PairReport::all_pass() const {
  return structure_ok && first_order() && compatibility() && coupling.satisfied && stiffly_accurate &&
         dae.satisfied && weights_equal;
}

PairReport analyze_pair(const ButcherPair& pair) {
  PairReport r;
  r.first_order_explicit = first_order_residual(pair.explicit_part);
  r.first_order_implicit = first_order_residual(pair.implicit_part);
  r.compatibility_explicit = compatibility_residual(pair.explicit_part);
  r.compatibility_implicit = compatibility_residual(pair.implicit_part);
  r.coupling = check_second_order_coupling(pair);
  r.stiffly_accurate = check_stiff_accuracy(pair.implicit_part);
  r.dae = check_dae_condition(pair.implicit_part);
  r.weights_equal = true;
  for (int l = 0; l < 3; ++l)
    if (std::abs(pair.explicit_part.b[l] - pair.implicit_part.b[l]) >= kStructureTol) r.weights_equal = false;
  r.structure_ok = strictly_lower(pair.explicit_part) && esdirk(pair.implicit_part);
  r.e_polynomial = e_polynomial_coefficient(pair.gamma());
  r.supplementary_residual = supplementary_relation_residual(pair.explicit_part);
  return r;
}

void write_report(std::ostream& out, const ButcherPair& pair, const PairReport& r) {
  const auto old = out.precision(17);
  auto verdict = [](bool ok) { return ok ? "pass" : "FAIL"; };
  out << "pair = " << pair.name << '\n'
      << "gamma = " << pair.gamma() << '\n'
      << "structure = " << verdict(r.structure_ok) << '\n'
      << "first_order.explicit_residual = " << r.first_order_explicit << '\n'
      << "first_order.implicit_residual = " << r.first_order_implicit << '\n'
      << "first_order = " << verdict(r.first_order()) << '\n'
      << "compatibility.explicit_residual = " << r.compatibility_explicit << '\n'
      << "compatibility.implicit_residual = " << r.compatibility_implicit << '\n'
      << "compatibility = " << verdict(r.compatibility()) << '\n'
      << "coupling.b_c = " << r.coupling.residuals[0] << '\n'
      << "coupling.bt_ct = " << r.coupling.residuals[1] << '\n'
      << "coupling.bt_c = " << r.coupling.residuals[2] << '\n'
      << "coupling.b_ct = " << r.coupling.residuals[3] << '\n'
      << "coupling = " << verdict(r.coupling.satisfied) << '\n'
      << "weights_equal = " << verdict(r.weights_equal) << '\n'
      << "stiff_accuracy = " << verdict(r.stiffly_accurate) << '\n';
  if (r.dae.singular)
    out << "dae.value = singular\n";
  else
    out << "dae.value = " << r.dae.value << '\n';
  out << "dae = " << verdict(r.dae.satisfied) << '\n'
      << "e_polynomial_coefficient = " << r.e_polynomial << '\n'
      << "i_stable = " << (r.i_stable() ? "yes" : "no") << '\n'
      << "supplementary_relation_residual = " << r.supplementary_residual << '\n'
      << "all = " << verdict(r.all_pass()) << '\n';
  out.precision(old);
}

}  // namespace lavaimex
