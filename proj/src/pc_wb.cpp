#include "lavaimex/pc_wb.hpp"

namespace lavaimex {

std::array<double, 2> pc_fluctuation(const EdgeState& e, double gravity, double h_min) {
  if (e.q_minus.h < h_min || e.q_plus.h < h_min) return {0.0, 0.0};
  const double s = 0.5 * gravity * 0.5 * (e.q_minus.h + e.q_plus.h) * (e.z_plus - e.z_minus);
  return {s * e.normal[0], s * e.normal[1]};
}

namespace {

// Edge pairs along the chosen direction: (start, end) corners of the two
// parallel edges, and the length of the edge they are differenced across.
struct Pairs {
  int a0, a1, b0, b1;
  double transverse;
};

Pairs pairs(Direction d, double dx, double dy) {
  if (d == Direction::X) return {0, 1, 2, 3, dy};
  return {0, 2, 1, 3, dx};
}

// (1/2) sum over the two parallel edges of g * mean(h) * (w_end - w_start) * transverse length.
template <class Diff>
double edge_mean_form(const CornerData& c, Direction d, double gravity, double dx, double dy, Diff diff) {
  const auto p = pairs(d, dx, dy);
  const double first = gravity * 0.5 * (c.h[p.a0] + c.h[p.a1]) * diff(p.a0, p.a1);
  const double second = gravity * 0.5 * (c.h[p.b0] + c.h[p.b1]) * diff(p.b0, p.b1);
  return 0.5 * (first + second) * p.transverse;
}

}  // namespace

double wb_node_gradient_integral(const CornerData& c, Direction d, double gravity, double dx, double dy) {
  return edge_mean_form(c, d, gravity, dx, dy, [&](int s, int e) { return c.z[e] - c.z[s]; });
}

double wb_pressure_integral(const CornerData& c, Direction d, double gravity, double dx, double dy) {
  return edge_mean_form(c, d, gravity, dx, dy, [&](int s, int e) { return c.h[e] - c.h[s]; });
}

double wb_surface_gradient_integral(const CornerData& c, Direction d, double gravity, double dx, double dy) {
  return edge_mean_form(c, d, gravity, dx, dy,
                        [&](int s, int e) { return (c.h[e] + c.z[e]) - (c.h[s] + c.z[s]); });
}

}  // namespace lavaimex
