#pragma once

#include <array>

#include "lavaimex/mesh2d.hpp"

namespace lavaimex {

/// Interface data seen by the path-conservative term: states and topography
/// on both sides, unit normal pointing from the minus to the plus side.
struct EdgeState {
  State q_minus;
  State q_plus;
  double z_minus = 0.0;
  double z_plus = 0.0;
  std::array<double, 2> normal{1.0, 0.0};
  double edge_length = 1.0;
};

/// Momentum fluctuation of the segment path integrated with the trapezoidal
/// rule: (g/2) * (h- + h+)/2 * (Z+ - Z-) * n. Zero if either side is below h_min.
std::array<double, 2> pc_fluctuation(const EdgeState& e, double gravity, double h_min = 0.0);

enum class Direction { X, Y };

/// Nodal height and topography at the four corners of a cell, in the corner
/// order (i,j), (i+1,j), (i,j+1), (i+1,j+1).
struct CornerData {
  std::array<double, 4> h{};
  std::array<double, 4> z{};
};

/// Integral over the cell of g h dZ/dx (or dZ/dy) with edge-mean heights.
double wb_node_gradient_integral(const CornerData& c, Direction d, double gravity, double dx, double dy);

/// Integral over the cell of d(g h^2 / 2)/dx (or y) in the same edge-mean form.
double wb_pressure_integral(const CornerData& c, Direction d, double gravity, double dx, double dy);

/// Sum of the two integrals above, differenced on the free surface h + Z so a
/// flat surface cancels before any rounding is amplified.
double wb_surface_gradient_integral(const CornerData& c, Direction d, double gravity, double dx, double dy);

}  // namespace lavaimex
