#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace lavaimex {

enum class Boundary { Wall, Periodic };

/// Conserved variables (h, h u_x, h u_y, h T).
struct State {
  double h = 0.0;
  double hu = 0.0;
  double hv = 0.0;
  double hT = 0.0;

  State& operator+=(const State& o) {
    h += o.h;
    hu += o.hu;
    hv += o.hv;
    hT += o.hT;
    return *this;
  }
  State& operator*=(double s) {
    h *= s;
    hu *= s;
    hv *= s;
    hT *= s;
    return *this;
  }
  friend State operator+(State a, const State& b) { return a += b; }
  friend State operator-(State a, const State& b) { return a += State{-b.h, -b.hu, -b.hv, -b.hT}; }
  friend State operator*(double s, State a) { return a *= s; }
  friend bool operator==(const State&, const State&) = default;
};

/// Uniform tensor-product grid. Node numbering is row-major with x fastest;
/// a periodic axis identifies its last node line with the first.
class Mesh2D {
 public:
  Mesh2D(int nx, int ny, double dx, double dy, double x0 = 0.0, double y0 = 0.0,
         Boundary bx = Boundary::Wall, Boundary by = Boundary::Wall);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double x0() const { return x0_; }
  double y0() const { return y0_; }
  Boundary boundary_x() const { return bx_; }
  Boundary boundary_y() const { return by_; }
  double cell_area() const { return dx_ * dy_; }

  int nodes_x() const { return bx_ == Boundary::Periodic ? nx_ : nx_ + 1; }
  int nodes_y() const { return by_ == Boundary::Periodic ? ny_ : ny_ + 1; }
  int node_count() const { return nodes_x() * nodes_y(); }
  int cell_count() const { return nx_ * ny_; }

  /// Node index of lattice point (i, j); wraps on periodic axes.
  int node_index(int i, int j) const;
  int cell_index(int i, int j) const { return j * nx_ + i; }
  std::pair<int, int> cell_ij(int cell) const;
  std::pair<int, int> node_ij(int node) const;

  /// Corners (i,j), (i+1,j), (i,j+1), (i+1,j+1). Throws std::out_of_range.
  std::array<int, 4> nodes_of_cell(int cell) const;

  double node_x(int node) const;
  double node_y(int node) const;
  double cell_center_x(int cell) const;
  double cell_center_y(int cell) const;

  /// Sum of quarter areas of the cells touching the node.
  double lumped_mass(int node) const { return lumped_mass_[static_cast<std::size_t>(node)]; }
  const std::vector<double>& lumped_masses() const { return lumped_mass_; }

  /// (cell, corner slot) pairs touching each node.
  const std::vector<std::pair<int, int>>& cells_of_node(int node) const {
    return node_cells_[static_cast<std::size_t>(node)];
  }

  friend bool operator==(const Mesh2D& a, const Mesh2D& b) {
    return a.nx_ == b.nx_ && a.ny_ == b.ny_ && a.dx_ == b.dx_ && a.dy_ == b.dy_ && a.x0_ == b.x0_ &&
           a.y0_ == b.y0_ && a.bx_ == b.bx_ && a.by_ == b.by_;
  }

 private:
  int nx_, ny_;
  double dx_, dy_, x0_, y0_;
  Boundary bx_, by_;
  std::vector<double> lumped_mass_;
  std::vector<std::vector<std::pair<int, int>>> node_cells_;
};

enum class Layout { Cell, Node };

struct Field {
  Layout layout = Layout::Node;
  std::vector<State> q;
  std::vector<double> z;

  static Field zeros(const Mesh2D& mesh, Layout layout);
  std::size_t size() const { return q.size(); }
};

/// Mean of the four corner values of every cell (state and topography).
Field node_to_cell_average(const Mesh2D& mesh, const Field& nodes);

/// Lumped-mass distribution of per-cell residuals (per unit area) to nodes:
/// node value = sum over adjacent cells of r_K |K| / 4, divided by the node's lumped mass.
std::vector<State> lumped_mass_scatter(const Mesh2D& mesh, const std::vector<State>& cell_residuals);

/// Structured-grid text dump; numbers use 17 significant digits so a parse
/// restores the field bit for bit.
void write_field(std::ostream& out, const Mesh2D& mesh, const Field& field);
std::pair<Mesh2D, Field> read_field(std::istream& in);

std::string boundary_name(Boundary b);
Boundary parse_boundary(const std::string& name);

}  // namespace lavaimex
