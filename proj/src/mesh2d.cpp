#include "lavaimex/mesh2d.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lavaimex/errors.hpp"

namespace lavaimex {

Mesh2D::Mesh2D(int nx, int ny, double dx, double dy, double x0, double y0, Boundary bx, Boundary by)
    : nx_(nx), ny_(ny), dx_(dx), dy_(dy), x0_(x0), y0_(y0), bx_(bx), by_(by) {
  if (nx < 2 || ny < 2) throw ConfigError("mesh needs at least 2 cells per direction");
  if (!(dx > 0.0) || !(dy > 0.0)) throw ConfigError("mesh spacing must be positive");
  lumped_mass_.assign(static_cast<std::size_t>(node_count()), 0.0);
  node_cells_.resize(static_cast<std::size_t>(node_count()));
  const double quarter = 0.25 * cell_area();
  for (int c = 0; c < cell_count(); ++c) {
    const auto corners = nodes_of_cell(c);
    for (int k = 0; k < 4; ++k) {
      lumped_mass_[static_cast<std::size_t>(corners[k])] += quarter;
      node_cells_[static_cast<std::size_t>(corners[k])].emplace_back(c, k);
    }
  }
}

int Mesh2D::node_index(int i, int j) const {
  const int mx = nodes_x(), my = nodes_y();
  if (bx_ == Boundary::Periodic) i = ((i % mx) + mx) % mx;
  if (by_ == Boundary::Periodic) j = ((j % my) + my) % my;
  if (i < 0 || i >= mx || j < 0 || j >= my) throw std::out_of_range("node lattice index out of range");
  return j * mx + i;
}

std::pair<int, int> Mesh2D::cell_ij(int cell) const {
  if (cell < 0 || cell >= cell_count()) throw std::out_of_range("cell index " + std::to_string(cell) + " out of range");
  return {cell % nx_, cell / nx_};
}

std::pair<int, int> Mesh2D::node_ij(int node) const {
  if (node < 0 || node >= node_count()) throw std::out_of_range("node index " + std::to_string(node) + " out of range");
  return {node % nodes_x(), node / nodes_x()};
}

std::array<int, 4> Mesh2D::nodes_of_cell(int cell) const {
  const auto [i, j] = cell_ij(cell);
  return {node_index(i, j), node_index(i + 1, j), node_index(i, j + 1), node_index(i + 1, j + 1)};
}

double Mesh2D::node_x(int node) const { return x0_ + node_ij(node).first * dx_; }
double Mesh2D::node_y(int node) const { return y0_ + node_ij(node).second * dy_; }
double Mesh2D::cell_center_x(int cell) const { return x0_ + (cell_ij(cell).first + 0.5) * dx_; }
double Mesh2D::cell_center_y(int cell) const { return y0_ + (cell_ij(cell).second + 0.5) * dy_; }

Field Field::zeros(const Mesh2D& mesh, Layout layout) {
  const auto n = static_cast<std::size_t>(layout == Layout::Cell ? mesh.cell_count() : mesh.node_count());
  return Field{layout, std::vector<State>(n), std::vector<double>(n, 0.0)};
}

Field node_to_cell_average(const Mesh2D& mesh, const Field& nodes) {
  if (nodes.layout != Layout::Node || nodes.size() != static_cast<std::size_t>(mesh.node_count()))
    throw std::invalid_argument("node_to_cell_average: node field does not match mesh");
  Field cells = Field::zeros(mesh, Layout::Cell);
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const auto n = mesh.nodes_of_cell(c);
    State s = nodes.q[n[0]] + nodes.q[n[1]] + nodes.q[n[2]] + nodes.q[n[3]];
    cells.q[c] = 0.25 * s;
    cells.z[c] = 0.25 * (nodes.z[n[0]] + nodes.z[n[1]] + nodes.z[n[2]] + nodes.z[n[3]]);
  }
  return cells;
}

std::vector<State> lumped_mass_scatter(const Mesh2D& mesh, const std::vector<State>& cell_residuals) {
  if (cell_residuals.size() != static_cast<std::size_t>(mesh.cell_count()))
    throw std::invalid_argument("lumped_mass_scatter: residual count does not match mesh");
  std::vector<State> out(static_cast<std::size_t>(mesh.node_count()));
  const double quarter = 0.25 * mesh.cell_area();
  for (int n = 0; n < mesh.node_count(); ++n) {
    State acc;
    for (const auto& [cell, slot] : mesh.cells_of_node(n)) acc += quarter * cell_residuals[cell];
    out[n] = (1.0 / mesh.lumped_mass(n)) * acc;
  }
  return out;
}

std::string boundary_name(Boundary b) { return b == Boundary::Wall ? "wall" : "periodic"; }

Boundary parse_boundary(const std::string& name) {
  if (name == "wall" || name == "WALL") return Boundary::Wall;
  if (name == "periodic" || name == "PERIODIC") return Boundary::Periodic;
  throw ConfigError("unknown boundary kind '" + name + "' (expected wall or periodic)");
}

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_field(std::ostream& out, const Mesh2D& mesh, const Field& f) {
  out << "# lavaimex structured field\n"
      << "nx " << mesh.nx() << "\nny " << mesh.ny() << "\ndx " << g17(mesh.dx()) << "\ndy "
      << g17(mesh.dy()) << "\norigin " << g17(mesh.x0()) << ' ' << g17(mesh.y0()) << "\nboundary "
      << boundary_name(mesh.boundary_x()) << ' ' << boundary_name(mesh.boundary_y()) << "\nlayout "
      << (f.layout == Layout::Cell ? "cell" : "node") << "\ncount " << f.size() << '\n'
      << "# x y h hu_x hu_y hT Z\n";
  for (std::size_t k = 0; k < f.size(); ++k) {
    const int i = static_cast<int>(k);
    const double x = f.layout == Layout::Cell ? mesh.cell_center_x(i) : mesh.node_x(i);
    const double y = f.layout == Layout::Cell ? mesh.cell_center_y(i) : mesh.node_y(i);
    const auto& s = f.q[k];
    out << g17(x) << ' ' << g17(y) << ' ' << g17(s.h) << ' ' << g17(s.hu) << ' ' << g17(s.hv) << ' '
        << g17(s.hT) << ' ' << g17(f.z[k]) << '\n';
  }
}

std::pair<Mesh2D, Field> read_field(std::istream& in) {
  int nx = 0, ny = 0;
  double dx = 0, dy = 0, x0 = 0, y0 = 0;
  std::string bx = "wall", by = "wall", layout;
  std::size_t count = 0;
  std::string line;
  auto fail = [](const std::string& what) { throw ConfigError("field file: " + what); };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "nx") ls >> nx;
    else if (key == "ny") ls >> ny;
    else if (key == "dx") ls >> dx;
    else if (key == "dy") ls >> dy;
    else if (key == "origin") ls >> x0 >> y0;
    else if (key == "boundary") ls >> bx >> by;
    else if (key == "layout") ls >> layout;
    else if (key == "count") {
      ls >> count;
      break;
    } else fail("unexpected header key '" + key + "'");
    if (ls.fail()) fail("bad value for '" + key + "'");
  }
  if (layout != "cell" && layout != "node") fail("missing or bad layout");
  Mesh2D mesh(nx, ny, dx, dy, x0, y0, parse_boundary(bx), parse_boundary(by));
  Field f = Field::zeros(mesh, layout == "cell" ? Layout::Cell : Layout::Node);
  if (count != f.size()) fail("count does not match mesh");
  std::size_t k = 0;
  while (k < count && std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double x, y;
    auto& s = f.q[k];
    ls >> x >> y >> s.h >> s.hu >> s.hv >> s.hT >> f.z[k];
    if (ls.fail()) fail("bad data row " + std::to_string(k));
    ++k;
  }
  if (k != count) fail("truncated data");
  return {mesh, f};
}

}  // namespace lavaimex
