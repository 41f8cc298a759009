#include "decaylab/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "decaylab/error.hpp"

namespace decaylab {

namespace {
constexpr double kGeomTol = 1e-9;
}

std::string to_string(Boundary bc) { return bc == Boundary::Dirichlet ? "dirichlet" : "neumann"; }

Boundary boundary_from_string(const std::string& name) {
  if (name == "dirichlet" || name == "D") return Boundary::Dirichlet;
  if (name == "neumann" || name == "N") return Boundary::Neumann;
  throw FormatError("unknown boundary condition '" + name + "' (expected dirichlet|neumann)");
}

double norm(const Point& x, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += x[k] * x[k];
  return std::sqrt(s);
}

Site enclosing_site(const Point& x, int dim) {
  Site s{0, 0, 0};
  for (int k = 0; k < dim; ++k) s[k] = static_cast<std::int64_t>(std::floor(x[k] + 0.5));
  return s;
}

bool Cube::contains(const Point& x) const {
  for (int k = 0; k < dim; ++k) {
    if (std::abs(x[k] - center[k]) >= side / 2) return false;
  }
  return true;
}

bool Cube::contains_unit_cube(const Site& site) const {
  for (int k = 0; k < dim; ++k) {
    const double lo = static_cast<double>(site[k]) - 0.5;
    const double hi = static_cast<double>(site[k]) + 0.5;
    if (lo < center[k] - side / 2 - kGeomTol || hi > center[k] + side / 2 + kGeomTol) return false;
  }
  return true;
}

bool Cube::meets_unit_cube(const Site& site) const {
  for (int k = 0; k < dim; ++k) {
    const double lo = static_cast<double>(site[k]) - 0.5;
    const double hi = static_cast<double>(site[k]) + 0.5;
    if (hi <= center[k] - side / 2 + kGeomTol || lo >= center[k] + side / 2 - kGeomTol) return false;
  }
  return true;
}

double Cube::min_japanese_bracket() const {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double gap = std::max(0.0, std::abs(center[k]) - side / 2);
    s += gap * gap;
  }
  return std::sqrt(1.0 + s);
}

std::size_t LatticeDomain::index(const Node& n) const {
  std::size_t idx = 0;
  for (int k = dim_ - 1; k >= 0; --k) idx = idx * static_cast<std::size_t>(shape_[k]) + n[k];
  return idx;
}

LatticeDomain::Node LatticeDomain::node(std::size_t idx) const {
  Node n{0, 0, 0};
  for (int k = 0; k < dim_; ++k) {
    n[k] = static_cast<std::int64_t>(idx % static_cast<std::size_t>(shape_[k]));
    idx /= static_cast<std::size_t>(shape_[k]);
  }
  return n;
}

Point LatticeDomain::coordinate(const Node& n) const {
  Point x{0.0, 0.0, 0.0};
  for (int k = 0; k < dim_; ++k) {
    x[k] = center_[k] - side_ / 2 + (static_cast<double>(n[k]) + 0.5) * mesh_;
  }
  return x;
}

Point LatticeDomain::coordinate(std::size_t idx) const { return coordinate(node(idx)); }

LatticeDomain LatticeDomain::with_buffer(double buffer) const {
  std::array<double, kMaxDim> c{center_[0], center_[1], center_[2]};
  return build_domain(dim_, std::span<const double>(c.data(), dim_), side_ + 2 * buffer, mesh_,
                      Boundary::Dirichlet);
}

LatticeDomain build_domain(int dim, std::span<const double> center, double side, double mesh,
                           Boundary bc) {
  if (dim < 1 || dim > kMaxDim) {
    throw PreconditionError("dimension must be 1, 2 or 3 (got " + std::to_string(dim) + ")");
  }
  if (!(side > 0.0) || !(mesh > 0.0)) {
    throw PreconditionError("box side and mesh spacing must be positive");
  }
  if (center.size() != static_cast<std::size_t>(dim)) {
    throw PreconditionError("centre must have exactly d components");
  }
  const double ratio = side / mesh;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > kGeomTol * std::max(1.0, ratio)) {
    throw PreconditionError("box side " + std::to_string(side) + " is not an integer multiple of mesh " +
                            std::to_string(mesh) + " (L/h = " + std::to_string(ratio) + ")");
  }
  LatticeDomain d;
  d.dim_ = dim;
  for (int k = 0; k < dim; ++k) d.center_[k] = center[k];
  d.side_ = side;
  d.mesh_ = mesh;
  d.bc_ = bc;
  d.size_ = 1;
  for (int k = 0; k < dim; ++k) {
    d.shape_[k] = static_cast<std::int64_t>(rounded);
    d.size_ *= static_cast<std::size_t>(rounded);
  }
  return d;
}

LatticeDomain build_domain(int dim, double side, double mesh, Boundary bc) {
  std::array<double, kMaxDim> origin{};
  return build_domain(dim, std::span<const double>(origin.data(), dim), side, mesh, bc);
}

double default_mesh(int dim) { return dim >= 3 ? 0.5 : 0.25; }

}  // namespace decaylab
