#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace decaylab {

inline constexpr int kMaxDim = 3;

/// Physical point; unused trailing components are zero.
using Point = std::array<double, kMaxDim>;
/// Integer lattice point of the impurity grid Z^d; unused components are zero.
using Site = std::array<std::int64_t, kMaxDim>;

enum class Boundary { Dirichlet, Neumann };

std::string to_string(Boundary bc);
Boundary boundary_from_string(const std::string& name);

/// Euclidean norm over the first `dim` components.
double norm(const Point& x, int dim);

/// Integer site whose unit cube contains `x` (componentwise floor(x + 1/2)).
Site enclosing_site(const Point& x, int dim);

/// Axis-aligned open cube ]c - L/2, c + L/2[^d.
struct Cube {
  int dim = 1;
  Point center{};
  double side = 0.0;

  bool contains(const Point& x) const;
  /// Whether the closed unit cube around `site` is contained in this cube.
  bool contains_unit_cube(const Site& site) const;
  /// Whether the open unit cube around `site` intersects this cube.
  bool meets_unit_cube(const Site& site) const;
  /// inf over y in the cube of <y> = sqrt(1 + |y|^2).
  double min_japanese_bracket() const;
};

/// Cell-centred finite-difference grid discretizing a cube.
///
/// Node k along an axis sits at center - L/2 + (k + 1/2) h, so a box of side L
/// carries exactly L/h nodes per axis. With Dirichlet conditions the ghost
/// nodes one step outside are zero; Neumann uses the graph-Laplacian stencil.
class LatticeDomain {
 public:
  LatticeDomain() = default;

  int dim() const { return dim_; }
  const Point& center() const { return center_; }
  double side() const { return side_; }
  double mesh() const { return mesh_; }
  Boundary boundary() const { return bc_; }
  const std::array<std::int64_t, kMaxDim>& shape() const { return shape_; }
  std::size_t size() const { return size_; }
  Cube cube() const { return Cube{dim_, center_, side_}; }

  using Node = std::array<std::int64_t, kMaxDim>;

  std::size_t index(const Node& node) const;
  Node node(std::size_t index) const;
  Point coordinate(std::size_t index) const;
  Point coordinate(const Node& node) const;

  /// Same centre and mesh, side enlarged by 2*buffer, Dirichlet edges.
  LatticeDomain with_buffer(double buffer) const;

  friend LatticeDomain build_domain(int, std::span<const double>, double, double, Boundary);
  bool operator==(const LatticeDomain&) const = default;

 private:
  int dim_ = 1;
  Point center_{};
  double side_ = 0.0;
  double mesh_ = 1.0;
  Boundary bc_ = Boundary::Dirichlet;
  std::array<std::int64_t, kMaxDim> shape_{1, 1, 1};
  std::size_t size_ = 0;
};

/// Validates the inputs and returns the grid; throws PreconditionError when
/// d is outside 1..3, L or h is non-positive, or L/h is not an integer.
LatticeDomain build_domain(int dim, std::span<const double> center, double side, double mesh,
                           Boundary bc);

/// Convenience overload for a box centred at the origin.
LatticeDomain build_domain(int dim, double side, double mesh, Boundary bc);

/// Default mesh spacing per dimension (0.25 in d = 1, 2 and 0.5 in d = 3).
double default_mesh(int dim);

}  // namespace decaylab
