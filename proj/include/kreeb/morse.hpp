#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "kreeb/field.hpp"

namespace kreeb {

enum class CriticalIndex { Minimum = 0, Saddle = 1, Maximum = 2 };

struct CriticalPoint {
  TorusPoint location;
  double value = 0.0;
  CriticalIndex index = CriticalIndex::Minimum;
  double hessian_det = 0.0;
};

/// Grid cell with lower-left node (i, j).
struct Cell {
  int i = 0;
  int j = 0;
};

/// Homology class in H_1(T^2) = Z^2: (winding in x, winding in y).
using HomologyClass = std::array<int, 2>;

/// Closed component of a level set traced through the grid.
struct LevelCurve {
  double level = 0.0;
  std::vector<TorusPoint> points;       // closed polyline, last point joins the first
  HomologyClass homology{0, 0};         // displacement of the unwrapped polyline
  std::vector<std::size_t> grid_edges;  // crossed grid edges, in traversal order

  bool separating() const { return homology[0] == 0 && homology[1] == 0; }
};

/// Grid edge ids: 2*(j*N + i) for the edge (i,j)-(i+1,j), and 2*(j*N + i) + 1 for
/// the edge (i,j)-(i,j+1).
struct GridEdgeNodes {
  Node a;
  Node b;
};
GridEdgeNodes grid_edge_nodes(int resolution, std::size_t edge);

/// Critical points, one per cell where both gradient components change sign,
/// Newton-refined on the interpolated gradient and sorted by (value, x, y).
/// Throws DegenerateCritical when a refined point has a (near) singular Hessian.
std::vector<CriticalPoint> find_critical_points(const GridField& field);

/// Index-weighted count sum (-1)^index; zero on the torus.
int euler_characteristic(const std::vector<CriticalPoint>& points);

/// |c - v| must exceed this for every critical value v.
double regular_value_tolerance(const GridField& field);

/// Throws CriticalLevel if c is within tolerance of a critical value.
void require_regular_value(const GridField& field, const std::vector<CriticalPoint>& criticals, double c);

/// Marching-squares walk (asymptotic decider on ambiguous cells) from the first
/// crossed edge of `seed`. The walk keeps {f > c} on its left.
/// Throws CriticalLevel or NoCrossing.
LevelCurve trace_level_component(const GridField& field, double c, Cell seed,
                                 const std::vector<CriticalPoint>& criticals);
LevelCurve trace_level_component(const GridField& field, double c, Cell seed);

/// All components of f^{-1}(c), sorted by the x-coordinate of their leftmost point.
std::vector<LevelCurve> enumerate_level_components(const GridField& field, double c,
                                                   const std::vector<CriticalPoint>& criticals);
std::vector<LevelCurve> enumerate_level_components(const GridField& field, double c);

/// Continuous lift of a closed polyline starting at its first point.
std::vector<Vec2> unwrap(const std::vector<TorusPoint>& points);

/// Cell containing p.
Cell cell_of(const GridField& field, TorusPoint p);

}  // namespace kreeb
