#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kreeb/morse.hpp"

namespace kreeb {

struct ReebVertex {
  int id = 0;
  double value = 0.0;
  std::vector<CriticalPoint> points;  // critical points on this critical component
  int degree = 0;
};

struct ReebEdge {
  int id = 0;
  int u = 0;  // lower endpoint
  int v = 0;  // upper endpoint
  double vmin = 0.0;
  double vmax = 0.0;
  LevelCurve representative;
  HomologyClass homology{0, 0};
  /// Components met by this edge at every sweep level inside (vmin, vmax), by increasing level.
  std::vector<LevelCurve> chain;
};

/// Kronrod-Reeb graph of a Morse field on the torus.
struct ReebGraph {
  std::vector<ReebVertex> vertices;  // sorted by (value, x, y) of the first critical point
  std::vector<ReebEdge> edges;
  int components = 0;
  int betti1 = 0;
  std::vector<double> sweep_levels;  // regular levels at which components were traced

  const ReebVertex& vertex(int id) const { return vertices.at(static_cast<std::size_t>(id)); }
  const ReebEdge& edge(int id) const { return edges.at(static_cast<std::size_t>(id)); }
};

/// Edge ids of the unique simple cycle, in closed-walk order.
struct Cycle {
  std::vector<int> edges;
  std::vector<int> vertices;  // vertices[k] is the start of edges[k]
};

/// Band sweep: critical values are grouped into levels, the regions between
/// consecutive level midpoints are labelled by union-find on grid nodes, and
/// regions without critical points are collapsed into edges. `extra_levels`
/// adds regular sweep levels, so their components appear in edge chains.
/// Throws DegenerateCritical, CriticalLevel (for a bad extra level) or Topology.
ReebGraph build_reeb_graph(const GridField& field);
ReebGraph build_reeb_graph(const GridField& field, const std::vector<CriticalPoint>& criticals,
                           const std::vector<double>& extra_levels = {});

/// nullopt for a forest. Throws MultipleCycles when betti1 > 1.
std::optional<Cycle> find_cycle(const ReebGraph& graph);

/// {schema, vertices, edges, betti1[, cycle]} as a JSON string.
std::string reeb_to_json(const ReebGraph& graph, const std::optional<Cycle>& cycle, int indent = 2);

/// Vertices placed by value on the vertical axis.
std::string render_reeb_svg(const ReebGraph& graph, const std::optional<Cycle>& cycle);

}  // namespace kreeb
