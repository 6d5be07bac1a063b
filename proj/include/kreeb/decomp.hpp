#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "kreeb/reeb.hpp"

namespace kreeb {

/// Non-separating component of the cut level, oriented along the canonical class.
struct CutCurve {
  int index = 0;
  int edge = -1;       // Reeb edge carrying the curve
  double ell = 0.0;    // transverse coordinate q*x - p*y of the curve, in [0, 1)
  bool reversed = false;  // traced orientation was opposite to the canonical class
  LevelCurve curve;
};

/// Cylinder between cut curves `left` and `right` (left + 1 mod m).
struct Block {
  int index = 0;
  int left = 0;
  int right = 0;
  std::vector<int> vertices;  // Reeb vertex ids inside the block
  std::vector<double> critical_values;
  std::array<int, 3> index_counts{0, 0, 0};  // minima, saddles, maxima
  int label = 0;  // equivalence class id, numbered by first occurrence
};

struct CyclicBlockWord {
  double level = 0.0;
  HomologyClass curve_class{0, 1};
  std::vector<CutCurve> curves;
  std::vector<Block> blocks;
  std::vector<int> word;  // block labels in cyclic order
  int m = 0;
  int rotation_step = 1;  // smallest rotation fixing the word
  int cyclic_index = 1;   // m / rotation_step
};

/// (p, q) or (-p, -q), whichever has q > 0, or q = 0 and p > 0.
HomologyClass canonical_class(HomologyClass h);

/// Mean of q*x - p*y along the unwrapped polyline, reduced to [0, 1).
double transverse_coordinate(const LevelCurve& curve, HomologyClass cls);

/// Cuts along the components of f^{-1}(c) on the cycle. The default level is the
/// representative level of the first cycle edge. A level that is not already a
/// sweep level triggers a rebuild of the graph with that level added. Blocks are
/// equivalent when their critical values agree within `rel_tol * range`
/// (default 1e-4 for expression fields, 1e-2 for raw grids).
/// Throws CriticalLevel, NoCrossing (c meets no cycle edge) or Topology.
CyclicBlockWord decompose(const GridField& field, const ReebGraph& reeb, const Cycle& cycle,
                          std::optional<double> level = std::nullopt, std::optional<double> rel_tol = std::nullopt);
/// Full pipeline; throws NoCycle for a tree.
CyclicBlockWord decompose(const GridField& field, std::optional<double> level = std::nullopt,
                          std::optional<double> rel_tol = std::nullopt);

/// m / (primitive period of the cyclic word).
int cyclic_index(const std::vector<int>& word);
int cyclic_index(const CyclicBlockWord& word);

/// Curves in the orbit of `chosen` under the rotation group.
std::vector<int> orbit_curves(const CyclicBlockWord& word, int chosen);

std::string decomposition_to_json(const CyclicBlockWord& word, int chosen = 0, int indent = 2);

}  // namespace kreeb
