#include "kreeb/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "kreeb/error.hpp"

namespace kreeb {

HomologyClass canonical_class(HomologyClass h) {
  if (h[1] < 0 || (h[1] == 0 && h[0] < 0)) return {-h[0], -h[1]};
  return h;
}

double transverse_coordinate(const LevelCurve& curve, HomologyClass cls) {
  const auto lift = unwrap(curve.points);
  double sum = 0.0;
  for (const Vec2& p : lift) sum += cls[1] * p.x - cls[0] * p.y;
  return wrap01(sum / static_cast<double>(lift.size()));
}

namespace {

enum class NodeKind { Vertex, Left, Right };

struct TreeNode {
  NodeKind kind = NodeKind::Vertex;
  double value = 0.0;
  std::array<int, 3> counts{0, 0, 0};
  std::vector<int> children;
};

struct BlockTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the left boundary
};

bool same_label(const TreeNode& a, const TreeNode& b, double tol) {
  if (a.kind != b.kind) return false;
  if (a.kind != NodeKind::Vertex) return true;
  return std::abs(a.value - b.value) <= tol && a.counts == b.counts;
}

bool isomorphic(const BlockTree& ta, int a, const BlockTree& tb, int b, double tol) {
  const TreeNode& na = ta.nodes[a];
  const TreeNode& nb = tb.nodes[b];
  if (!same_label(na, nb, tol) || na.children.size() != nb.children.size()) return false;
  // Children lists are short; backtracking over assignments is enough.
  std::vector<char> used(nb.children.size(), 0);
  std::function<bool(std::size_t)> assign = [&](std::size_t k) {
    if (k == na.children.size()) return true;
    for (std::size_t r = 0; r < nb.children.size(); ++r) {
      if (used[r] || !isomorphic(ta, na.children[k], tb, nb.children[r], tol)) continue;
      used[r] = 1;
      if (assign(k + 1)) return true;
      used[r] = 0;
    }
    return false;
  };
  return assign(0);
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

CyclicBlockWord decompose(const GridField& field, const ReebGraph& reeb_in, const Cycle& cycle_in,
                          std::optional<double> level, std::optional<double> rel_tol) {
  const double c = level.value_or(reeb_in.edge(cycle_in.edges.front()).representative.level);

  // Make c a sweep level so every cycle edge through it carries its component.
  std::optional<ReebGraph> rebuilt;
  std::optional<Cycle> recycled;
  const ReebGraph* reeb = &reeb_in;
  const Cycle* cycle = &cycle_in;
  if (std::find(reeb_in.sweep_levels.begin(), reeb_in.sweep_levels.end(), c) == reeb_in.sweep_levels.end()) {
    std::vector<CriticalPoint> crit;
    for (const auto& v : reeb_in.vertices) crit.insert(crit.end(), v.points.begin(), v.points.end());
    std::sort(crit.begin(), crit.end(), [](const CriticalPoint& a, const CriticalPoint& b) { return a.value < b.value; });
    rebuilt = build_reeb_graph(field, crit, {c});
    recycled = find_cycle(*rebuilt);
    if (!recycled) throw Error(ErrorKind::Topology, "cycle disappeared after adding the cut level");
    reeb = &*rebuilt;
    cycle = &*recycled;
  }

  CyclicBlockWord out;
  out.level = c;
  for (int id : cycle->edges) {
    for (const auto& curve : reeb->edge(id).chain) {
      if (curve.level != c) continue;
      CutCurve cut;
      cut.edge = id;
      cut.curve = curve;
      out.curves.push_back(std::move(cut));
    }
  }
  if (out.curves.empty()) {
    std::ostringstream msg;
    msg << "level " << c << " meets no edge of the Reeb cycle";
    throw Error(ErrorKind::NoCrossing, msg.str());
  }

  out.curve_class = canonical_class(out.curves.front().curve.homology);
  if (out.curve_class == HomologyClass{0, 0}) throw Error(ErrorKind::Topology, "cycle edge carries a separating curve");
  for (auto& cut : out.curves) {
    const HomologyClass h = cut.curve.homology;
    if (canonical_class(h) != out.curve_class)
      throw Error(ErrorKind::Topology, "cut curves are not parallel");
    cut.reversed = h != out.curve_class;
    if (cut.reversed) {
      std::reverse(cut.curve.points.begin(), cut.curve.points.end());
      std::reverse(cut.curve.grid_edges.begin(), cut.curve.grid_edges.end());
      cut.curve.homology = out.curve_class;
    }
    cut.ell = transverse_coordinate(cut.curve, out.curve_class);
  }
  std::sort(out.curves.begin(), out.curves.end(), [](const CutCurve& a, const CutCurve& b) { return a.ell < b.ell; });
  out.m = static_cast<int>(out.curves.size());
  for (int k = 0; k < out.m; ++k) out.curves[k].index = k;

  // The curve keeps {f > c} on its left as traced; the +ell side is its right.
  // plus_end is the Reeb vertex reached from the +ell side, minus_end the other.
  std::vector<int> plus_end(out.m), minus_end(out.m);
  std::set<int> cut_edges;
  for (const auto& cut : out.curves) {
    const ReebEdge& e = reeb->edge(cut.edge);
    const bool plus_is_high = cut.reversed;
    plus_end[cut.index] = plus_is_high ? e.v : e.u;
    minus_end[cut.index] = plus_is_high ? e.u : e.v;
    cut_edges.insert(cut.edge);
  }

  UnionFind comp(reeb->vertices.size());
  for (const auto& e : reeb->edges)
    if (!cut_edges.count(e.id)) comp.unite(e.u, e.v);

  const double tol = rel_tol.value_or(field.source() ? 1e-4 : 1e-2) * field.range();
  std::vector<BlockTree> trees;
  for (int k = 0; k < out.m; ++k) {
    Block block;
    block.index = k;
    block.left = k;
    block.right = (k + 1) % out.m;
    const std::size_t root = comp.find(plus_end[k]);
    if (comp.find(minus_end[block.right]) != root)
      throw Error(ErrorKind::Topology, "cylinder between consecutive cut curves is not a single block");

    std::map<int, std::vector<int>> adjacency;
    for (const auto& v : reeb->vertices) {
      if (comp.find(v.id) != root) continue;
      block.vertices.push_back(v.id);
      adjacency[v.id];
      for (const auto& p : v.points) {
        block.critical_values.push_back(p.value);
        block.index_counts[static_cast<int>(p.index)]++;
      }
    }
    for (const auto& e : reeb->edges) {
      if (cut_edges.count(e.id) || comp.find(e.u) != root) continue;
      adjacency[e.u].push_back(e.v);
      adjacency[e.v].push_back(e.u);
    }
    std::sort(block.critical_values.begin(), block.critical_values.end());

    // Root the block graph at its left boundary; the right boundary is a marked leaf.
    constexpr int kLeft = -1, kRight = -2;
    adjacency[kLeft].push_back(plus_end[k]);
    adjacency[plus_end[k]].push_back(kLeft);
    adjacency[kRight].push_back(minus_end[block.right]);
    adjacency[minus_end[block.right]].push_back(kRight);

    BlockTree tree;
    std::set<int> seen;
    std::function<int(int, int)> build = [&](int id, int parent) {
      if (!seen.insert(id).second) throw Error(ErrorKind::Topology, "block graph is not a tree");
      const int slot = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      if (id == kLeft) {
        tree.nodes[slot].kind = NodeKind::Left;
      } else if (id == kRight) {
        tree.nodes[slot].kind = NodeKind::Right;
      } else {
        const ReebVertex& v = reeb->vertex(id);
        tree.nodes[slot].value = v.value;
        for (const auto& p : v.points) tree.nodes[slot].counts[static_cast<int>(p.index)]++;
      }
      bool skipped_parent = false;
      for (int next : adjacency[id]) {
        if (next == parent && !skipped_parent) {
          skipped_parent = true;
          continue;
        }
        const int child = build(next, id);
        tree.nodes[slot].children.push_back(child);
      }
      return slot;
    };
    build(kLeft, kLeft - 10);
    if (seen.size() != adjacency.size()) throw Error(ErrorKind::Topology, "block graph is disconnected");

    int label = -1;
    for (int prev = 0; prev < k && label < 0; ++prev) {
      if (isomorphic(trees[prev], 0, tree, 0, tol)) label = out.blocks[prev].label;
    }
    if (label < 0) {
      label = 0;
      for (const auto& b : out.blocks) label = std::max(label, b.label + 1);
    }
    block.label = label;
    out.word.push_back(label);
    trees.push_back(std::move(tree));
    out.blocks.push_back(std::move(block));
  }

  out.cyclic_index = cyclic_index(out.word);
  out.rotation_step = out.m / out.cyclic_index;
  return out;
}

CyclicBlockWord decompose(const GridField& field, std::optional<double> level, std::optional<double> rel_tol) {
  const ReebGraph reeb = build_reeb_graph(field);
  const auto cycle = find_cycle(reeb);
  if (!cycle) throw Error(ErrorKind::NoCycle, "the Kronrod-Reeb graph is a tree; the cyclic index is undefined");
  return decompose(field, reeb, *cycle, level, rel_tol);
}

int cyclic_index(const std::vector<int>& word) {
  const int m = static_cast<int>(word.size());
  if (m == 0) return 1;
  for (int d = 1; d <= m; ++d) {
    if (m % d) continue;
    bool fixed = true;
    for (int i = 0; i < m && fixed; ++i) fixed = word[i] == word[(i + d) % m];
    if (fixed) return m / d;
  }
  return 1;
}

int cyclic_index(const CyclicBlockWord& word) { return cyclic_index(word.word); }

std::vector<int> orbit_curves(const CyclicBlockWord& word, int chosen) {
  if (chosen < 0 || chosen >= word.m) throw Error(ErrorKind::InvalidIndex, "no cut curve " + std::to_string(chosen));
  const int n = cyclic_index(word.word);
  const int step = word.m / n;
  std::vector<int> orbit;
  for (int j = 0; j < n; ++j) orbit.push_back((chosen + j * step) % word.m);
  std::sort(orbit.begin(), orbit.end());
  return orbit;
}

std::string decomposition_to_json(const CyclicBlockWord& word, int chosen, int indent) {
  nlohmann::json doc;
  doc["schema"] = 1;
  doc["level"] = word.level;
  doc["m"] = word.m;
  doc["word"] = word.word;
  doc["cyclic_index"] = word.cyclic_index;
  doc["rotation_step"] = word.rotation_step;
  doc["curve_class"] = {word.curve_class[0], word.curve_class[1]};
  doc["orbit"] = orbit_curves(word, chosen);
  auto& blocks = doc["blocks"] = nlohmann::json::array();
  for (const auto& b : word.blocks)
    blocks.push_back({{"id", b.index},
                      {"left", b.left},
                      {"right", b.right},
                      {"label", b.label},
                      {"critical_values", b.critical_values},
                      {"vertices", b.vertices}});
  auto& curves = doc["curves"] = nlohmann::json::array();
  for (const auto& c : word.curves) curves.push_back({{"id", c.index}, {"edge", c.edge}, {"ell", c.ell}});
  return doc.dump(indent);
}

}  // namespace kreeb
