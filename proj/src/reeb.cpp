#include "kreeb/reeb.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "kreeb/error.hpp"

namespace kreeb {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a), b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> rank_;
};

struct Attachment {
  std::size_t curve;  // index into the traced curve list
  bool low_side;      // region lies below the curve's level
};

struct Region {
  std::vector<std::size_t> criticals;
  std::vector<Attachment> curves;
};

bool point_less(const CriticalPoint& a, const CriticalPoint& b) {
  return std::tie(a.value, a.location.x, a.location.y) < std::tie(b.value, b.location.x, b.location.y);
}

double leftmost_x(const LevelCurve& c) {
  double m = 1.0;
  for (const auto& p : c.points) m = std::min(m, p.x);
  return m;
}

}  // namespace

ReebGraph build_reeb_graph(const GridField& field) { return build_reeb_graph(field, find_critical_points(field)); }

ReebGraph build_reeb_graph(const GridField& field, const std::vector<CriticalPoint>& criticals,
                           const std::vector<double>& extra_levels) {
  if (criticals.empty()) throw Error(ErrorKind::Topology, "a Morse field on the torus has critical points");
  const int n = field.resolution();
  const double tol = regular_value_tolerance(field);

  // Critical levels, then sweep levels at their midpoints plus any requested extras.
  std::vector<double> values;
  for (const auto& p : criticals) values.push_back(p.value);
  std::sort(values.begin(), values.end());
  std::vector<double> levels{values.front()};
  for (double v : values)
    if (v - levels.back() > tol) levels.push_back(v);
  std::vector<double> sweep;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) sweep.push_back(0.5 * (levels[k] + levels[k + 1]));
  for (double c : extra_levels) {
    require_regular_value(field, criticals, c);
    if (std::find(sweep.begin(), sweep.end(), c) == sweep.end()) sweep.push_back(c);
  }
  std::sort(sweep.begin(), sweep.end());

  auto band_of = [&](double v) { return static_cast<int>(std::upper_bound(sweep.begin(), sweep.end(), v) - sweep.begin()); };

  const std::size_t count = static_cast<std::size_t>(n) * n;
  std::vector<int> band(count);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) band[field.index(i, j)] = band_of(field.value(i, j));

  UnionFind uf(count);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t a = field.index(i, j), r = field.index(i + 1, j), u = field.index(i, j + 1),
                        d = field.index(i + 1, j + 1);
      if (band[a] == band[r]) uf.unite(a, r);
      if (band[a] == band[u]) uf.unite(a, u);
      // Diagonal pairs inside a cell whose other corners leave the band; the
      // asymptotic decider matches the marching-squares choice at the band edges.
      auto diagonal = [&](std::size_t p, std::size_t q, std::size_t o1, std::size_t o2) {
        const int b = band[p];
        if (band[q] != b || band[o1] == b || band[o2] == b) return;
        const bool above1 = band[o1] > b, above2 = band[o2] > b;
        if (above1 != above2) {
          uf.unite(p, q);
          return;
        }
        const double v00 = field.value(i, j), v10 = field.value(i + 1, j);
        const double v01 = field.value(i, j + 1), v11 = field.value(i + 1, j + 1);
        const double denom = v00 + v11 - v10 - v01;
        const double s = denom != 0.0 ? (v00 * v11 - v10 * v01) / denom : 0.25 * (v00 + v10 + v01 + v11);
        if (band_of(s) == b) uf.unite(p, q);
      };
      diagonal(a, d, r, u);
      diagonal(r, u, a, d);
    }
  }

  std::map<std::size_t, Region> regions;

  // Critical points join the region of a nearby node lying in their own band.
  for (std::size_t k = 0; k < criticals.size(); ++k) {
    const CriticalPoint& cp = criticals[k];
    const int b = band_of(cp.value);
    const double px = cp.location.x * n, py = cp.location.y * n;
    const int ci = static_cast<int>(std::floor(px)), cj = static_cast<int>(std::floor(py));
    std::optional<std::size_t> best;
    double best_d = 0.0;
    for (int dj = -1; dj <= 2; ++dj) {
      for (int di = -1; di <= 2; ++di) {
        const std::size_t node = field.index(ci + di, cj + dj);
        if (band[node] != b) continue;
        const double d = std::hypot(ci + di - px, cj + dj - py);
        if (!best || d < best_d) best = node, best_d = d;
      }
    }
    if (!best) {
      std::ostringstream msg;
      msg << "no grid node near the critical point at (" << cp.location.x << ", " << cp.location.y
          << ") lies in its band; increase the resolution";
      throw Error(ErrorKind::Topology, msg.str());
    }
    regions[uf.find(*best)].criticals.push_back(k);
  }

  // Components at each sweep level, attached to the regions on either side.
  std::vector<LevelCurve> curves;
  std::vector<std::pair<std::size_t, std::size_t>> curve_sides;  // (low region, high region)
  for (std::size_t s = 0; s < sweep.size(); ++s) {
    const int lower = static_cast<int>(s), upper = lower + 1;
    for (auto& curve : enumerate_level_components(field, sweep[s], criticals)) {
      std::optional<std::pair<std::size_t, std::size_t>> sides;
      for (std::size_t ge : curve.grid_edges) {
        const GridEdgeNodes e = grid_edge_nodes(n, ge);
        std::size_t lo = field.index(e.a.i, e.a.j), hi = field.index(e.b.i, e.b.j);
        if (band[lo] > band[hi]) std::swap(lo, hi);
        if (band[lo] == lower && band[hi] == upper) {
          sides = {uf.find(lo), uf.find(hi)};
          break;
        }
      }
      if (!sides) {
        std::ostringstream msg;
        msg << "level " << sweep[s] << " component has no grid edge between adjacent bands; increase the resolution";
        throw Error(ErrorKind::Topology, msg.str());
      }
      const std::size_t idx = curves.size();
      regions[sides->first].curves.push_back({idx, true});
      regions[sides->second].curves.push_back({idx, false});
      curve_sides.push_back(*sides);
      curves.push_back(std::move(curve));
    }
  }

  // Vertex regions in (value, x, y) order of their lowest critical point.
  std::vector<std::size_t> vertex_roots;
  for (auto& [root, reg] : regions) {
    if (!reg.criticals.empty()) {
      std::sort(reg.criticals.begin(), reg.criticals.end(),
                [&](std::size_t a, std::size_t b) { return point_less(criticals[a], criticals[b]); });
      vertex_roots.push_back(root);
    } else if (reg.curves.size() != 2) {
      std::ostringstream msg;
      msg << "regular region meets " << reg.curves.size() << " level components instead of 2";
      throw Error(ErrorKind::Topology, msg.str());
    }
  }
  std::sort(vertex_roots.begin(), vertex_roots.end(), [&](std::size_t a, std::size_t b) {
    return point_less(criticals[regions[a].criticals.front()], criticals[regions[b].criticals.front()]);
  });

  ReebGraph g;
  g.sweep_levels = sweep;
  std::map<std::size_t, int> vertex_id;
  for (std::size_t k = 0; k < vertex_roots.size(); ++k) {
    const Region& reg = regions[vertex_roots[k]];
    ReebVertex v;
    v.id = static_cast<int>(k);
    for (std::size_t c : reg.criticals) v.points.push_back(criticals[c]);
    v.value = v.points.front().value;
    vertex_id[vertex_roots[k]] = v.id;
    g.vertices.push_back(std::move(v));
  }

  // Walk every chain of regular regions from one vertex region to another.
  std::vector<char> used(curves.size(), 0);
  auto other_side = [&](std::size_t curve, std::size_t region) {
    const auto [lo, hi] = curve_sides[curve];
    return lo == region ? hi : lo;
  };

  for (std::size_t root : vertex_roots) {
    for (const Attachment& start : regions[root].curves) {
      if (used[start.curve]) continue;
      std::vector<std::size_t> chain{start.curve};
      used[start.curve] = 1;
      std::size_t here = other_side(start.curve, root);
      std::size_t last = start.curve;
      while (regions[here].criticals.empty()) {
        const auto& att = regions[here].curves;
        const std::size_t next = att[0].curve == last ? att[1].curve : att[0].curve;
        if (used[next]) throw Error(ErrorKind::Topology, "regular region chain closes on itself");
        used[next] = 1;
        chain.push_back(next);
        last = next;
        here = other_side(next, here);
      }
      std::sort(chain.begin(), chain.end(), [&](std::size_t a, std::size_t b) { return curves[a].level < curves[b].level; });

      ReebEdge e;
      // A chain leaving `root` upward starts at its low side.
      const bool upward = start.low_side;
      e.u = upward ? vertex_id[root] : vertex_id[here];
      e.v = upward ? vertex_id[here] : vertex_id[root];
      e.vmin = g.vertices[e.u].value;
      e.vmax = g.vertices[e.v].value;
      const double mid = 0.5 * (e.vmin + e.vmax);
      std::size_t rep = chain.front();
      for (std::size_t c : chain)
        if (std::abs(curves[c].level - mid) < std::abs(curves[rep].level - mid)) rep = c;
      e.representative = curves[rep];
      e.homology = e.representative.homology;
      for (std::size_t c : chain) e.chain.push_back(curves[c]);
      g.edges.push_back(std::move(e));
    }
  }
  for (std::size_t c = 0; c < curves.size(); ++c)
    if (!used[c]) throw Error(ErrorKind::Topology, "level component not reached from any critical component");

  std::sort(g.edges.begin(), g.edges.end(), [](const ReebEdge& a, const ReebEdge& b) {
    const TorusPoint pa = a.representative.points.front(), pb = b.representative.points.front();
    return std::make_tuple(a.vmin, a.vmax, a.u, a.v, leftmost_x(a.representative), pa.y) <
           std::make_tuple(b.vmin, b.vmax, b.u, b.v, leftmost_x(b.representative), pb.y);
  });
  UnionFind comp(g.vertices.size());
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    ReebEdge& e = g.edges[k];
    e.id = static_cast<int>(k);
    g.vertices[e.u].degree++;
    g.vertices[e.v].degree++;
    comp.unite(e.u, e.v);
  }
  for (std::size_t k = 0; k < g.vertices.size(); ++k) g.components += comp.find(k) == k;
  g.betti1 = static_cast<int>(g.edges.size()) - static_cast<int>(g.vertices.size()) + g.components;
  return g;
}

std::optional<Cycle> find_cycle(const ReebGraph& graph) {
  if (graph.betti1 > 1)
    throw Error(ErrorKind::MultipleCycles, "Reeb graph has betti1 = " + std::to_string(graph.betti1));
  if (graph.betti1 <= 0) return std::nullopt;

  std::vector<int> degree(graph.vertices.size(), 0);
  std::vector<char> alive(graph.edges.size(), 1);
  for (const auto& e : graph.edges) degree[e.u]++, degree[e.v]++;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : graph.edges) {
      if (!alive[e.id] || e.u == e.v) continue;
      if (degree[e.u] == 1 || degree[e.v] == 1) {
        alive[e.id] = 0;
        degree[e.u]--, degree[e.v]--;
        changed = true;
      }
    }
  }

  Cycle cycle;
  int first = -1;
  for (const auto& e : graph.edges)
    if (alive[e.id]) {
      first = e.id;
      break;
    }
  if (first < 0) throw Error(ErrorKind::Topology, "betti1 = 1 but no cycle survives leaf stripping");
  std::vector<char> taken(graph.edges.size(), 0);
  int at = graph.edge(first).u;
  int current = first;
  const int start = at;
  while (true) {
    const ReebEdge& e = graph.edge(current);
    taken[current] = 1;
    cycle.edges.push_back(current);
    cycle.vertices.push_back(at);
    at = e.u == at ? e.v : e.u;
    if (at == start) break;
    int next = -1;
    for (const auto& f : graph.edges)
      if (alive[f.id] && !taken[f.id] && (f.u == at || f.v == at)) {
        next = f.id;
        break;
      }
    if (next < 0) throw Error(ErrorKind::Topology, "cycle walk got stuck");
    current = next;
  }
  for (const auto& e : graph.edges)
    if (alive[e.id] && !taken[e.id]) throw Error(ErrorKind::MultipleCycles, "cycle core is not a single loop");
  return cycle;
}

}  // namespace kreeb
