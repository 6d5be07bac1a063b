#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "kreeb/reeb.hpp"

namespace kreeb {

namespace {

const char* index_name(CriticalIndex k) {
  switch (k) {
    case CriticalIndex::Minimum: return "min";
    case CriticalIndex::Saddle: return "saddle";
    case CriticalIndex::Maximum: return "max";
  }
  return "?";
}

}  // namespace

std::string reeb_to_json(const ReebGraph& graph, const std::optional<Cycle>& cycle, int indent) {
  nlohmann::json doc;
  doc["schema"] = 1;
  doc["betti1"] = graph.betti1;
  doc["components"] = graph.components;
  auto& vs = doc["vertices"] = nlohmann::json::array();
  for (const auto& v : graph.vertices) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : v.points)
      pts.push_back({{"x", p.location.x}, {"y", p.location.y}, {"value", p.value}, {"index", static_cast<int>(p.index)},
                     {"kind", index_name(p.index)}});
    vs.push_back({{"id", v.id}, {"value", v.value}, {"degree", v.degree}, {"points", pts}});
  }
  auto& es = doc["edges"] = nlohmann::json::array();
  for (const auto& e : graph.edges) {
    es.push_back({{"id", e.id},
                  {"u", e.u},
                  {"v", e.v},
                  {"vmin", e.vmin},
                  {"vmax", e.vmax},
                  {"level", e.representative.level},
                  {"homology", {e.homology[0], e.homology[1]}},
                  {"separating", e.representative.separating()}});
  }
  if (cycle) doc["cycle"] = {{"edges", cycle->edges}, {"vertices", cycle->vertices}};
  return doc.dump(indent);
}

std::string render_reeb_svg(const ReebGraph& graph, const std::optional<Cycle>& cycle) {
  const double width = 520, height = 520, margin = 40;
  double lo = 0, hi = 1;
  if (!graph.vertices.empty()) {
    lo = graph.vertices.front().value;
    hi = lo;
    for (const auto& v : graph.vertices) lo = std::min(lo, v.value), hi = std::max(hi, v.value);
  }
  const double span = hi > lo ? hi - lo : 1.0;

  std::map<int, std::pair<double, double>> pos;
  for (const auto& v : graph.vertices) {
    const double x = margin + v.points.front().location.x * (width - 2 * margin);
    const double y = margin + (hi - v.value) / span * (height - 2 * margin);
    pos[v.id] = {x, y};
  }
  std::set<int> on_cycle;
  if (cycle) on_cycle.insert(cycle->edges.begin(), cycle->edges.end());

  std::ostringstream svg;
  char buf[256];
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& e : graph.edges) {
    const auto [x1, y1] = pos[e.u];
    const auto [x2, y2] = pos[e.v];
    const char* colour = on_cycle.count(e.id) ? "#c0392b" : "#34495e";
    if (e.u == e.v) {
      std::snprintf(buf, sizeof buf,
                    "<path d=\"M %.2f %.2f c 40 -60 -40 -60 0 0\" fill=\"none\" stroke=\"%s\" stroke-width=\"2\"/>\n", x1,
                    y1, colour);
    } else {
      // Parallel edges bow apart so both stay visible.
      int rank = 0;
      for (const auto& f : graph.edges)
        if (f.id < e.id && f.u == e.u && f.v == e.v) ++rank;
      const double bow = rank == 0 ? 0.0 : (rank % 2 ? 1 : -1) * 30.0 * ((rank + 1) / 2);
      std::snprintf(buf, sizeof buf,
                    "<path d=\"M %.2f %.2f Q %.2f %.2f %.2f %.2f\" fill=\"none\" stroke=\"%s\" stroke-width=\"2\"/>\n",
                    x1, y1, 0.5 * (x1 + x2) + bow, 0.5 * (y1 + y2), x2, y2, colour);
    }
    svg << buf;
  }
  for (const auto& v : graph.vertices) {
    const auto [x, y] = pos[v.id];
    const CriticalIndex k = v.points.front().index;
    const char* fill = k == CriticalIndex::Maximum ? "#e67e22" : k == CriticalIndex::Minimum ? "#2980b9" : "#27ae60";
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"6\" fill=\"%s\"/>\n"
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\" font-family=\"monospace\">v%d %.4g</text>\n",
                  x, y, fill, x + 9, y - 6, v.id, v.value);
    svg << buf;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace kreeb
