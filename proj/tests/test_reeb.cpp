#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "kreeb/error.hpp"
#include "kreeb/reeb.hpp"

using namespace kreeb;

namespace {

GridField field_of(const std::string& e, int res = 128) { return sample_grid(parse_field_expr(e), res); }

std::multiset<int> degrees(const ReebGraph& g) {
  std::multiset<int> d;
  for (const auto& v : g.vertices) d.insert(v.degree);
  return d;
}

const char* assorted[] = {
    "cos(2*pi*x)+0.5*cos(2*pi*y)",
    "cos(4*pi*x)+0.5*cos(2*pi*y)",
    "cos(6*pi*x)+0.5*cos(2*pi*y)",
    "cos(2*pi*x)*cos(2*pi*y)",
    "sin(2*pi*x)+cos(2*pi*y)+0.3*sin(2*pi*(x+y))",
    "cos(2*pi*x)+0.4*cos(4*pi*y)+0.1*sin(2*pi*(x-y))",
    "0.5*cos(2*pi*x)+cos(2*pi*(x+y))",
    "exp(cos(2*pi*x))+0.7*sin(2*pi*y)+0.2*cos(2*pi*(x-y))",
};

}  // namespace

TEST_CASE("Reeb graph of the n=1 fixture") {
  const ReebGraph g = build_reeb_graph(field_of(testing::family_expr(1)));
  CHECK(g.vertices.size() == 4);
  CHECK(g.edges.size() == 4);
  CHECK(g.betti1 == 1);
  CHECK(g.components == 1);
  CHECK(degrees(g) == std::multiset<int>{1, 1, 3, 3});
  CHECK(g.vertices.front().value == doctest::Approx(-1.5));
  CHECK(g.vertices.back().value == doctest::Approx(1.5));
  const auto cycle = find_cycle(g);
  REQUIRE(cycle);
  CHECK(cycle->edges.size() == 2);
  for (int id : cycle->edges) {
    const ReebEdge& e = g.edge(id);
    CHECK(g.vertex(e.u).value == doctest::Approx(-0.5));
    CHECK(g.vertex(e.v).value == doctest::Approx(0.5));
  }
}

TEST_CASE("Reeb graph of the n=2 fixture") {
  const ReebGraph g = build_reeb_graph(field_of(testing::family_expr(2), 256));
  CHECK(g.vertices.size() == 8);
  CHECK(g.edges.size() == 8);
  CHECK(g.betti1 == 1);
  CHECK(degrees(g) == std::multiset<int>{1, 1, 1, 1, 3, 3, 3, 3});
  const auto cycle = find_cycle(g);
  REQUIRE(cycle);
  CHECK(cycle->edges.size() == 4);
}

TEST_CASE("Reeb graph of the product field is a tree") {
  const ReebGraph g = build_reeb_graph(field_of(testing::tree_expr()));
  CHECK(g.betti1 == 0);
  CHECK(g.vertices.size() == 5);
  CHECK(g.edges.size() == 4);
  CHECK(degrees(g) == std::multiset<int>{1, 1, 1, 1, 4});
  CHECK_FALSE(find_cycle(g).has_value());
  for (const auto& e : g.edges) CHECK(e.representative.separating());
}

TEST_CASE("cycle edges are exactly the non-separating ones") {
  for (const char* e : assorted) {
    CAPTURE(e);
    const ReebGraph g = build_reeb_graph(field_of(e));
    CHECK(g.betti1 <= 1);
    CHECK(g.betti1 == static_cast<int>(g.edges.size()) - static_cast<int>(g.vertices.size()) + g.components);
    const auto cycle = find_cycle(g);
    std::set<int> on(cycle ? cycle->edges.begin() : std::vector<int>::const_iterator{},
                     cycle ? cycle->edges.end() : std::vector<int>::const_iterator{});
    for (const auto& edge : g.edges) {
      CAPTURE(edge.id);
      CHECK(on.count(edge.id) == (edge.representative.separating() ? 0u : 1u));
      for (const auto& c : edge.chain) CHECK(c.separating() == edge.representative.separating());
    }
  }
}

TEST_CASE("edges run upward through regular levels") {
  for (const char* e : assorted) {
    CAPTURE(e);
    const GridField f = field_of(e);
    const auto crit = find_critical_points(f);
    const ReebGraph g = build_reeb_graph(f, crit);
    int degree_sum = 0;
    std::size_t points = 0;
    for (const auto& v : g.vertices) degree_sum += v.degree, points += v.points.size();
    CHECK(degree_sum == 2 * static_cast<int>(g.edges.size()));
    CHECK(points == crit.size());
    for (const auto& edge : g.edges) {
      CHECK(edge.vmin < edge.vmax);
      CHECK(edge.vmin == g.vertex(edge.u).value);
      CHECK(edge.vmax == g.vertex(edge.v).value);
      CHECK(edge.representative.level > edge.vmin);
      CHECK(edge.representative.level < edge.vmax);
      CHECK_NOTHROW(require_regular_value(f, crit, edge.representative.level));
      for (std::size_t k = 1; k < edge.chain.size(); ++k) CHECK(edge.chain[k - 1].level < edge.chain[k].level);
    }
    for (std::size_t k = 1; k < g.vertices.size(); ++k) CHECK(g.vertices[k - 1].value <= g.vertices[k].value);
    for (const auto& v : g.vertices) {
      const CriticalIndex kind = v.points.front().index;
      if (v.points.size() == 1 && kind != CriticalIndex::Saddle) CHECK(v.degree == 1);
      if (v.points.size() == 1 && kind == CriticalIndex::Saddle) CHECK(v.degree == 3);
    }
  }
}

TEST_CASE("extra sweep levels subdivide chains without changing the graph") {
  const GridField f = field_of(testing::family_expr(1));
  const auto crit = find_critical_points(f);
  const ReebGraph base = build_reeb_graph(f, crit);
  const ReebGraph fine = build_reeb_graph(f, crit, {0.2, -0.3});
  CHECK(fine.vertices.size() == base.vertices.size());
  CHECK(fine.edges.size() == base.edges.size());
  CHECK(fine.betti1 == 1);
  int with_extra = 0;
  for (const auto& e : fine.edges)
    for (const auto& c : e.chain) with_extra += c.level == 0.2;
  CHECK(with_extra == 2);
  CHECK_THROWS_AS(build_reeb_graph(f, crit, {0.5}), Error);
}

TEST_CASE("vertex and edge ids are deterministic") {
  const GridField f = field_of(assorted[4]);
  const std::string a = reeb_to_json(build_reeb_graph(f), std::nullopt);
  const std::string b = reeb_to_json(build_reeb_graph(f), std::nullopt);
  CHECK(a == b);
}

TEST_CASE("find_cycle rejects betti1 > 1") {
  ReebGraph g;
  g.vertices.resize(2);
  g.vertices[0].id = 0;
  g.vertices[1].id = 1;
  for (int k = 0; k < 3; ++k) {
    ReebEdge e;
    e.id = k;
    e.u = 0;
    e.v = 1;
    g.edges.push_back(e);
  }
  g.components = 1;
  g.betti1 = 2;
  try {
    find_cycle(g);
    FAIL("expected MultipleCycles");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MultipleCycles);
  }
}

TEST_CASE("JSON and SVG renderings") {
  const ReebGraph g = build_reeb_graph(field_of(testing::family_expr(1)));
  const auto cycle = find_cycle(g);
  const auto doc = nlohmann::json::parse(reeb_to_json(g, cycle));
  CHECK(doc["schema"] == 1);
  CHECK(doc["betti1"] == 1);
  CHECK(doc["vertices"].size() == 4);
  CHECK(doc["edges"].size() == 4);
  CHECK(doc["cycle"]["edges"].size() == 2);
  for (const auto& e : doc["edges"]) CHECK(e["homology"].size() == 2);
  const std::string svg = render_reeb_svg(g, cycle);
  CHECK(svg.rfind("<svg", 0) == 0);
  std::size_t circles = 0;
  for (std::size_t at = svg.find("<circle"); at != std::string::npos; at = svg.find("<circle", at + 1)) ++circles;
  CHECK(circles == 4);
}
