#include "kreeb/morse.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "kreeb/error.hpp"

namespace kreeb {

GridEdgeNodes grid_edge_nodes(int resolution, std::size_t edge) {
  const std::size_t node = edge / 2;
  const int i = static_cast<int>(node % resolution);
  const int j = static_cast<int>(node / resolution);
  if (edge % 2 == 0) return {{i, j}, {(i + 1) % resolution, j}};
  return {{i, j}, {i, (j + 1) % resolution}};
}

Cell cell_of(const GridField& field, TorusPoint p) {
  const int n = field.resolution();
  return {std::min(n - 1, static_cast<int>(std::floor(p.x * n))), std::min(n - 1, static_cast<int>(std::floor(p.y * n)))};
}

namespace {

struct Refined {
  Vec2 z;  // lifted position near the candidate cell
  bool ok = false;
};

// Newton on the bilinear interpolants of the gradient stencils.
Refined newton_on_interpolant(const GridField& f, Cell cell) {
  const double h = 1.0 / f.resolution();
  const Vec2 center{(cell.i + 0.5) * h, (cell.j + 0.5) * h};
  Vec2 z = center;
  for (int iter = 0; iter < 20; ++iter) {
    const TorusPoint p(z);
    const Gradient g = eval_gradient(f, p);
    const Hessian H = eval_hessian(f, p);
    const double det = H.det();
    if (det == 0.0 || !std::isfinite(det)) return {z, false};
    const Vec2 stepv{(H.yy * g.gx - H.xy * g.gy) / det, (-H.xy * g.gx + H.xx * g.gy) / det};
    z = z - stepv;
    if (std::abs(z.x - center.x) > 1.5 * h || std::abs(z.y - center.y) > 1.5 * h) return {z, false};
    if (std::hypot(stepv.x, stepv.y) < 1e-13) return {z, true};
  }
  return {z, true};
}

// Fallback: minimise |grad|^2 along the two cell diagonals by golden-section search.
Refined diagonal_search(const GridField& f, Cell cell) {
  const double h = 1.0 / f.resolution();
  const Vec2 origin{cell.i * h, cell.j * h};
  auto norm2 = [&](Vec2 z) {
    const Gradient g = eval_gradient(f, TorusPoint(z));
    return g.gx * g.gx + g.gy * g.gy;
  };
  Refined best{origin, true};
  double best_val = norm2(origin);
  const std::array<std::array<Vec2, 2>, 2> diagonals{{{origin, origin + Vec2{h, h}},
                                                      {origin + Vec2{0, h}, origin + Vec2{h, 0}}}};
  for (const auto& d : diagonals) {
    auto at = [&](double t) { return d[0] + t * (d[1] - d[0]); };
    double a = 0.0, b = 1.0;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 60; ++it) {
      const double c1 = b - r * (b - a), c2 = a + r * (b - a);
      if (norm2(at(c1)) < norm2(at(c2))) {
        b = c2;
      } else {
        a = c1;
      }
    }
    const Vec2 z = at(0.5 * (a + b));
    const double v = norm2(z);
    if (v < best_val) {
      best_val = v;
      best.z = z;
    }
  }
  return best;
}

struct ExprDerivatives {
  Gradient g;
  Hessian H;
};

ExprDerivatives expr_derivatives(const FieldExpr& e, Vec2 z) {
  const double hg = 1e-5, hh = 1e-4;
  ExprDerivatives d;
  d.g.gx = (e(z.x + hg, z.y) - e(z.x - hg, z.y)) / (2 * hg);
  d.g.gy = (e(z.x, z.y + hg) - e(z.x, z.y - hg)) / (2 * hg);
  const double c = e(z.x, z.y);
  d.H.xx = (e(z.x + hh, z.y) - 2 * c + e(z.x - hh, z.y)) / (hh * hh);
  d.H.yy = (e(z.x, z.y + hh) - 2 * c + e(z.x, z.y - hh)) / (hh * hh);
  d.H.xy = (e(z.x + hh, z.y + hh) - e(z.x + hh, z.y - hh) - e(z.x - hh, z.y + hh) + e(z.x - hh, z.y - hh)) /
           (4 * hh * hh);
  return d;
}

// Newton on the expression itself; nullopt when it wanders off or the gradient
// does not vanish, which marks a false candidate.
std::optional<Vec2> polish_with_expression(const FieldExpr& e, Vec2 z, double max_move, double grad_scale) {
  const Vec2 start = z;
  for (int iter = 0; iter < 10; ++iter) {
    const ExprDerivatives d = expr_derivatives(e, z);
    const double det = d.H.det();
    if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
    const Vec2 stepv{(d.H.yy * d.g.gx - d.H.xy * d.g.gy) / det, (-d.H.xy * d.g.gx + d.H.xx * d.g.gy) / det};
    z = z - stepv;
    if (std::hypot(z.x - start.x, z.y - start.y) > max_move) return std::nullopt;
    if (std::hypot(stepv.x, stepv.y) < 1e-14) break;
  }
  const Gradient g = expr_derivatives(e, z).g;
  if (std::hypot(g.gx, g.gy) > 1e-6 * grad_scale) return std::nullopt;
  return z;
}

// One Newton step of the Taylor model at the nearest node must land close to z.
// Along narrow valleys both gradient components flip sign in many cells and the
// interpolant can cross zero where the field has no critical point.
bool taylor_consistent(const GridField& f, Vec2 z) {
  const int n = f.resolution();
  const int ni = static_cast<int>(std::lround(z.x * n)), nj = static_cast<int>(std::lround(z.y * n));
  const Gradient g = f.gradient(ni, nj);
  const Hessian H = f.hessian(ni, nj);
  const double det = H.det();
  if (det == 0.0 || !std::isfinite(det)) return true;
  const Vec2 node{double(ni) / n, double(nj) / n};
  const Vec2 pred = node - Vec2{(H.yy * g.gx - H.xy * g.gy) / det, (-H.xy * g.gx + H.xx * g.gy) / det};
  return std::hypot(pred.x - z.x, pred.y - z.y) < 1.0 / n;
}

bool changes_sign(double a, double b, double c, double d) {
  const double lo = std::min({a, b, c, d}), hi = std::max({a, b, c, d});
  return lo <= 0.0 && hi >= 0.0;
}

}  // namespace

std::vector<CriticalPoint> find_critical_points(const GridField& field) {
  const int n = field.resolution();
  const double h = 1.0 / n;

  double hscale = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Hessian H = field.hessian(i, j);
      hscale = std::max({hscale, std::abs(H.xx), std::abs(H.yy), std::abs(H.xy)});
    }
  if (hscale == 0.0 || field.range() == 0.0)
    throw Error(ErrorKind::DegenerateCritical, "field is constant; every point is critical");
  const double det_tol = 1e-6 * hscale * hscale;
  double grad_scale = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Gradient g = field.gradient(i, j);
      grad_scale = std::max(grad_scale, std::hypot(g.gx, g.gy));
    }

  std::vector<Vec2> found;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Gradient g00 = field.gradient(i, j), g10 = field.gradient(i + 1, j);
      const Gradient g01 = field.gradient(i, j + 1), g11 = field.gradient(i + 1, j + 1);
      if (!changes_sign(g00.gx, g10.gx, g01.gx, g11.gx) || !changes_sign(g00.gy, g10.gy, g01.gy, g11.gy)) continue;

      Refined r = newton_on_interpolant(field, {i, j});
      if (!r.ok) r = diagonal_search(field, {i, j});
      // Keep only points that belong to this cell (closed, with a small margin).
      const double margin = 1e-6 * h;
      if (r.z.x < i * h - margin || r.z.x > (i + 1) * h + margin || r.z.y < j * h - margin ||
          r.z.y > (j + 1) * h + margin)
        continue;
      if (!taylor_consistent(field, r.z)) continue;
      found.push_back(r.z);
    }
  }

  std::vector<CriticalPoint> result;
  std::vector<TorusPoint> accepted;
  for (Vec2 z : found) {
    if (field.source()) {
      const auto polished = polish_with_expression(*field.source(), z, h, grad_scale);
      if (!polished) continue;
      z = *polished;
    }
    const TorusPoint p0(z);
    bool duplicate = false;
    for (const TorusPoint& q : accepted)
      if (torus_distance(p0, q) < 0.5 * h) {
        duplicate = true;
        break;
      }
    if (duplicate) continue;
    accepted.push_back(p0);

    CriticalPoint cp;
    Hessian H;
    if (field.source()) {
      cp.location = p0;
      cp.value = (*field.source())(z.x, z.y);
      H = expr_derivatives(*field.source(), z).H;
    } else {
      cp.location = p0;
      const int ni = static_cast<int>(std::lround(z.x * n)), nj = static_cast<int>(std::lround(z.y * n));
      const Vec2 d{z.x - double(ni) / n, z.y - double(nj) / n};
      const Gradient g = field.gradient(ni, nj);
      const Hessian Hn = field.hessian(ni, nj);
      cp.value = field.value(ni, nj) + g.gx * d.x + g.gy * d.y +
                 0.5 * (Hn.xx * d.x * d.x + 2 * Hn.xy * d.x * d.y + Hn.yy * d.y * d.y);
      H = eval_hessian(field, p0);
    }
    cp.hessian_det = H.det();
    if (std::abs(cp.hessian_det) <= det_tol) {
      std::ostringstream msg;
      msg << "degenerate critical point at (" << cp.location.x << ", " << cp.location.y << "), det Hessian "
          << cp.hessian_det;
      throw Error(ErrorKind::DegenerateCritical, msg.str());
    }
    if (cp.hessian_det < 0) {
      cp.index = CriticalIndex::Saddle;
    } else {
      cp.index = (H.xx + H.yy) > 0 ? CriticalIndex::Minimum : CriticalIndex::Maximum;
    }
    result.push_back(cp);
  }

  std::sort(result.begin(), result.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.location.x != b.location.x) return a.location.x < b.location.x;
    return a.location.y < b.location.y;
  });
  return result;
}

int euler_characteristic(const std::vector<CriticalPoint>& points) {
  int chi = 0;
  for (const auto& p : points) chi += (p.index == CriticalIndex::Saddle) ? -1 : 1;
  return chi;
}

double regular_value_tolerance(const GridField& field) { return 1e-6 * field.range(); }

void require_regular_value(const GridField& field, const std::vector<CriticalPoint>& criticals, double c) {
  const double tol = regular_value_tolerance(field);
  for (const auto& p : criticals) {
    if (std::abs(c - p.value) <= tol) {
      std::ostringstream msg;
      msg << "level " << c << " is within " << tol << " of critical value " << p.value;
      throw Error(ErrorKind::CriticalLevel, msg.str());
    }
  }
}

namespace {

// Local cell edges: 0 bottom, 1 right, 2 top, 3 left.
class LevelTracer {
 public:
  LevelTracer(const GridField& f, double c) : f_(f), c_(c), n_(f.resolution()) {}

  bool high(int i, int j) const { return f_.value(i, j) >= c_; }

  bool crosses(std::size_t edge) const {
    const GridEdgeNodes e = grid_edge_nodes(n_, edge);
    return high(e.a.i, e.a.j) != high(e.b.i, e.b.j);
  }

  std::size_t edge_count() const { return 2 * static_cast<std::size_t>(n_) * n_; }

  std::size_t global_edge(int i, int j, int local) const {
    const int wi = f_.wrap(i), wj = f_.wrap(j);
    switch (local) {
      case 0: return 2 * (static_cast<std::size_t>(wj) * n_ + wi);
      case 1: return 2 * (static_cast<std::size_t>(wj) * n_ + f_.wrap(wi + 1)) + 1;
      case 2: return 2 * (static_cast<std::size_t>(f_.wrap(wj + 1)) * n_ + wi);
      default: return 2 * (static_cast<std::size_t>(wj) * n_ + wi) + 1;
    }
  }

  bool local_crosses(int i, int j, int local) const { return crosses(global_edge(i, j, local)); }

  // Partner of `local` within cell (i, j); -1 when the cell does not continue the curve.
  int partner(int i, int j, int local) const {
    std::array<bool, 4> cross{};
    int count = 0;
    for (int k = 0; k < 4; ++k) {
      cross[k] = local_crosses(i, j, k);
      count += cross[k];
    }
    if (!cross[local]) return -1;
    if (count == 2) {
      for (int k = 0; k < 4; ++k)
        if (k != local && cross[k]) return k;
      return -1;
    }
    if (count != 4) return -1;
    const double v00 = f_.value(i, j), v10 = f_.value(i + 1, j);
    const double v01 = f_.value(i, j + 1), v11 = f_.value(i + 1, j + 1);
    const double denom = v00 + v11 - v10 - v01;
    const double s = denom != 0.0 ? (v00 * v11 - v10 * v01) / denom : 0.25 * (v00 + v10 + v01 + v11);
    static constexpr int isolate_10_01[4] = {1, 0, 3, 2};  // {bottom,right}, {top,left}
    static constexpr int isolate_00_11[4] = {3, 2, 1, 0};  // {bottom,left}, {right,top}
    const bool diag00_joined = (s >= c_) == (v00 >= c_);
    return diag00_joined ? isolate_10_01[local] : isolate_00_11[local];
  }

  // Unwrapped crossing point on local edge of unwrapped cell (I, J).
  Vec2 crossing(int I, int J, int local) const {
    auto frac = [&](double a, double b) { return (c_ - a) / (b - a); };
    const double h = 1.0 / n_;
    switch (local) {
      case 0: return {(I + frac(f_.value(I, J), f_.value(I + 1, J))) * h, J * h};
      case 1: return {(I + 1) * h, (J + frac(f_.value(I + 1, J), f_.value(I + 1, J + 1))) * h};
      case 2: return {(I + frac(f_.value(I, J + 1), f_.value(I + 1, J + 1))) * h, (J + 1) * h};
      default: return {I * h, (J + frac(f_.value(I, J), f_.value(I, J + 1))) * h};
    }
  }

  LevelCurve trace(std::size_t start_edge) const {
    const GridEdgeNodes e = grid_edge_nodes(n_, start_edge);
    int I, J, entry;
    if (start_edge % 2 == 0) {
      // Horizontal edge: moving +y keeps node a on the left.
      if (high(e.a.i, e.a.j)) {
        I = e.a.i, J = e.a.j, entry = 0;
      } else {
        I = e.a.i, J = e.a.j - 1, entry = 2;
      }
    } else {
      // Vertical edge: moving +x keeps node b on the left.
      if (high(e.b.i, e.b.j)) {
        I = e.a.i, J = e.a.j, entry = 3;
      } else {
        I = e.a.i - 1, J = e.a.j, entry = 1;
      }
    }

    LevelCurve curve;
    curve.level = c_;
    const Vec2 start = crossing(I, J, entry);
    curve.points.emplace_back(start);
    curve.grid_edges.push_back(start_edge);

    const std::size_t limit = edge_count() + 4;
    for (std::size_t steps = 0; steps < limit; ++steps) {
      const int out = partner(f_.wrap(I), f_.wrap(J), entry);
      if (out < 0) throw Error(ErrorKind::Topology, "level curve walk lost its crossing");
      const Vec2 p = crossing(I, J, out);
      const std::size_t ge = global_edge(I, J, out);
      if (ge == start_edge) {
        curve.homology = {static_cast<int>(std::lround(p.x - start.x)), static_cast<int>(std::lround(p.y - start.y))};
        return curve;
      }
      curve.points.emplace_back(p);
      curve.grid_edges.push_back(ge);
      switch (out) {
        case 0: J -= 1, entry = 2; break;
        case 1: I += 1, entry = 3; break;
        case 2: J += 1, entry = 0; break;
        default: I -= 1, entry = 1; break;
      }
    }
    throw Error(ErrorKind::Topology, "level curve walk did not close");
  }

 private:
  const GridField& f_;
  double c_;
  int n_;
};

}  // namespace

LevelCurve trace_level_component(const GridField& field, double c, Cell seed,
                                 const std::vector<CriticalPoint>& criticals) {
  require_regular_value(field, criticals, c);
  LevelTracer tracer(field, c);
  for (int local = 0; local < 4; ++local) {
    if (tracer.local_crosses(seed.i, seed.j, local)) return tracer.trace(tracer.global_edge(seed.i, seed.j, local));
  }
  std::ostringstream msg;
  msg << "cell (" << seed.i << ", " << seed.j << ") does not straddle level " << c;
  throw Error(ErrorKind::NoCrossing, msg.str());
}

LevelCurve trace_level_component(const GridField& field, double c, Cell seed) {
  return trace_level_component(field, c, seed, find_critical_points(field));
}

std::vector<LevelCurve> enumerate_level_components(const GridField& field, double c,
                                                   const std::vector<CriticalPoint>& criticals) {
  require_regular_value(field, criticals, c);
  LevelTracer tracer(field, c);
  std::vector<char> visited(tracer.edge_count(), 0);
  std::vector<LevelCurve> curves;
  for (std::size_t e = 0; e < tracer.edge_count(); ++e) {
    if (visited[e] || !tracer.crosses(e)) continue;
    LevelCurve curve = tracer.trace(e);
    for (std::size_t ge : curve.grid_edges) visited[ge] = 1;
    curves.push_back(std::move(curve));
  }
  auto leftmost = [](const LevelCurve& k) {
    double m = 1.0;
    for (const auto& p : k.points) m = std::min(m, p.x);
    return m;
  };
  std::stable_sort(curves.begin(), curves.end(),
                   [&](const LevelCurve& a, const LevelCurve& b) { return leftmost(a) < leftmost(b); });
  return curves;
}

std::vector<LevelCurve> enumerate_level_components(const GridField& field, double c) {
  return enumerate_level_components(field, c, find_critical_points(field));
}

std::vector<Vec2> unwrap(const std::vector<TorusPoint>& points) {
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (k == 0) {
      out.push_back(points[0].vec());
    } else {
      out.push_back(out.back() + torus_delta(points[k - 1], points[k]));
    }
  }
  return out;
}

}  // namespace kreeb
