#include "kreeb/covering.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "kreeb/decomp.hpp"
#include "kreeb/error.hpp"

namespace kreeb {

namespace {

double rotation_defect(const GridField& f, int n) {
  const int res = f.resolution();
  double worst = 0.0;
  for (int j = 0; j < res; ++j)
    for (int i = 0; i < res; ++i) {
      const TorusPoint p = f.node_point(i, j);
      double moved;
      if (f.source())
        moved = (*f.source())(p.x + 1.0 / n, p.y);
      else if (res % n == 0)
        moved = f.value(i + res / n, j);
      else
        moved = f.evaluate(TorusPoint(p.x + 1.0 / n, p.y));
      worst = std::max(worst, std::abs(moved - f.value(i, j)));
    }
  return worst;
}

GridField rescaled(const GridField& f, int n) {
  const int res = f.resolution();
  if (f.source()) {
    const FieldExpr sub = FieldExpr::var_x() / FieldExpr::number(n);
    return sample_grid(f.source()->substitute_x(sub), res);
  }
  std::vector<double> v(static_cast<std::size_t>(res) * res);
  for (int j = 0; j < res; ++j)
    for (int i = 0; i < res; ++i)
      v[static_cast<std::size_t>(j) * res + i] = f.evaluate(TorusPoint(double(i) / res / n, double(j) / res));
  return GridField(res, std::move(v));
}

}  // namespace

QuotientResult build_quotient(const GridField& field, int n, double tol) {
  if (n < 1) throw Error(ErrorKind::InvalidIndex, "covering degree must be at least 1");
  const int res = field.resolution();
  if (tol < 0.0)
    tol = field.source() || res % n == 0 ? 1e-9 * std::max(1.0, field.range()) : 1e-2 * field.range();

  QuotientResult q{n, field};
  q.invariance_error = n == 1 ? 0.0 : rotation_defect(field, n);
  if (q.invariance_error > tol) {
    std::ostringstream msg;
    msg << "rotation by 1/" << n << " changes the field by " << q.invariance_error << " (tolerance " << tol << ")";
    throw Error(ErrorKind::NotInvariant, msg.str());
  }
  if (n > 1) q.field = rescaled(field, n);

  for (int j = 0; j < res; ++j)
    for (int i = 0; i < res; ++i) {
      const TorusPoint p = field.node_point(i, j);
      q.commutation_error =
          std::max(q.commutation_error, std::abs(field.value(i, j) - q.field.evaluate(covering_map(p, n))));
    }

  // The deck group is generated by (x, y) -> (x + 1/n, y).
  q.deck_min_shift = INFINITY;
  for (int i = 0; i < res; ++i) {
    const TorusPoint p = field.node_point(i, 0);
    q.deck_min_shift = std::min(q.deck_min_shift, torus_distance(p, TorusPoint(p.x + 1.0 / n, p.y)));
  }

  q.critical_count = find_critical_points(field).size();
  const auto crit = find_critical_points(q.field);
  q.quotient_critical_count = crit.size();
  const ReebGraph reeb = build_reeb_graph(q.field, crit);
  q.quotient_betti1 = reeb.betti1;
  if (const auto cycle = find_cycle(reeb)) q.quotient_cyclic_index = decompose(q.field, reeb, *cycle).cyclic_index;
  return q;
}

std::string quotient_report_json(const QuotientResult& q, int indent) {
  nlohmann::json doc;
  doc["schema"] = 1;
  doc["n"] = q.n;
  doc["invariance_error"] = q.invariance_error;
  doc["commutation_error"] = q.commutation_error;
  doc["deck_min_shift"] = q.deck_min_shift;
  doc["critical_count"] = q.critical_count;
  doc["quotient_critical_count"] = q.quotient_critical_count;
  doc["critical_count_divides"] = q.quotient_critical_count * static_cast<std::size_t>(q.n) == q.critical_count;
  doc["quotient_betti1"] = q.quotient_betti1;
  if (q.quotient_cyclic_index > 0)
    doc["quotient_cyclic_index"] = q.quotient_cyclic_index;
  else
    doc["quotient_cyclic_index"] = nullptr;
  if (q.field.source()) doc["quotient_expr"] = q.field.source()->to_string();
  doc["resolution"] = q.field.resolution();
  return doc.dump(indent);
}

}  // namespace kreeb
