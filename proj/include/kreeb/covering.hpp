#pragma once

#include <cstddef>
#include <string>

#include "kreeb/field.hpp"

namespace kreeb {

/// p(x, y) = (n x mod 1, y)
inline TorusPoint covering_map(TorusPoint p, int n) { return TorusPoint(n * p.x, p.y); }

struct QuotientResult {
  int n = 1;
  GridField field;                 // f^(u, y) = f(u/n, y), same resolution
  double invariance_error = 0.0;   // max |f(x + 1/n, y) - f(x, y)|
  double commutation_error = 0.0;  // max over nodes |f - f^ o p|
  double deck_min_shift = 0.0;     // smallest distance node -> node + (1/n, 0)
  std::size_t critical_count = 0;
  std::size_t quotient_critical_count = 0;
  int quotient_betti1 = 0;
  int quotient_cyclic_index = 0;  // 0 when the quotient graph is a tree
};

/// Quotient of f by the rotation x -> x + 1/n. Expression fields are substituted
/// and resampled; raw grids are interpolated. Reruns critical points, Reeb graph
/// and decomposition on the quotient.
/// Throws NotInvariant when the rotation does not preserve f within `tol`
/// (default 1e-9 * max(1, range) for expressions and grids with n | N,
/// 1e-2 * range otherwise), and InvalidIndex for n < 1.
QuotientResult build_quotient(const GridField& field, int n, double tol = -1.0);

std::string quotient_report_json(const QuotientResult& q, int indent = 2);

}  // namespace kreeb
