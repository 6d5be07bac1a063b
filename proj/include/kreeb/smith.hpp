#pragma once

#include <cstdint>
#include <vector>

namespace kreeb {

using IntMatrix = std::vector<std::vector<std::int64_t>>;

/// U * A * V = D with U, V unimodular and D diagonal, d_0 | d_1 | ..., d_i >= 0.
struct SmithForm {
  IntMatrix d;
  IntMatrix u;
  IntMatrix v;
  IntMatrix v_inverse;
  std::vector<std::int64_t> diagonal;  // min(rows, cols) entries
  int rank = 0;
};

/// `cols` fixes the width for matrices with no rows.
SmithForm smith_normal_form(const IntMatrix& a, int cols = -1);

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b);
IntMatrix identity_matrix(int n);

/// Determinant by fraction-free elimination (Bareiss).
std::int64_t determinant(const IntMatrix& a);

}  // namespace kreeb
