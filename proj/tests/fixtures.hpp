#pragma once

#include <string>

namespace kreeb::testing {

/// cos(2 pi n x) + eps cos(2 pi y)
inline std::string family_expr(int n, double eps = 0.5) {
  return "cos(" + std::to_string(2 * n) + "*pi*x)+" + std::to_string(eps) + "*cos(2*pi*y)";
}

/// Product field whose Kronrod-Reeb graph is a tree.
inline const char* tree_expr() { return "cos(2*pi*x)*cos(2*pi*y)"; }

}  // namespace kreeb::testing
