#include "kreeb/smith.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <utility>

#include "kreeb/error.hpp"

namespace kreeb {

IntMatrix identity_matrix(int n) {
  IntMatrix m(static_cast<std::size_t>(n), std::vector<std::int64_t>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  if (a.empty()) return {};
  const std::size_t inner = b.size(), cols = b.empty() ? 0 : b[0].size();
  if (a[0].size() != inner) throw Error(ErrorKind::Domain, "matrix shapes do not match");
  IntMatrix c(a.size(), std::vector<std::int64_t>(cols, 0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < inner; ++k)
      if (a[i][k])
        for (std::size_t j = 0; j < cols; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

namespace {

struct Worker {
  IntMatrix a, u, v, vi;
  int rows, cols;

  void swap_rows(int i, int j) {
    std::swap(a[i], a[j]);
    std::swap(u[i], u[j]);
  }
  void swap_cols(int i, int j) {
    for (auto& r : a) std::swap(r[i], r[j]);
    for (auto& r : v) std::swap(r[i], r[j]);
    std::swap(vi[i], vi[j]);
  }
  // row_i -= q * row_j
  void row_sub(int i, int j, std::int64_t q) {
    for (int c = 0; c < cols; ++c) a[i][c] -= q * a[j][c];
    for (int c = 0; c < rows; ++c) u[i][c] -= q * u[j][c];
  }
  // col_i -= q * col_j; the inverse picks up row_j += q * row_i.
  void col_sub(int i, int j, std::int64_t q) {
    for (int r = 0; r < rows; ++r) a[r][i] -= q * a[r][j];
    for (int r = 0; r < cols; ++r) v[r][i] -= q * v[r][j];
    for (int c = 0; c < cols; ++c) vi[j][c] += q * vi[i][c];
  }
  void negate_row(int i) {
    for (auto& x : a[i]) x = -x;
    for (auto& x : u[i]) x = -x;
  }
};

}  // namespace

SmithForm smith_normal_form(const IntMatrix& input, int cols_hint) {
  Worker w;
  w.a = input;
  w.rows = static_cast<int>(input.size());
  w.cols = w.rows ? static_cast<int>(input[0].size()) : std::max(cols_hint, 0);
  for (const auto& r : input)
    if (static_cast<int>(r.size()) != w.cols) throw Error(ErrorKind::Domain, "ragged matrix");
  w.u = identity_matrix(w.rows);
  w.v = identity_matrix(w.cols);
  w.vi = identity_matrix(w.cols);

  const int steps = std::min(w.rows, w.cols);
  int t = 0;
  for (; t < steps; ++t) {
    while (true) {
      // Smallest nonzero entry of the trailing block becomes the pivot.
      int pi = -1, pj = -1;
      for (int i = t; i < w.rows; ++i)
        for (int j = t; j < w.cols; ++j)
          if (w.a[i][j] != 0 && (pi < 0 || std::llabs(w.a[i][j]) < std::llabs(w.a[pi][pj]))) pi = i, pj = j;
      if (pi < 0) goto done;
      if (pi != t) w.swap_rows(t, pi);
      if (pj != t) w.swap_cols(t, pj);

      bool clean = true;
      for (int i = t + 1; i < w.rows; ++i) {
        if (w.a[i][t] == 0) continue;
        w.row_sub(i, t, w.a[i][t] / w.a[t][t]);
        if (w.a[i][t] != 0) clean = false;
      }
      for (int j = t + 1; j < w.cols; ++j) {
        if (w.a[t][j] == 0) continue;
        w.col_sub(j, t, w.a[t][j] / w.a[t][t]);
        if (w.a[t][j] != 0) clean = false;
      }
      if (!clean) continue;

      // Divisibility: fold an offending row into the pivot row and retry.
      int bad = -1;
      for (int i = t + 1; i < w.rows && bad < 0; ++i)
        for (int j = t + 1; j < w.cols; ++j)
          if (w.a[i][j] % w.a[t][t] != 0) {
            bad = i;
            break;
          }
      if (bad < 0) break;
      w.row_sub(t, bad, -1);
    }
    if (w.a[t][t] < 0) w.negate_row(t);
  }
done:
  SmithForm s;
  s.diagonal.assign(static_cast<std::size_t>(steps), 0);
  for (int i = 0; i < steps; ++i) {
    s.diagonal[i] = w.a[i][i];
    if (s.diagonal[i] != 0) ++s.rank;
  }
  s.d = std::move(w.a);
  s.u = std::move(w.u);
  s.v = std::move(w.v);
  s.v_inverse = std::move(w.vi);
  return s;
}

std::int64_t determinant(const IntMatrix& input) {
  const int n = static_cast<int>(input.size());
  if (n == 0) return 1;
  IntMatrix m = input;
  std::int64_t sign = 1, prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m[k][k] == 0) {
      int swap = -1;
      for (int i = k + 1; i < n; ++i)
        if (m[i][k] != 0) {
          swap = i;
          break;
        }
      if (swap < 0) return 0;
      std::swap(m[k], m[swap]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

}  // namespace kreeb
