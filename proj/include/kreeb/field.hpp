#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kreeb {

/// Point of R^2, used for lifts of torus points.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
};

/// Reduce to [0, 1).
inline double wrap01(double v) {
  double r = v - std::floor(v);
  return r >= 1.0 ? 0.0 : r;
}

/// Reduce to [-1/2, 1/2).
inline double wrap_half(double v) { return v - std::floor(v + 0.5); }

/// Point of T^2 = R^2 / Z^2, coordinates kept in [0, 1).
struct TorusPoint {
  double x = 0.0;
  double y = 0.0;

  TorusPoint() = default;
  TorusPoint(double px, double py) : x(wrap01(px)), y(wrap01(py)) {}
  explicit TorusPoint(Vec2 v) : TorusPoint(v.x, v.y) {}

  Vec2 vec() const { return {x, y}; }
};

/// Shortest displacement from a to b on the torus.
inline Vec2 torus_delta(TorusPoint a, TorusPoint b) {
  return {wrap_half(b.x - a.x), wrap_half(b.y - a.y)};
}

inline double torus_distance(TorusPoint a, TorusPoint b) {
  Vec2 d = torus_delta(a, b);
  return std::hypot(d.x, d.y);
}

// ---------------------------------------------------------------------------
// Expressions

enum class ExprOp { Number, X, Y, Pi, Add, Sub, Mul, Div, Neg, Sin, Cos, Exp, Step };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprOp op = ExprOp::Number;
  double value = 0.0;  // Number only
  ExprPtr lhs;         // unary operand / function argument / left operand
  ExprPtr rhs;         // right operand of binary nodes
};

/// Immutable arithmetic expression in x and y.
///
/// `step(t)` is the C-infinity flat join: 0 for t <= 0, 1 for t >= 1, built from
/// exp(-1/t). It is the only non-analytic builtin and exists so fields can be exactly
/// constant in one variable on a strip.
class FieldExpr {
 public:
  FieldExpr() = default;
  explicit FieldExpr(ExprPtr root) : root_(std::move(root)) {}

  static FieldExpr number(double v);
  static FieldExpr var_x();
  static FieldExpr var_y();
  static FieldExpr pi();
  static FieldExpr unary(ExprOp op, const FieldExpr& arg);
  static FieldExpr binary(ExprOp op, const FieldExpr& lhs, const FieldExpr& rhs);

  const ExprNode& root() const { return *root_; }
  bool empty() const { return !root_; }

  double operator()(double x, double y) const;

  /// Replace the variable x by `sub` everywhere.
  FieldExpr substitute_x(const FieldExpr& sub) const;

  /// Prefix form, e.g. cos(mul(mul(2,pi),x)).
  std::string to_sexpr() const;
  /// Infix form accepted by parse_field_expr.
  std::string to_string() const;

  friend bool operator==(const FieldExpr& a, const FieldExpr& b);

 private:
  ExprPtr root_;
};

FieldExpr operator+(const FieldExpr& a, const FieldExpr& b);
FieldExpr operator-(const FieldExpr& a, const FieldExpr& b);
FieldExpr operator*(const FieldExpr& a, const FieldExpr& b);
FieldExpr operator/(const FieldExpr& a, const FieldExpr& b);
FieldExpr operator-(const FieldExpr& a);
FieldExpr sin(const FieldExpr& a);
FieldExpr cos(const FieldExpr& a);
FieldExpr exp(const FieldExpr& a);
FieldExpr step(const FieldExpr& a);

/// Recursive-descent parser:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := number | 'x' | 'y' | 'pi' | func '(' expr ')' | '(' expr ')' | '-' factor
///   func   := sin | cos | exp | step
/// Throws SyntaxError carrying the byte offset of the problem.
FieldExpr parse_field_expr(std::string_view text);

/// The smooth flat-join step used by the `step` builtin.
double smooth_step(double t);

// ---------------------------------------------------------------------------
// Grid fields

/// Grid node, indices taken modulo the resolution.
struct Node {
  int i = 0;
  int j = 0;
};

struct Gradient {
  double gx = 0.0;
  double gy = 0.0;
};

struct Hessian {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
  double det() const { return xx * yy - xy * xy; }
};

/// Periodic scalar field on T^2, vertex-sampled at (i/N, j/N).
/// Storage is row-major with the row indexed by j (the y coordinate).
class GridField {
 public:
  GridField(int resolution, std::vector<double> values, std::optional<FieldExpr> source = std::nullopt);

  int resolution() const { return n_; }
  const std::optional<FieldExpr>& source() const { return source_; }
  const std::vector<double>& values() const { return values_; }

  int wrap(int k) const { return ((k % n_) + n_) % n_; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(wrap(j)) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(wrap(i));
  }
  double value(int i, int j) const { return values_[index(i, j)]; }
  Gradient gradient(int i, int j) const { return grad_[index(i, j)]; }
  Hessian hessian(int i, int j) const { return hess_[index(i, j)]; }
  TorusPoint node_point(int i, int j) const { return {double(wrap(i)) / n_, double(wrap(j)) / n_}; }

  double min_value() const { return min_; }
  double max_value() const { return max_; }
  double range() const { return max_ - min_; }

  /// Exact expression value when an expression is attached, bilinear otherwise.
  double evaluate(TorusPoint p) const;

 private:
  int n_;
  std::vector<double> values_;
  std::vector<Gradient> grad_;
  std::vector<Hessian> hess_;
  std::optional<FieldExpr> source_;
  double min_ = 0.0;
  double max_ = 0.0;
};

inline bool is_valid_resolution(int n) { return n >= 64 && (n & (n - 1)) == 0; }

/// Samples `expr` at the grid nodes after a probe check of 1-periodicity in both
/// variables (64 deterministic probes, tolerance 1e-9).
/// Throws InvalidResolution or NotPeriodic.
GridField sample_grid(const FieldExpr& expr, int resolution);

double eval_bilinear(const GridField& field, TorusPoint p);
Gradient eval_gradient(const GridField& field, TorusPoint p);
Hessian eval_hessian(const GridField& field, TorusPoint p);

/// Field file:
///   expr: <expression>
/// or
///   grid: <N>
///   N rows of N reals, row index = y index.
/// `resolution` is used for `expr:` files.
GridField read_field(std::istream& in, int resolution);
GridField load_field_file(const std::string& path, int resolution);
void write_field(std::ostream& out, const GridField& field, bool prefer_expression = true);

}  // namespace kreeb
