#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "kreeb/error.hpp"
#include "kreeb/field.hpp"

namespace kreeb {

namespace {

ExprPtr make(ExprOp op, ExprPtr lhs = nullptr, ExprPtr rhs = nullptr, double value = 0.0) {
  auto node = std::make_shared<ExprNode>();
  node->op = op;
  node->value = value;
  node->lhs = std::move(lhs);
  node->rhs = std::move(rhs);
  return node;
}

bool is_function(ExprOp op) {
  return op == ExprOp::Sin || op == ExprOp::Cos || op == ExprOp::Exp || op == ExprOp::Step;
}

[[maybe_unused]] bool is_binary(ExprOp op) {
  return op == ExprOp::Add || op == ExprOp::Sub || op == ExprOp::Mul || op == ExprOp::Div;
}

const char* function_name(ExprOp op) {
  switch (op) {
    case ExprOp::Sin: return "sin";
    case ExprOp::Cos: return "cos";
    case ExprOp::Exp: return "exp";
    case ExprOp::Step: return "step";
    default: return "?";
  }
}

// Long double internally: symmetric fixtures then sample to bit-identical doubles.
long double evaluate(const ExprNode& n, long double x, long double y);

// Writes c when the node is c*pi for some subexpression c free of pi, so trig
// arguments can be reduced mod 2 before pi multiplies in. Keeps sampled values
// bit-identical under shifts by whole periods.
bool pi_coefficient(const ExprNode& n, long double x, long double y, long double& c) {
  long double a = 0, b = 0;
  switch (n.op) {
    case ExprOp::Pi: c = 1.0L; return true;
    case ExprOp::Neg:
      if (!pi_coefficient(*n.lhs, x, y, a)) return false;
      c = -a;
      return true;
    case ExprOp::Mul:
      if (pi_coefficient(*n.lhs, x, y, a)) {
        c = a * evaluate(*n.rhs, x, y);
        return true;
      }
      if (pi_coefficient(*n.rhs, x, y, b)) {
        c = evaluate(*n.lhs, x, y) * b;
        return true;
      }
      return false;
    case ExprOp::Div:
      if (!pi_coefficient(*n.lhs, x, y, a)) return false;
      c = a / evaluate(*n.rhs, x, y);
      return true;
    case ExprOp::Add:
    case ExprOp::Sub:
      if (!pi_coefficient(*n.lhs, x, y, a) || !pi_coefficient(*n.rhs, x, y, b)) return false;
      c = n.op == ExprOp::Add ? a + b : a - b;
      return true;
    default: return false;
  }
}

long double trig(const ExprNode& n, long double x, long double y) {
  long double arg = 0;
  long double c = 0;
  if (pi_coefficient(*n.lhs, x, y, c)) {
    c -= 2.0L * std::floor(c / 2.0L);
    arg = c * std::numbers::pi_v<long double>;
  } else {
    arg = evaluate(*n.lhs, x, y);
  }
  return n.op == ExprOp::Sin ? std::sin(arg) : std::cos(arg);
}

long double evaluate(const ExprNode& n, long double x, long double y) {
  switch (n.op) {
    case ExprOp::Number: return n.value;
    case ExprOp::X: return x;
    case ExprOp::Y: return y;
    case ExprOp::Pi: return std::numbers::pi_v<long double>;
    case ExprOp::Add: return evaluate(*n.lhs, x, y) + evaluate(*n.rhs, x, y);
    case ExprOp::Sub: return evaluate(*n.lhs, x, y) - evaluate(*n.rhs, x, y);
    case ExprOp::Mul: return evaluate(*n.lhs, x, y) * evaluate(*n.rhs, x, y);
    case ExprOp::Div: return evaluate(*n.lhs, x, y) / evaluate(*n.rhs, x, y);
    case ExprOp::Neg: return -evaluate(*n.lhs, x, y);
    case ExprOp::Sin:
    case ExprOp::Cos: return trig(n, x, y);
    case ExprOp::Exp: return std::exp(evaluate(*n.lhs, x, y));
    case ExprOp::Step: return smooth_step(static_cast<double>(evaluate(*n.lhs, x, y)));
  }
  return 0.0L;
}

bool same_tree(const ExprNode* a, const ExprNode* b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op) return false;
  if (a->op == ExprOp::Number && a->value != b->value) return false;
  return same_tree(a->lhs.get(), b->lhs.get()) && same_tree(a->rhs.get(), b->rhs.get());
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_sexpr(const ExprNode& n, std::string& out) {
  switch (n.op) {
    case ExprOp::Number: out += format_number(n.value); return;
    case ExprOp::X: out += 'x'; return;
    case ExprOp::Y: out += 'y'; return;
    case ExprOp::Pi: out += "pi"; return;
    case ExprOp::Neg:
      out += "neg(";
      write_sexpr(*n.lhs, out);
      out += ')';
      return;
    default: break;
  }
  if (is_function(n.op)) {
    out += function_name(n.op);
    out += '(';
    write_sexpr(*n.lhs, out);
    out += ')';
    return;
  }
  static constexpr const char* names[] = {"add", "sub", "mul", "div"};
  out += names[static_cast<int>(n.op) - static_cast<int>(ExprOp::Add)];
  out += '(';
  write_sexpr(*n.lhs, out);
  out += ',';
  write_sexpr(*n.rhs, out);
  out += ')';
}

// Precedence: 1 additive, 2 multiplicative, 3 unary minus, 4 atoms.
int precedence(ExprOp op) {
  switch (op) {
    case ExprOp::Add:
    case ExprOp::Sub: return 1;
    case ExprOp::Mul:
    case ExprOp::Div: return 2;
    case ExprOp::Neg: return 3;
    default: return 4;
  }
}

void write_infix(const ExprNode& n, std::string& out);

void write_operand(const ExprNode& n, int min_prec, std::string& out) {
  if (precedence(n.op) < min_prec) {
    out += '(';
    write_infix(n, out);
    out += ')';
  } else {
    write_infix(n, out);
  }
}

void write_infix(const ExprNode& n, std::string& out) {
  switch (n.op) {
    case ExprOp::Number: out += format_number(n.value); return;
    case ExprOp::X: out += 'x'; return;
    case ExprOp::Y: out += 'y'; return;
    case ExprOp::Pi: out += "pi"; return;
    case ExprOp::Neg:
      out += '-';
      write_operand(*n.lhs, 3, out);
      return;
    default: break;
  }
  if (is_function(n.op)) {
    out += function_name(n.op);
    out += '(';
    write_infix(*n.lhs, out);
    out += ')';
    return;
  }
  const int p = precedence(n.op);
  static constexpr const char* symbols[] = {" + ", " - ", " * ", " / "};
  // Left-associative grammar: the right operand needs parentheses at equal precedence.
  write_operand(*n.lhs, p, out);
  out += symbols[static_cast<int>(n.op) - static_cast<int>(ExprOp::Add)];
  write_operand(*n.rhs, p + 1, out);
}

ExprPtr substitute(const ExprPtr& n, const ExprPtr& sub) {
  if (!n) return n;
  if (n->op == ExprOp::X) return sub;
  if (!n->lhs && !n->rhs) return n;
  return make(n->op, substitute(n->lhs, sub), substitute(n->rhs, sub), n->value);
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ExprPtr parse() {
    skip_space();
    if (pos_ >= text_.size()) throw SyntaxError(pos_, "empty expression");
    ExprPtr e = parse_expr();
    skip_space();
    if (pos_ < text_.size()) throw SyntaxError(pos_, "unexpected trailing input");
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = make(ExprOp::Add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = make(ExprOp::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    for (;;) {
      if (accept('*')) {
        lhs = make(ExprOp::Mul, lhs, parse_factor());
      } else if (accept('/')) {
        lhs = make(ExprOp::Div, lhs, parse_factor());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_factor() {
    skip_space();
    if (pos_ >= text_.size()) throw SyntaxError(pos_, "unexpected end of input");
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return make(ExprOp::Neg, parse_factor());
    }
    if (c == '(') {
      ++pos_;
      ExprPtr inner = parse_expr();
      if (!accept(')')) throw SyntaxError(pos_, "expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    throw SyntaxError(pos_, std::string("unexpected character '") + c + "'");
  }

  ExprPtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw SyntaxError(start, "malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) throw SyntaxError(start, "malformed number");
    return make(ExprOp::Number, nullptr, nullptr, value);
  }

  ExprPtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "x") return make(ExprOp::X);
    if (name == "y") return make(ExprOp::Y);
    if (name == "pi") return make(ExprOp::Pi);
    ExprOp op;
    if (name == "sin") {
      op = ExprOp::Sin;
    } else if (name == "cos") {
      op = ExprOp::Cos;
    } else if (name == "exp") {
      op = ExprOp::Exp;
    } else if (name == "step") {
      op = ExprOp::Step;
    } else {
      throw SyntaxError(start, "unknown identifier '" + std::string(name) + "'");
    }
    if (!accept('(')) throw SyntaxError(pos_, "expected '(' after " + std::string(name));
    ExprPtr arg = parse_expr();
    if (!accept(')')) throw SyntaxError(pos_, "expected ')'");
    return make(op, arg);
  }
};

}  // namespace

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

FieldExpr FieldExpr::number(double v) { return FieldExpr(make(ExprOp::Number, nullptr, nullptr, v)); }
FieldExpr FieldExpr::var_x() { return FieldExpr(make(ExprOp::X)); }
FieldExpr FieldExpr::var_y() { return FieldExpr(make(ExprOp::Y)); }
FieldExpr FieldExpr::pi() { return FieldExpr(make(ExprOp::Pi)); }
FieldExpr FieldExpr::unary(ExprOp op, const FieldExpr& arg) { return FieldExpr(make(op, arg.root_)); }
FieldExpr FieldExpr::binary(ExprOp op, const FieldExpr& lhs, const FieldExpr& rhs) {
  return FieldExpr(make(op, lhs.root_, rhs.root_));
}

double FieldExpr::operator()(double x, double y) const { return static_cast<double>(evaluate(*root_, x, y)); }

FieldExpr FieldExpr::substitute_x(const FieldExpr& sub) const { return FieldExpr(substitute(root_, sub.root_)); }

std::string FieldExpr::to_sexpr() const {
  std::string out;
  if (root_) write_sexpr(*root_, out);
  return out;
}

std::string FieldExpr::to_string() const {
  std::string out;
  if (root_) write_infix(*root_, out);
  return out;
}

bool operator==(const FieldExpr& a, const FieldExpr& b) { return same_tree(a.root_.get(), b.root_.get()); }

FieldExpr operator+(const FieldExpr& a, const FieldExpr& b) { return FieldExpr::binary(ExprOp::Add, a, b); }
FieldExpr operator-(const FieldExpr& a, const FieldExpr& b) { return FieldExpr::binary(ExprOp::Sub, a, b); }
FieldExpr operator*(const FieldExpr& a, const FieldExpr& b) { return FieldExpr::binary(ExprOp::Mul, a, b); }
FieldExpr operator/(const FieldExpr& a, const FieldExpr& b) { return FieldExpr::binary(ExprOp::Div, a, b); }
FieldExpr operator-(const FieldExpr& a) { return FieldExpr::unary(ExprOp::Neg, a); }
FieldExpr sin(const FieldExpr& a) { return FieldExpr::unary(ExprOp::Sin, a); }
FieldExpr cos(const FieldExpr& a) { return FieldExpr::unary(ExprOp::Cos, a); }
FieldExpr exp(const FieldExpr& a) { return FieldExpr::unary(ExprOp::Exp, a); }
FieldExpr step(const FieldExpr& a) { return FieldExpr::unary(ExprOp::Step, a); }

FieldExpr parse_field_expr(std::string_view text) {
  if (text.empty()) throw SyntaxError(0, "empty expression");
  return FieldExpr(Parser(text).parse());
}

}  // namespace kreeb
