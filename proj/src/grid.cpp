#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "kreeb/error.hpp"
#include "kreeb/field.hpp"

namespace kreeb {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::NotPeriodic: return "NotPeriodic";
    case ErrorKind::InvalidResolution: return "InvalidResolution";
    case ErrorKind::DegenerateCritical: return "DegenerateCritical";
    case ErrorKind::CriticalLevel: return "CriticalLevel";
    case ErrorKind::NoCrossing: return "NoCrossing";
    case ErrorKind::MultipleCycles: return "MultipleCycles";
    case ErrorKind::NoCycle: return "NoCycle";
    case ErrorKind::Topology: return "TopologyError";
    case ErrorKind::MixedContext: return "MixedContext";
    case ErrorKind::WrongContext: return "WrongContext";
    case ErrorKind::InvalidIndex: return "InvalidIndex";
    case ErrorKind::NotAbelian: return "NotAbelian";
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::UnsupportedField: return "UnsupportedField";
    case ErrorKind::NonBijective: return "NonBijective";
    case ErrorKind::NotFixedOnCurves: return "NotFixedOnCurves";
    case ErrorKind::NotInDelta: return "NotInDelta";
    case ErrorKind::NotDiffeo: return "NotDiffeo";
    case ErrorKind::NotCurvePreserving: return "NotCurvePreserving";
    case ErrorKind::NonUniformShift: return "NonUniformShift";
    case ErrorKind::DiscontinuousLift: return "DiscontinuousLift";
    case ErrorKind::NotInvariant: return "NotInvariant";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

GridField::GridField(int resolution, std::vector<double> values, std::optional<FieldExpr> source)
    : n_(resolution), values_(std::move(values)), source_(std::move(source)) {
  if (!is_valid_resolution(n_))
    throw Error(ErrorKind::InvalidResolution, "resolution must be a power of two >= 64, got " + std::to_string(n_));
  if (values_.size() != static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_))
    throw Error(ErrorKind::InvalidResolution, "value array does not match resolution");

  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  min_ = *lo;
  max_ = *hi;

  // Central differences with periodic wrap, h = 1/N.
  const double n = n_;
  grad_.resize(values_.size());
  hess_.resize(values_.size());
  for (int j = 0; j < n_; ++j) {
    for (int i = 0; i < n_; ++i) {
      const double c = value(i, j);
      const double e = value(i + 1, j), w = value(i - 1, j);
      const double nn = value(i, j + 1), s = value(i, j - 1);
      const std::size_t k = index(i, j);
      grad_[k] = {(e - w) * n / 2.0, (nn - s) * n / 2.0};
      hess_[k].xx = (e - 2.0 * c + w) * n * n;
      hess_[k].yy = (nn - 2.0 * c + s) * n * n;
      hess_[k].xy = (value(i + 1, j + 1) - value(i + 1, j - 1) - value(i - 1, j + 1) + value(i - 1, j - 1)) * n * n / 4.0;
    }
  }
}

double GridField::evaluate(TorusPoint p) const {
  if (source_) return (*source_)(p.x, p.y);
  return eval_bilinear(*this, p);
}

GridField sample_grid(const FieldExpr& expr, int resolution) {
  if (!is_valid_resolution(resolution))
    throw Error(ErrorKind::InvalidResolution, "resolution must be a power of two >= 64, got " + std::to_string(resolution));

  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int probe = 0; probe < 64; ++probe) {
    const double d = unit(rng), other = unit(rng);
    const double dx = std::abs(expr(1.0 + d, other) - expr(d, other));
    const double dy = std::abs(expr(other, 1.0 + d) - expr(other, d));
    if (!(dx <= 1e-9) || !(dy <= 1e-9)) {
      std::ostringstream msg;
      msg << "expression is not 1-periodic (probe at " << d << ", " << other
          << " differs by " << std::max(dx, dy) << ")";
      throw Error(ErrorKind::NotPeriodic, msg.str());
    }
  }

  std::vector<double> values(static_cast<std::size_t>(resolution) * resolution);
  for (int j = 0; j < resolution; ++j) {
    const double y = double(j) / resolution;
    for (int i = 0; i < resolution; ++i) {
      const double v = expr(double(i) / resolution, y);
      if (!std::isfinite(v)) throw Error(ErrorKind::Domain, "expression is not finite on the grid");
      values[static_cast<std::size_t>(j) * resolution + i] = v;
    }
  }
  return GridField(resolution, std::move(values), expr);
}

namespace {

struct CellCoord {
  int i, j;
  double fx, fy;
};

CellCoord locate(int n, TorusPoint p) {
  const double sx = p.x * n, sy = p.y * n;
  const double fi = std::floor(sx), fj = std::floor(sy);
  return {static_cast<int>(fi), static_cast<int>(fj), sx - fi, sy - fj};
}

template <class Get>
double bilinear(const GridField& f, TorusPoint p, Get get) {
  const CellCoord c = locate(f.resolution(), p);
  const double v00 = get(c.i, c.j), v10 = get(c.i + 1, c.j);
  const double v01 = get(c.i, c.j + 1), v11 = get(c.i + 1, c.j + 1);
  return (1 - c.fx) * (1 - c.fy) * v00 + c.fx * (1 - c.fy) * v10 + (1 - c.fx) * c.fy * v01 + c.fx * c.fy * v11;
}

}  // namespace

double eval_bilinear(const GridField& field, TorusPoint p) {
  return bilinear(field, p, [&](int i, int j) { return field.value(i, j); });
}

Gradient eval_gradient(const GridField& field, TorusPoint p) {
  return {bilinear(field, p, [&](int i, int j) { return field.gradient(i, j).gx; }),
          bilinear(field, p, [&](int i, int j) { return field.gradient(i, j).gy; })};
}

Hessian eval_hessian(const GridField& field, TorusPoint p) {
  return {bilinear(field, p, [&](int i, int j) { return field.hessian(i, j).xx; }),
          bilinear(field, p, [&](int i, int j) { return field.hessian(i, j).xy; }),
          bilinear(field, p, [&](int i, int j) { return field.hessian(i, j).yy; })};
}

GridField read_field(std::istream& in, int resolution) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  const auto colon = line.find(':');
  if (colon == std::string::npos) throw Error(ErrorKind::Io, "field file must start with 'expr:' or 'grid:'");
  std::string key = line.substr(0, colon);
  key.erase(0, key.find_first_not_of(" \t"));
  key.erase(key.find_last_not_of(" \t") + 1);
  std::string rest = line.substr(colon + 1);
  if (!rest.empty() && rest.back() == '\r') rest.pop_back();

  if (key == "expr") return sample_grid(parse_field_expr(rest), resolution);
  if (key != "grid") throw Error(ErrorKind::Io, "unknown field header '" + key + "'");

  int n = 0;
  std::istringstream header(rest);
  if (!(header >> n)) throw Error(ErrorKind::Io, "grid header lacks a resolution");
  if (!is_valid_resolution(n))
    throw Error(ErrorKind::InvalidResolution, "resolution must be a power of two >= 64, got " + std::to_string(n));
  std::vector<double> values(static_cast<std::size_t>(n) * n);
  for (auto& v : values) {
    if (!(in >> v)) throw Error(ErrorKind::Io, "grid file is truncated");
  }
  return GridField(n, std::move(values));
}

GridField load_field_file(const std::string& path, int resolution) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open field file '" + path + "'");
  return read_field(in, resolution);
}

void write_field(std::ostream& out, const GridField& field, bool prefer_expression) {
  if (prefer_expression && field.source()) {
    out << "expr: " << field.source()->to_string() << '\n';
    return;
  }
  const int n = field.resolution();
  out << "grid: " << n << '\n' << std::setprecision(17);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i) out << ' ';
      out << field.value(i, j);
    }
    out << '\n';
  }
}

}  // namespace kreeb
