#include "kreeb/modeldiffeo.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "kreeb/error.hpp"

namespace kreeb {

namespace {

void require_unit_interval(double t) {
  if (!(t >= -1.0 && t <= 1.0)) {
    std::ostringstream msg;
    msg << "bump argument " << t << " outside [-1, 1]";
    throw Error(ErrorKind::Domain, msg.str());
  }
}

Vec2 wrap_vec(Vec2 v) { return {wrap_half(v.x), wrap_half(v.y)}; }

double lerp(double a, double b, double t) { return a + (b - a) * t; }

void require_resolution(int n) {
  if (n < 2) throw Error(ErrorKind::InvalidResolution, "resolution must be at least 2");
}

}  // namespace

double bump_alpha(double t) {
  require_unit_interval(t);
  return smooth_step(t + 0.5);
}

double bump_beta(double t) {
  require_unit_interval(t);
  return smooth_step(3.0 * (2.0 / 3.0 - std::abs(t)));
}

double CollarFixture::collar(int i) const { return wrap01((i + 0.25) / n); }

std::vector<TorusPoint> CollarFixture::collar_curve(int i, int samples) const {
  std::vector<TorusPoint> pts;
  pts.reserve(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) pts.emplace_back(collar(i), double(k) / samples);
  return pts;
}

CollarFixture make_flat_collar_fixture(int n, std::optional<double> eps) {
  if (n < 1) throw Error(ErrorKind::Domain, "fixture needs n >= 1");
  const double e = eps.value_or(0.1 / n);
  if (!(e > 0.0 && e < 1.0 / (8.0 * n))) throw Error(ErrorKind::Domain, "collar width must lie in (0, 1/(8n))");
  // psi vanishes where 1 - cos(2 pi n (x - x0)) <= a, i.e. within eps of a collar,
  // and saturates well before the critical circles of cos(2 pi n x).
  const double x0 = 0.25 / n;
  const double a = 1.0 - std::cos(2.0 * std::numbers::pi * n * e);
  const double b = 0.8 * (1.0 - a);
  std::ostringstream s;
  s.precision(17);
  s << "cos(" << 2 * n << "*pi*x)+0.1*step((1-cos(" << 2 * n << "*pi*(x-" << x0 << "))-" << a << ")/" << b
    << ")*cos(2*pi*y)";
  CollarFixture fx;
  fx.n = n;
  fx.eps = e;
  fx.expr = parse_field_expr(s.str());
  return fx;
}

// ---------------------------------------------------------------------------

ShiftField::ShiftField(int resolution, std::vector<double> values) : n_(resolution), v_(std::move(values)) {
  require_resolution(n_);
  if (v_.size() != static_cast<std::size_t>(n_) * n_) throw Error(ErrorKind::Domain, "shift field has the wrong size");
}

ShiftField ShiftField::constant(int resolution, double c) {
  return ShiftField(resolution, std::vector<double>(static_cast<std::size_t>(resolution) * resolution, c));
}

double ShiftField::value(int i, int j) const {
  const int wi = ((i % n_) + n_) % n_, wj = ((j % n_) + n_) % n_;
  return v_[static_cast<std::size_t>(wj) * n_ + wi];
}

double ShiftField::at(TorusPoint p) const {
  const double gx = p.x * n_, gy = p.y * n_;
  const int i = static_cast<int>(std::floor(gx)), j = static_cast<int>(std::floor(gy));
  const double tx = gx - i, ty = gy - j;
  return lerp(lerp(value(i, j), value(i + 1, j), tx), lerp(value(i, j + 1), value(i + 1, j + 1), tx), ty);
}

double ShiftField::max_abs() const {
  double m = 0.0;
  for (double v : v_) m = std::max(m, std::abs(v));
  return m;
}

ShiftField ShiftField::plus(double c) const {
  std::vector<double> v(v_);
  for (double& x : v) x += c;
  return ShiftField(n_, std::move(v));
}

// ---------------------------------------------------------------------------

GridDiffeo::GridDiffeo(int resolution, std::vector<Vec2> displacement) : n_(resolution), d_(std::move(displacement)) {
  require_resolution(n_);
  if (d_.size() != static_cast<std::size_t>(n_) * n_) throw Error(ErrorKind::Domain, "displacement field has the wrong size");
}

GridDiffeo GridDiffeo::identity(int resolution) { return translation(resolution, 0.0, 0.0); }

GridDiffeo GridDiffeo::translation(int resolution, double dx, double dy) {
  return GridDiffeo(resolution, std::vector<Vec2>(static_cast<std::size_t>(resolution) * resolution, Vec2{dx, dy}));
}

Vec2 GridDiffeo::displacement(int i, int j) const {
  const int wi = ((i % n_) + n_) % n_, wj = ((j % n_) + n_) % n_;
  return d_[static_cast<std::size_t>(wj) * n_ + wi];
}

Vec2 GridDiffeo::displacement_at(TorusPoint p) const {
  const double gx = p.x * n_, gy = p.y * n_;
  const int i = static_cast<int>(std::floor(gx)), j = static_cast<int>(std::floor(gy));
  const double tx = gx - i, ty = gy - j;
  const Vec2 d00 = displacement(i, j);
  if (tx == 0.0 && ty == 0.0) return d00;
  const Vec2 d10 = d00 + wrap_vec(displacement(i + 1, j) - d00);
  const Vec2 d01 = d00 + wrap_vec(displacement(i, j + 1) - d00);
  const Vec2 d11 = d00 + wrap_vec(displacement(i + 1, j + 1) - d00);
  return {lerp(lerp(d00.x, d10.x, tx), lerp(d01.x, d11.x, tx), ty),
          lerp(lerp(d00.y, d10.y, tx), lerp(d01.y, d11.y, tx), ty)};
}

GridDiffeo GridDiffeo::after(const GridDiffeo& first) const {
  if (first.n_ != n_) throw Error(ErrorKind::MixedContext, "composing maps on different grids");
  std::vector<Vec2> d(d_.size());
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i) {
      const Vec2 dg = first.displacement(i, j);
      const TorusPoint moved(Vec2{double(i) / n_, double(j) / n_} + dg);
      d[static_cast<std::size_t>(j) * n_ + i] = dg + displacement_at(moved);
    }
  return GridDiffeo(n_, std::move(d));
}

GridDiffeo GridDiffeo::power(int k) const {
  if (k < 0) throw Error(ErrorKind::Domain, "negative powers are not supported");
  GridDiffeo out = identity(n_);
  for (int r = 0; r < k; ++r) out = after(out);
  return out;
}

double GridDiffeo::min_jacobian() const {
  double worst = INFINITY;
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i) {
      // Central differences, each half step wrapped on its own.
      const Vec2 d = displacement(i, j);
      const Vec2 ddx = (0.5 * n_) * (wrap_vec(displacement(i + 1, j) - d) + wrap_vec(d - displacement(i - 1, j)));
      const Vec2 ddy = (0.5 * n_) * (wrap_vec(displacement(i, j + 1) - d) + wrap_vec(d - displacement(i, j - 1)));
      worst = std::min(worst, (1.0 + ddx.x) * (1.0 + ddy.y) - ddy.x * ddx.y);
    }
  return worst;
}

double GridDiffeo::distance(const GridDiffeo& other) const {
  if (other.n_ != n_) throw Error(ErrorKind::MixedContext, "comparing maps on different grids");
  double m = 0.0;
  for (std::size_t k = 0; k < d_.size(); ++k) {
    const Vec2 w = wrap_vec(d_[k] - other.d_[k]);
    m = std::max({m, std::abs(w.x), std::abs(w.y)});
  }
  return m;
}

double GridDiffeo::invariance_error(const GridField& f) const {
  if (f.source()) return invariance_error(*f.source());
  double m = 0.0;
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i) {
      const TorusPoint p(double(i) / n_, double(j) / n_);
      const TorusPoint q = apply(p);
      if (q.x == p.x && q.y == p.y) continue;
      m = std::max(m, std::abs(f.evaluate(q) - f.evaluate(p)));
    }
  return m;
}

double GridDiffeo::invariance_error(const FieldExpr& f) const {
  double m = 0.0;
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i) {
      const TorusPoint p(double(i) / n_, double(j) / n_);
      const TorusPoint q = apply(p);
      if (q.x == p.x && q.y == p.y) continue;
      m = std::max(m, std::abs(f(q.x, q.y) - f(p.x, p.y)));
    }
  return m;
}

// ---------------------------------------------------------------------------

Matrix2 homology_action(const GridDiffeo& h) {
  if (!(h.min_jacobian() > 0.0)) throw Error(ErrorKind::NonBijective, "map folds: nonpositive Jacobian");
  const int n = h.resolution();
  // Image of a node loop, unwrapped step by step.
  auto loop_class = [&](bool along_x) {
    Vec2 total{0.0, 0.0};
    for (int k = 0; k < n; ++k) {
      const Node a = along_x ? Node{k, 0} : Node{0, k};
      const Node b = along_x ? Node{k + 1, 0} : Node{0, k + 1};
      const Vec2 pa{double(a.i) / n, double(a.j) / n}, pb{double(b.i) / n, double(b.j) / n};
      const Vec2 step = (pb + h.displacement(b.i, b.j)) - (pa + h.displacement(a.i, a.j));
      total = total + wrap_vec(step);
    }
    return total;
  };
  const Vec2 cx = loop_class(true), cy = loop_class(false);
  Matrix2 m{};
  const double entries[2][2] = {{cx.x, cy.x}, {cx.y, cy.y}};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      const double v = entries[r][c];
      if (std::abs(v - std::round(v)) > 1e-6) throw Error(ErrorKind::NonBijective, "loop image does not close up");
      m[r][c] = std::llround(v);
    }
  const std::int64_t det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  if (det != 1 && det != -1) throw Error(ErrorKind::NonBijective, "action on H_1 is not invertible");
  return m;
}

// ---------------------------------------------------------------------------

namespace {

Vec2 axis(Flow f) { return f == Flow::L ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0}; }

void check_flow_frames(const IsotopySegment& seg) {
  const int n = seg.alpha.resolution();
  // det(I + t D alpha) = 1 + t * (derivative along the flow), linear in t, so the
  // steepest node decides every frame at once.
  double steepest = 0.0;
  int si = 0, sj = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double along = seg.flow == Flow::L ? seg.alpha.value(i + 1, j) - seg.alpha.value(i, j)
                                               : seg.alpha.value(i, j + 1) - seg.alpha.value(i, j);
      if (along < steepest) steepest = along, si = i, sj = j;
    }
  for (int k = 1; k <= seg.frames; ++k) {
    if (1.0 + double(k) / seg.frames * n * steepest > 0.0) continue;
    std::ostringstream msg;
    msg << "frame " << k << " of " << seg.frames << " folds at node (" << si << ", " << sj << ")";
    throw Error(ErrorKind::NotDiffeo, msg.str());
  }
}

}  // namespace

Isotopy Isotopy::flow(Flow flow, ShiftField alpha, int frames) {
  if (frames < 1) throw Error(ErrorKind::Domain, "an isotopy needs at least one frame");
  Isotopy iso(alpha.resolution());
  IsotopySegment seg{flow, std::move(alpha), frames};
  check_flow_frames(seg);
  iso.segs_.push_back(std::move(seg));
  return iso;
}

Isotopy Isotopy::rotation(int resolution, Flow flow, double amount, int frames) {
  return Isotopy::flow(flow, ShiftField::constant(resolution, amount), frames);
}

int Isotopy::frame_count() const {
  int total = 0;
  for (const auto& s : segs_) total += s.frames;
  return total;
}

Isotopy Isotopy::then(const Isotopy& next) const {
  if (next.n_ != n_) throw Error(ErrorKind::MixedContext, "concatenating isotopies on different grids");
  Isotopy out(*this);
  out.segs_.insert(out.segs_.end(), next.segs_.begin(), next.segs_.end());
  return out;
}

Vec2 Isotopy::image(int frame, TorusPoint p) const {
  if (frame < 0 || frame > frame_count()) throw Error(ErrorKind::InvalidIndex, "frame out of range");
  Vec2 q = p.vec();
  int left = frame;
  for (const auto& s : segs_) {
    if (left == 0) break;
    const double t = left >= s.frames ? 1.0 : double(left) / s.frames;
    q = q + (t * s.alpha.at(TorusPoint(q))) * axis(s.flow);
    left -= std::min(left, s.frames);
  }
  return q;
}

GridDiffeo Isotopy::frame(int k) const {
  std::vector<Vec2> d(static_cast<std::size_t>(n_) * n_);
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i) {
      const Vec2 p{double(i) / n_, double(j) / n_};
      d[static_cast<std::size_t>(j) * n_ + i] = image(k, TorusPoint(p)) - p;
    }
  return GridDiffeo(n_, std::move(d));
}

double Isotopy::max_step() const {
  double m = 0.0;
  for (const auto& s : segs_) m = std::max(m, s.alpha.max_abs() / s.frames);
  return m;
}

GridDiffeo flow_shift(Flow flow, const ShiftField& alpha, int frames) {
  return Isotopy::flow(flow, alpha, frames).terminal();
}

// ---------------------------------------------------------------------------

namespace {

GridDiffeo vertical_profile(int resolution, double (*profile)(double u, double eps), double center, double eps) {
  std::vector<Vec2> d(static_cast<std::size_t>(resolution) * resolution);
  for (int i = 0; i < resolution; ++i) {
    const double dy = profile(wrap_half(double(i) / resolution - center), eps);
    for (int j = 0; j < resolution; ++j) d[static_cast<std::size_t>(j) * resolution + i] = {0.0, dy};
  }
  return GridDiffeo(resolution, std::move(d));
}

double slide_dy(double u, double eps) { return std::abs(u) < eps ? bump_beta(u / eps) : 0.0; }

double twist_dy(double u, double eps) {
  if (u <= -eps) return 0.0;
  if (u >= eps) return 1.0;
  return bump_alpha(u / eps);
}

void require_collar(const CollarFixture& fx, int i, int resolution) {
  if (i < 0 || i >= fx.n) throw Error(ErrorKind::InvalidIndex, "no collar " + std::to_string(i));
  const double c = fx.collar(i);
  for (int col = 0; col < resolution; ++col) {
    const double x = double(col) / resolution;
    if (std::abs(wrap_half(x - c)) > fx.eps) continue;
    const double base = fx.expr(x, 0.0);
    for (int row = 1; row < resolution; ++row) {
      if (std::abs(fx.expr(x, double(row) / resolution) - base) > 1e-12 * std::max(1.0, std::abs(base))) {
        std::ostringstream msg;
        msg << "field depends on y at x = " << x << " inside the strip around collar " << i;
        throw Error(ErrorKind::UnsupportedField, msg.str());
      }
    }
  }
}

}  // namespace

GridDiffeo slide_profile(int resolution, double center, double eps) {
  return vertical_profile(resolution, slide_dy, center, eps);
}

GridDiffeo twist_profile(int resolution, double center, double eps) {
  return vertical_profile(resolution, twist_dy, center, eps);
}

GridDiffeo special_slide(int i, const CollarFixture& fx, int resolution) {
  require_collar(fx, i, resolution);
  return slide_profile(resolution, fx.collar(i), fx.eps);
}

GridDiffeo special_twist(int i, const CollarFixture& fx, int resolution) {
  require_collar(fx, i, resolution);
  return twist_profile(resolution, fx.collar(i), fx.eps);
}

ShiftField slide_shift(const CollarFixture& fx, int resolution, int only) {
  return ShiftField::from_x(resolution, [&](double x) {
    double s = 0.0;
    for (int i = 0; i < fx.n; ++i)
      if (only < 0 || only == i) s += slide_dy(wrap_half(x - fx.collar(i)), fx.eps);
    return s;
  });
}

GridDiffeo lambda_map(const CollarFixture& fx, int resolution) {
  return GridDiffeo::translation(resolution, 1.0 / fx.n, 0.0);
}

// ---------------------------------------------------------------------------

TwistVector twist_coordinates(const GridDiffeo& h, const CollarFixture& fx) {
  const int res = h.resolution(), n = fx.n;
  constexpr double tol = 1e-6;
  for (int c = 0; c < n; ++c)
    for (int row = 0; row < res; ++row) {
      const Vec2 d = wrap_vec(h.displacement_at(TorusPoint(fx.collar(c), double(row) / res)));
      if (std::abs(d.x) > tol || std::abs(d.y) > tol) {
        std::ostringstream msg;
        msg << "collar circle " << c << " is moved at y = " << double(row) / res;
        throw Error(ErrorKind::NotFixedOnCurves, msg.str());
      }
    }

  // Walk y = 0 from C_0 once around, unwrapping dy; record the lift at every C_c.
  const double x0 = fx.collar(0);
  struct Stop {
    double x;
    int collar;  // -1 for grid nodes
  };
  std::vector<Stop> stops;
  for (int c = 0; c <= n; ++c) stops.push_back({x0 + double(c) / n, c});
  for (int i = 0; i < res; ++i) {
    double x = double(i) / res;
    while (x <= x0) x += 1.0;
    if (x < x0 + 1.0) stops.push_back({x, -1});
  }
  std::sort(stops.begin(), stops.end(), [](const Stop& a, const Stop& b) { return a.x < b.x; });

  std::vector<double> lift(static_cast<std::size_t>(n) + 1, 0.0);
  double prev = h.displacement_at(TorusPoint(x0, 0.0)).y, acc = 0.0;
  for (const Stop& s : stops) {
    const double dy = h.displacement_at(TorusPoint(s.x, 0.0)).y;
    acc += wrap_half(dy - prev);
    prev = dy;
    if (s.collar >= 0) lift[static_cast<std::size_t>(s.collar)] = acc;
  }
  TwistVector a(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) a[static_cast<std::size_t>(c)] = std::llround(lift[c + 1] - lift[c]);
  return a;
}

TwistVector slide_vector(int i, int n) {
  if (n < 1 || i < 0 || i >= n) throw Error(ErrorKind::InvalidIndex, "no slide " + std::to_string(i));
  TwistVector q(static_cast<std::size_t>(n), 0);
  q[static_cast<std::size_t>((i + n - 1) % n)] += 1;
  q[static_cast<std::size_t>(i)] -= 1;
  return q;
}

std::vector<std::int64_t> decompose_in_slides(const TwistVector& a) {
  std::int64_t sum = 0;
  for (auto v : a) sum += v;
  if (a.empty() || sum != 0) throw Error(ErrorKind::NotInDelta, "twist vector entries do not sum to zero");
  // Coordinate 0 sees only b_1; coordinate j sees b_{j+1} - b_j.
  std::vector<std::int64_t> b;
  if (a.size() == 1) return b;
  b.push_back(a[0]);
  for (std::size_t j = 1; j + 1 < a.size(); ++j) b.push_back(b.back() + a[j]);
  return b;
}

// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'K', 'R', 'D', 'I', 'F', 'F', '0', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int k = 0; k < 4; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  unsigned char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(bits >> (8 * k));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_bytes(std::istream& in, int count) {
  unsigned char b[8] = {};
  if (!in.read(reinterpret_cast<char*>(b), count)) throw Error(ErrorKind::Io, "truncated diffeo file");
  std::uint64_t v = 0;
  for (int k = 0; k < count; ++k) v |= std::uint64_t(b[k]) << (8 * k);
  return v;
}

double get_f64(std::istream& in) {
  const std::uint64_t bits = get_bytes(in, 8);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

}  // namespace

void write_diffeos(std::ostream& out, const std::vector<GridDiffeo>& frames) {
  const int n = frames.empty() ? 0 : frames.front().resolution();
  out.write(kMagic, sizeof kMagic);
  put_u32(out, static_cast<std::uint32_t>(n));
  put_u32(out, static_cast<std::uint32_t>(frames.size()));
  for (const auto& f : frames) {
    if (f.resolution() != n) throw Error(ErrorKind::MixedContext, "frames on different grids");
    for (const Vec2& d : f.displacements()) put_f64(out, d.x);
    for (const Vec2& d : f.displacements()) put_f64(out, d.y);
  }
  if (!out) throw Error(ErrorKind::Io, "failed to write diffeo file");
}

std::vector<GridDiffeo> read_diffeos(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw Error(ErrorKind::Io, "not a diffeo file");
  const int n = static_cast<int>(get_bytes(in, 4));
  const std::uint64_t count = get_bytes(in, 4);
  std::vector<GridDiffeo> frames;
  for (std::uint64_t f = 0; f < count; ++f) {
    std::vector<Vec2> d(static_cast<std::size_t>(n) * n);
    for (auto& v : d) v.x = get_f64(in);
    for (auto& v : d) v.y = get_f64(in);
    frames.emplace_back(n, std::move(d));
  }
  return frames;
}

}  // namespace kreeb
