#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "kreeb/error.hpp"
#include "kreeb/modeldiffeo.hpp"
#include "kreeb/morse.hpp"
#include "kreeb/smith.hpp"

using namespace kreeb;

namespace {

constexpr int kRes = 512;

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Io;
}

// Horizontal twist: x moves by alpha((y - 1/2)/w), a Dehn twist along a y-circle.
GridDiffeo horizontal_twist(int res, double w) {
  std::vector<double> v(static_cast<std::size_t>(res) * res);
  for (int j = 0; j < res; ++j) {
    const double u = double(j) / res - 0.5;
    const double s = u <= -w ? 0.0 : u >= w ? 1.0 : bump_alpha(u / w);
    for (int i = 0; i < res; ++i) v[static_cast<std::size_t>(j) * res + i] = s;
  }
  return flow_shift(Flow::L, ShiftField(res, std::move(v)));
}

Matrix2 product(const Matrix2& a, const Matrix2& b) {
  Matrix2 c{};
  for (int r = 0; r < 2; ++r)
    for (int k = 0; k < 2; ++k) c[r][k] = a[r][0] * b[0][k] + a[r][1] * b[1][k];
  return c;
}

}  // namespace

TEST_CASE("bump plateaus") {
  CHECK(bump_alpha(-1.0) == 0.0);
  CHECK(bump_alpha(-0.5) == 0.0);
  CHECK(bump_alpha(0.5) == 1.0);
  CHECK(bump_alpha(1.0) == 1.0);
  CHECK(bump_alpha(0.0) == doctest::Approx(0.5));
  CHECK(bump_beta(0.0) == 1.0);
  CHECK(bump_beta(1.0 / 3.0) == 1.0);
  CHECK(bump_beta(-0.2) == 1.0);
  CHECK(bump_beta(0.9) == 0.0);
  CHECK(bump_beta(-2.0 / 3.0) == 0.0);
  double prev = 0.0;
  for (int k = 0; k <= 200; ++k) {
    const double t = -1.0 + k / 100.0;
    const double a = bump_alpha(t), b = bump_beta(t);
    CHECK(a >= prev);
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
    CHECK(b >= 0.0);
    CHECK(b <= 1.0);
    CHECK(bump_beta(t) == bump_beta(-t));
    prev = a;
  }
  CHECK(kind_of([] { bump_alpha(1.5); }) == ErrorKind::Domain);
  CHECK(kind_of([] { bump_beta(-1.01); }) == ErrorKind::Domain);
  CHECK(kind_of([] { bump_beta(NAN); }) == ErrorKind::Domain);
}

TEST_CASE("flat-collar fixture") {
  for (int n = 1; n <= 3; ++n) {
    CAPTURE(n);
    const CollarFixture fx = make_flat_collar_fixture(n);
    const GridField f = sample_grid(fx.expr, kRes);

    // Independent count: off the lines y = 0, 1/2 a critical point needs psi = 0,
    // where df/dx = -2 pi n sin(2 pi n x) is far from zero. On the lines, count
    // sign changes of a centred difference of f along x.
    int zeros = 0;
    const int samples = 20000;
    const double h = 1e-6;
    for (double y : {0.0, 0.5}) {
      auto dfdx = [&](double x) { return (fx.expr(x + h, y) - fx.expr(x - h, y)) / (2 * h); };
      double prev = dfdx(0.5 / samples);
      for (int k = 1; k <= samples; ++k) {
        const double cur = dfdx((k + 0.5) / samples);
        zeros += (prev < 0) != (cur < 0);
        prev = cur;
      }
    }
    CHECK(zeros == 4 * n);
    CHECK(find_critical_points(f).size() == static_cast<std::size_t>(4 * n));

    double shift_err = 0.0;
    for (int j = 0; j < 64; ++j)
      for (int i = 0; i < 64; ++i) {
        const double x = i / 64.0, y = j / 64.0;
        shift_err = std::max(shift_err, std::abs(fx.expr(x + 1.0 / n, y) - fx.expr(x, y)));
      }
    CHECK(shift_err <= 1e-14);

    int sloped = 0, collar_nodes = 0;
    for (int c = 0; c < n; ++c)
      for (int i = 0; i < kRes; ++i) {
        const double x = double(i) / kRes;
        if (std::abs(wrap_half(x - fx.collar(c))) > fx.eps) continue;
        for (int j = 0; j < kRes; ++j) {
          ++collar_nodes;
          sloped += f.gradient(i, j).gy != 0.0;
        }
      }
    CHECK(collar_nodes > 0);
    CHECK(sloped == 0);
  }
  CHECK(kind_of([] { make_flat_collar_fixture(0); }) == ErrorKind::Domain);
  CHECK(kind_of([] { make_flat_collar_fixture(2, 1.0 / 16); }) == ErrorKind::Domain);
  CHECK(kind_of([] { make_flat_collar_fixture(2, 0.0); }) == ErrorKind::Domain);
  CHECK(make_flat_collar_fixture(2).eps == doctest::Approx(0.05));
}

TEST_CASE("slides and twists preserve the fixture") {
  for (int n = 1; n <= 3; ++n) {
    CAPTURE(n);
    const CollarFixture fx = make_flat_collar_fixture(n);
    std::vector<GridDiffeo> slides;
    for (int i = 0; i < n; ++i) {
      slides.push_back(special_slide(i, fx, kRes));
      const GridDiffeo& s = slides.back();
      CHECK(s.invariance_error(fx.expr) <= 1e-9);
      CHECK(special_twist(i, fx, kRes).invariance_error(fx.expr) <= 1e-9);
      CHECK(s.min_jacobian() > 0.0);
      // Identity on C_i itself and near the strip edges.
      for (double dx : {0.0, fx.eps / 4, -fx.eps / 4, fx.eps, -fx.eps, 2 * fx.eps})
        for (int j = 0; j < kRes; j += 31) {
          const Vec2 d = s.displacement_at(TorusPoint(fx.collar(i) + dx, double(j) / kRes));
          CHECK(std::abs(wrap_half(d.y)) <= 1e-12);
          CHECK(d.x == 0.0);
        }
    }
    // Pairwise disjoint supports.
    int overlap = 0;
    for (int i = 0; i < n; ++i)
      for (int k = i + 1; k < n; ++k)
        for (std::size_t p = 0; p < slides[i].displacements().size(); ++p) {
          const bool moves_i = std::abs(wrap_half(slides[i].displacements()[p].y)) > 0;
          const bool moves_k = std::abs(wrap_half(slides[k].displacements()[p].y)) > 0;
          overlap += moves_i && moves_k;
        }
    CHECK(overlap == 0);

    const GridDiffeo lambda = lambda_map(fx, kRes);
    CHECK(lambda.invariance_error(fx.expr) <= 1e-9);
    GridDiffeo ln = lambda.power(n);
    CHECK(ln.distance(GridDiffeo::identity(kRes)) <= 1e-12);
  }
}

TEST_CASE("slides need a flat strip") {
  CollarFixture fake = make_flat_collar_fixture(2);
  fake.expr = parse_field_expr("cos(4*pi*x)+0.5*cos(2*pi*y)");
  CHECK(kind_of([&] { special_slide(0, fake, 128); }) == ErrorKind::UnsupportedField);
  const CollarFixture fx = make_flat_collar_fixture(2);
  CHECK(kind_of([&] { special_slide(2, fx, 128); }) == ErrorKind::InvalidIndex);
  // A slide centred off the collar breaks invariance.
  const GridDiffeo moved = slide_profile(kRes, fx.collar(0) + 2 * fx.eps, fx.eps);
  CHECK(moved.invariance_error(fx.expr) > 1e-3);
}

TEST_CASE("homology action") {
  const int res = 256;
  const CollarFixture fx = make_flat_collar_fixture(2);
  const Matrix2 id{{{1, 0}, {0, 1}}};
  CHECK(homology_action(lambda_map(fx, res)) == id);
  CHECK(homology_action(GridDiffeo::identity(res)) == id);
  const Matrix2 tau = homology_action(special_twist(1, fx, res));
  CHECK(tau == Matrix2{{{1, 0}, {1, 1}}});
  const Matrix2 sigma = homology_action(horizontal_twist(res, 0.1));
  CHECK(sigma == Matrix2{{{1, 1}, {0, 1}}});
  CHECK(homology_action(special_slide(0, fx, res)) == id);

  // Functoriality on random pairs; wide twists keep composites resolved on the grid.
  const std::vector<GridDiffeo> gens = {twist_profile(res, 0.3, 0.4), horizontal_twist(res, 0.4), lambda_map(fx, res),
                                        GridDiffeo::translation(res, 0.3, 0.7)};
  std::mt19937 rng(11);
  for (int trial = 0; trial < 12; ++trial) {
    const GridDiffeo& g = gens[rng() % gens.size()];
    const GridDiffeo& h = gens[rng() % gens.size()];
    CHECK(homology_action(h.after(g)) == product(homology_action(h), homology_action(g)));
  }

  // A fold is rejected.
  std::vector<Vec2> d(static_cast<std::size_t>(res) * res);
  for (int j = 0; j < res; ++j)
    for (int i = 0; i < res; ++i) d[static_cast<std::size_t>(j) * res + i] = {-0.3 * std::sin(2 * std::numbers::pi * i / res), 0.0};
  CHECK(kind_of([&] { homology_action(GridDiffeo(res, d)); }) == ErrorKind::NonBijective);
}

TEST_CASE("twist coordinates of slides") {
  for (int n = 1; n <= 3; ++n) {
    CAPTURE(n);
    const CollarFixture fx = make_flat_collar_fixture(n);
    GridDiffeo all = GridDiffeo::identity(kRes);
    for (int i = 0; i < n; ++i) {
      const GridDiffeo s = special_slide(i, fx, kRes);
      CHECK(twist_coordinates(s, fx) == slide_vector(i, n));
      all = s.after(all);
    }
    CHECK(twist_coordinates(all, fx) == TwistVector(n, 0));
    CHECK(twist_coordinates(GridDiffeo::identity(kRes), fx) == TwistVector(n, 0));
    // s_i^2 doubles the vector (resolved on this grid while 2 max|beta'| / (eps N) < 1/2).
    if (n == 2) {
      const GridDiffeo s = special_slide(1, fx, kRes);
      TwistVector twice = slide_vector(1, n);
      for (auto& v : twice) v *= 2;
      CHECK(twist_coordinates(s.after(s), fx) == twice);
    }
    if (n >= 2) CHECK(kind_of([&] { twist_coordinates(lambda_map(fx, kRes), fx); }) == ErrorKind::NotFixedOnCurves);
  }
  CHECK(slide_vector(2, 4) == TwistVector{0, 1, -1, 0});
  CHECK(slide_vector(0, 3) == TwistVector{-1, 0, 1});
  CHECK(slide_vector(0, 1) == TwistVector{0});
}

TEST_CASE("slide vectors form a basis of the zero-sum lattice") {
  for (int n = 2; n <= 6; ++n) {
    IntMatrix cols(static_cast<std::size_t>(n), std::vector<std::int64_t>(n - 1));
    for (int i = 1; i < n; ++i) {
      const TwistVector q = slide_vector(i, n);
      for (int r = 0; r < n; ++r) cols[r][i - 1] = q[r];
    }
    const SmithForm s = smith_normal_form(cols);
    CHECK(s.diagonal == std::vector<std::int64_t>(n - 1, 1));
    IntMatrix top(cols.begin(), cols.end() - 1);
    CHECK(std::abs(determinant(top)) == 1);
  }
}

TEST_CASE("decompose in slides") {
  CHECK(decompose_in_slides(slide_vector(2, 4)) == std::vector<std::int64_t>{0, 1, 0});
  CHECK(decompose_in_slides({1, 0, 0, 0, -1}) == std::vector<std::int64_t>{1, 1, 1, 1});
  CHECK(decompose_in_slides({0}).empty());
  CHECK(kind_of([] { decompose_in_slides({1, 0, 0}); }) == ErrorKind::NotInDelta);
  CHECK(kind_of([] { decompose_in_slides({}); }) == ErrorKind::NotInDelta);

  std::mt19937 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    std::vector<std::int64_t> b(static_cast<std::size_t>(n - 1));
    for (auto& v : b) v = static_cast<std::int64_t>(rng() % 41) - 20;
    TwistVector a(static_cast<std::size_t>(n), 0);
    for (int i = 1; i < n; ++i) {
      const TwistVector q = slide_vector(i, n);
      for (int r = 0; r < n; ++r) a[r] += b[i - 1] * q[r];
    }
    CHECK(decompose_in_slides(a) == b);
  }
}

TEST_CASE("flow shifts") {
  const int res = 256;
  CHECK(flow_shift(Flow::L, ShiftField::constant(res, 0.3)).distance(GridDiffeo::translation(res, 0.3, 0.0)) <= 1e-15);
  CHECK(flow_shift(Flow::M, ShiftField::constant(res, -0.2)).distance(GridDiffeo::translation(res, 0.0, -0.2)) <= 1e-15);

  for (int n = 1; n <= 3; ++n) {
    const CollarFixture fx = make_flat_collar_fixture(n);
    const ShiftField sigma = slide_shift(fx, kRes);
    GridDiffeo all = GridDiffeo::identity(kRes);
    for (int i = 0; i < n; ++i) all = special_slide(i, fx, kRes).after(all);
    const GridDiffeo fs = flow_shift(Flow::M, sigma);
    CHECK(fs.distance(all) <= 1e-12);
    CHECK(flow_shift(Flow::M, sigma.plus(1.0)).distance(fs) <= 1e-12);
    CHECK(fs.min_jacobian() > 0.0);
  }

  // Too steep along the flow: det = 1 + t * d(alpha)/dy turns negative.
  std::vector<double> v(static_cast<std::size_t>(res) * res);
  for (int j = 0; j < res; ++j)
    for (int i = 0; i < res; ++i) v[static_cast<std::size_t>(j) * res + i] = -3.0 * std::sin(2 * std::numbers::pi * j / res) / (2 * std::numbers::pi);
  const ShiftField steep(res, v);
  CHECK(kind_of([&] { flow_shift(Flow::M, steep); }) == ErrorKind::NotDiffeo);
  // The same function across the flow is harmless.
  CHECK(flow_shift(Flow::L, steep).min_jacobian() > 0.0);
}

TEST_CASE("isotopies") {
  const int res = 128;
  const Isotopy l = Isotopy::rotation(res, Flow::L, 1.0);
  CHECK(l.frame_count() == 64);
  CHECK(l.frame(0).distance(GridDiffeo::identity(res)) == 0.0);
  CHECK(l.terminal().distance(GridDiffeo::identity(res)) <= 1e-15);
  CHECK(l.frame(16).distance(GridDiffeo::translation(res, 0.25, 0.0)) <= 1e-15);
  CHECK(l.max_step() == doctest::Approx(1.0 / 64));
  const Vec2 end = l.image(64, TorusPoint(0.1, 0.2));
  CHECK(end.x == doctest::Approx(1.1));

  const Isotopy both = l.then(Isotopy::rotation(res, Flow::M, 0.5, 32));
  CHECK(both.frame_count() == 96);
  CHECK(both.terminal().distance(GridDiffeo::translation(res, 0.0, 0.5)) <= 1e-15);
  CHECK(both.image(80, TorusPoint(0.1, 0.2)).y == doctest::Approx(0.45));
  CHECK(kind_of([&] { both.image(97, TorusPoint(0, 0)); }) == ErrorKind::InvalidIndex);
}

TEST_CASE("diffeo file round trip") {
  const CollarFixture fx = make_flat_collar_fixture(2);
  const std::vector<GridDiffeo> frames = {special_slide(0, fx, 64), lambda_map(fx, 64)};
  std::stringstream buf;
  write_diffeos(buf, frames);
  CHECK(buf.str().size() == 16 + 2 * 2 * 64 * 64 * 8);
  CHECK(buf.str().substr(0, 8) == "KRDIFF01");
  const auto back = read_diffeos(buf);
  REQUIRE(back.size() == 2);
  CHECK(back[0].distance(frames[0]) == 0.0);
  CHECK(back[1].displacements().front().x == 0.5);
  std::stringstream junk("nope");
  CHECK(kind_of([&] { read_diffeos(junk); }) == ErrorKind::Io);
}
