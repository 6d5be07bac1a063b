#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kreeb/field.hpp"

namespace kreeb {

/// Flat-join bump: 0 on [-1, -1/2], 1 on [1/2, 1]. Throws Domain outside [-1, 1].
double bump_alpha(double t);
/// Plateau bump: 1 on [-1/3, 1/3], 0 on [-1, -2/3] and [2/3, 1]. Throws Domain outside [-1, 1].
double bump_beta(double t);

/// f = cos(2 pi n x) + 0.1 psi(x) cos(2 pi y), with psi of period 1/n vanishing
/// identically for |x - x_i| <= eps around the collar circles x_i = (i + 1/4)/n.
struct CollarFixture {
  int n = 1;
  double eps = 0.1;
  FieldExpr expr;

  double collar(int i) const;
  /// `samples` points of the vertical circle {x_i} x S^1, y increasing.
  std::vector<TorusPoint> collar_curve(int i, int samples) const;
};

/// Requires n >= 1 and 0 < eps < 1/(8n); eps defaults to 0.1/n. Throws Domain.
CollarFixture make_flat_collar_fixture(int n, std::optional<double> eps = std::nullopt);

/// Periodic per-node scalar, bilinear in between.
class ShiftField {
 public:
  ShiftField(int resolution, std::vector<double> values);
  static ShiftField constant(int resolution, double c);
  /// Samples g(x) at the node columns.
  template <class F>
  static ShiftField from_x(int resolution, F g) {
    std::vector<double> v(static_cast<std::size_t>(resolution) * resolution);
    for (int i = 0; i < resolution; ++i) {
      const double gi = g(double(i) / resolution);
      for (int j = 0; j < resolution; ++j) v[static_cast<std::size_t>(j) * resolution + i] = gi;
    }
    return ShiftField(resolution, std::move(v));
  }

  int resolution() const { return n_; }
  double value(int i, int j) const;
  double at(TorusPoint p) const;
  double max_abs() const;
  ShiftField plus(double c) const;

 private:
  int n_;
  std::vector<double> v_;
};

/// Self-map of the grid torus given by a displacement per node. Displacements are
/// lifted vectors; only their class mod Z^2 matters for the map itself.
class GridDiffeo {
 public:
  GridDiffeo(int resolution, std::vector<Vec2> displacement);
  static GridDiffeo identity(int resolution);
  static GridDiffeo translation(int resolution, double dx, double dy);

  int resolution() const { return n_; }
  Vec2 displacement(int i, int j) const;
  const std::vector<Vec2>& displacements() const { return d_; }

  /// Bilinear in each cell after moving the corner values to the representative
  /// nearest the lower-left corner.
  Vec2 displacement_at(TorusPoint p) const;
  TorusPoint apply(TorusPoint p) const { return TorusPoint(p.vec() + displacement_at(p)); }

  /// this o first
  GridDiffeo after(const GridDiffeo& first) const;
  GridDiffeo power(int k) const;

  /// Smallest determinant of the central-difference Jacobian over the nodes.
  double min_jacobian() const;
  /// Largest |displacement difference| mod Z^2 over the nodes.
  double distance(const GridDiffeo& other) const;
  /// max |f(h(p)) - f(p)| over the nodes, f evaluated exactly when it has an expression.
  double invariance_error(const GridField& f) const;
  double invariance_error(const FieldExpr& f) const;

 private:
  int n_;
  std::vector<Vec2> d_;
};

/// Integer 2x2 matrix, m[row][col].
using Matrix2 = std::array<std::array<std::int64_t, 2>, 2>;

/// Columns are the classes of the images of the x-loop and the y-loop.
/// Throws NonBijective if the map folds or the matrix is not unimodular.
Matrix2 homology_action(const GridDiffeo& h);

enum class Flow { L, M };

/// Piece of an isotopy: t -> Flow_{t alpha} for t in [0, 1] over `frames` steps,
/// applied after everything that came before.
struct IsotopySegment {
  Flow flow = Flow::L;
  ShiftField alpha;
  int frames = 64;
};

/// Path in Diff(T^2) starting at the identity. Frames are evaluated lazily.
class Isotopy {
 public:
  explicit Isotopy(int resolution) : n_(resolution) {}

  /// Flow_{t alpha}; every frame is checked for a positive Jacobian (NotDiffeo).
  static Isotopy flow(Flow flow, ShiftField alpha, int frames = 64);
  /// Rigid rotation by `amount` along one of the coordinate flows.
  static Isotopy rotation(int resolution, Flow flow, double amount, int frames = 64);

  int resolution() const { return n_; }
  int frame_count() const;  // frames are 0..frame_count()
  const std::vector<IsotopySegment>& segments() const { return segs_; }

  /// Concatenation: this path, then `next` applied after this path's end.
  Isotopy then(const Isotopy& next) const;

  /// Lifted image of p at a frame, continuous in the frame index.
  Vec2 image(int frame, TorusPoint p) const;
  GridDiffeo frame(int k) const;
  GridDiffeo terminal() const { return frame(frame_count()); }

  /// Largest displacement change between consecutive frames.
  double max_step() const;

 private:
  int n_;
  std::vector<IsotopySegment> segs_;
};

/// Terminal map of Flow_{t alpha}, after the per-frame Jacobian check.
GridDiffeo flow_shift(Flow flow, const ShiftField& alpha, int frames = 64);

/// Vertical shift by beta((x - center)/eps) on the strip |x - center| <= eps.
/// No flatness check; used for controls.
GridDiffeo slide_profile(int resolution, double center, double eps);
/// Vertical shift by alpha((x - center)/eps), 0 left of the strip and 1 right of it.
GridDiffeo twist_profile(int resolution, double center, double eps);

/// Slide s_i / twist tau_i on the i-th collar. Throws UnsupportedField unless f
/// is independent of y on the strip, InvalidIndex for a bad i.
GridDiffeo special_slide(int i, const CollarFixture& fx, int resolution);
GridDiffeo special_twist(int i, const CollarFixture& fx, int resolution);
/// Shift function sum_i beta((x - x_i)/eps): flowing by it gives the product of all slides.
ShiftField slide_shift(const CollarFixture& fx, int resolution, int only = -1);
/// lambda = L_{1/n}
GridDiffeo lambda_map(const CollarFixture& fx, int resolution);

using TwistVector = std::vector<std::int64_t>;

/// a_i = winding of the y-displacement across the cylinder from C_i to C_{i+1},
/// read along the row y = 0. The unwrapping needs dy to change by less than 1/2
/// between neighbouring nodes. Throws NotFixedOnCurves if h moves some C_i.
TwistVector twist_coordinates(const GridDiffeo& h, const CollarFixture& fx);

/// q(s_i) = e_{i-1} - e_i, indices mod n.
TwistVector slide_vector(int i, int n);

/// The unique b_1..b_{n-1} with sum b_i q(s_i) = a. Throws NotInDelta.
std::vector<std::int64_t> decompose_in_slides(const TwistVector& a);

/// Binary file: "KRDIFF01", uint32 N, uint32 frames, then per frame N*N dx values
/// followed by N*N dy values, float64, little-endian, row-major in y.
void write_diffeos(std::ostream& out, const std::vector<GridDiffeo>& frames);
std::vector<GridDiffeo> read_diffeos(std::istream& in);

}  // namespace kreeb
