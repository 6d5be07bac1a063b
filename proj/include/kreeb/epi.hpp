#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kreeb/decomp.hpp"
#include "kreeb/modeldiffeo.hpp"

namespace kreeb {

/// The orbit curves C_0..C_{n-1} in cyclic order, with their transverse coordinates.
struct OrbitFamily {
  HomologyClass curve_class{0, 1};
  std::vector<std::vector<TorusPoint>> curves;
  std::vector<double> ell;  // increasing, ell[0] in [0, 1), all below ell[0] + 1

  int n() const { return static_cast<int>(curves.size()); }

  /// Continuous curve index of a lifted point: integer k*n + i on (the
  /// transverse position of) C_i in the k-th fundamental domain, linear in between.
  double index_of(Vec2 lifted) const;
};

/// The collar circles of the fixture, `samples` points each.
OrbitFamily fixture_orbit(const CollarFixture& fx, int samples);
/// The orbit of cut curve `chosen`, starting with it.
OrbitFamily orbit_family(const CyclicBlockWord& word, int chosen = 0);

/// Hausdorff distance between two closed polylines on the torus.
double hausdorff_distance(const std::vector<TorusPoint>& a, const std::vector<TorusPoint>& b);

/// The shift k with h(C_i) = C_{i+k mod n}. Curves match when their Hausdorff
/// distance is at most `tol` (default 2/N).
/// Throws NotCurvePreserving or NonUniformShift.
int krot(const GridDiffeo& h, const OrbitFamily& family, double tol = -1.0);

struct CoverLift {
  int n = 1;
  std::vector<double> trajectory;  // curve index of the tracked point per frame, starting at 0
  std::int64_t displacement = 0;
  double residual = 0.0;  // distance of the terminal index from the nearest integer
};

/// Lifts the first point of C_0 through the frames and reads off its terminal
/// index shift. Throws DiscontinuousLift if a frame moves it by 1/2 or more, and
/// NotCurvePreserving if it does not end near a curve.
CoverLift eval(const Isotopy& omega, const OrbitFamily& family);

std::string epi_report_json(int krot_value, const CoverLift& lift, int indent = 2);

}  // namespace kreeb
