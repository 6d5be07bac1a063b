#include "kreeb/epi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "kreeb/error.hpp"

namespace kreeb {

namespace {

double transverse(HomologyClass c, Vec2 p) { return c[1] * p.x - c[0] * p.y; }

double segment_distance(TorusPoint p, TorusPoint a, TorusPoint b) {
  const Vec2 s = torus_delta(a, b);
  const Vec2 w = torus_delta(a, p);
  const double len2 = s.x * s.x + s.y * s.y;
  const double t = len2 > 0.0 ? std::clamp((w.x * s.x + w.y * s.y) / len2, 0.0, 1.0) : 0.0;
  return std::hypot(w.x - t * s.x, w.y - t * s.y);
}

double directed(const std::vector<TorusPoint>& from, const std::vector<TorusPoint>& to, double stop_above) {
  double worst = 0.0;
  for (const TorusPoint& p : from) {
    double best = INFINITY;
    for (std::size_t k = 0; k < to.size() && best > 0.0; ++k)
      best = std::min(best, segment_distance(p, to[k], to[(k + 1) % to.size()]));
    worst = std::max(worst, best);
    if (worst > stop_above) break;
  }
  return worst;
}

void finish_ells(OrbitFamily& fam) {
  for (std::size_t i = 1; i < fam.ell.size(); ++i)
    while (fam.ell[i] <= fam.ell[i - 1]) fam.ell[i] += 1.0;
}

}  // namespace

double OrbitFamily::index_of(Vec2 lifted) const {
  const int m = n();
  const double l = transverse(curve_class, lifted) - ell.front();
  const double k = std::floor(l);
  const double r = ell.front() + (l - k);
  int i = m - 1;
  while (i > 0 && ell[static_cast<std::size_t>(i)] > r) --i;
  const double lo = ell[static_cast<std::size_t>(i)];
  const double hi = i + 1 < m ? ell[static_cast<std::size_t>(i) + 1] : ell.front() + 1.0;
  return k * m + i + (r - lo) / (hi - lo);
}

OrbitFamily fixture_orbit(const CollarFixture& fx, int samples) {
  OrbitFamily fam;
  for (int i = 0; i < fx.n; ++i) {
    fam.curves.push_back(fx.collar_curve(i, samples));
    fam.ell.push_back(fx.collar(i));
  }
  finish_ells(fam);
  return fam;
}

OrbitFamily orbit_family(const CyclicBlockWord& word, int chosen) {
  std::vector<int> ids = orbit_curves(word, chosen);
  std::rotate(ids.begin(), std::find(ids.begin(), ids.end(), chosen), ids.end());
  OrbitFamily fam;
  fam.curve_class = word.curve_class;
  for (int id : ids) {
    fam.curves.push_back(word.curves[static_cast<std::size_t>(id)].curve.points);
    fam.ell.push_back(word.curves[static_cast<std::size_t>(id)].ell);
  }
  finish_ells(fam);
  return fam;
}

double hausdorff_distance(const std::vector<TorusPoint>& a, const std::vector<TorusPoint>& b) {
  return std::max(directed(a, b, INFINITY), directed(b, a, INFINITY));
}

int krot(const GridDiffeo& h, const OrbitFamily& family, double tol) {
  const int n = family.n();
  if (tol < 0.0) tol = 2.0 / h.resolution();
  int shift = -1;
  for (int i = 0; i < n; ++i) {
    std::vector<TorusPoint> image;
    image.reserve(family.curves[static_cast<std::size_t>(i)].size());
    for (const TorusPoint& p : family.curves[static_cast<std::size_t>(i)]) image.push_back(h.apply(p));
    int match = -1;
    for (int j = 0; j < n && match < 0; ++j) {
      const auto& target = family.curves[static_cast<std::size_t>(j)];
      // Cheap rejection on one point before the full two-sided test.
      if (directed({image.front()}, target, tol) > tol) continue;
      if (directed(image, target, tol) <= tol && directed(target, image, tol) <= tol) match = j;
    }
    if (match < 0) {
      std::ostringstream msg;
      msg << "image of curve " << i << " is not within " << tol << " of any orbit curve";
      throw Error(ErrorKind::NotCurvePreserving, msg.str());
    }
    const int k = ((match - i) % n + n) % n;
    if (shift >= 0 && k != shift) {
      std::ostringstream msg;
      msg << "curve 0 shifts by " << shift << " but curve " << i << " by " << k;
      throw Error(ErrorKind::NonUniformShift, msg.str());
    }
    shift = k;
  }
  return shift;
}

CoverLift eval(const Isotopy& omega, const OrbitFamily& family) {
  CoverLift lift;
  lift.n = family.n();
  const TorusPoint base = family.curves.front().front();
  const double start = family.index_of(base.vec());
  const int frames = omega.frame_count();
  lift.trajectory.reserve(static_cast<std::size_t>(frames) + 1);
  for (int k = 0; k <= frames; ++k) {
    const double idx = family.index_of(omega.image(k, base)) - start;
    if (k > 0 && std::abs(idx - lift.trajectory.back()) >= 0.5) {
      std::ostringstream msg;
      msg << "frame " << k << " moves the lifted curve index by " << idx - lift.trajectory.back();
      throw Error(ErrorKind::DiscontinuousLift, msg.str());
    }
    lift.trajectory.push_back(idx);
  }
  const double end = lift.trajectory.back();
  lift.displacement = std::llround(end);
  lift.residual = std::abs(end - static_cast<double>(lift.displacement));
  if (lift.residual > 0.25) {
    std::ostringstream msg;
    msg << "terminal index " << end << " is not on an orbit curve";
    throw Error(ErrorKind::NotCurvePreserving, msg.str());
  }
  return lift;
}

std::string epi_report_json(int krot_value, const CoverLift& lift, int indent) {
  nlohmann::json doc;
  doc["schema"] = 1;
  doc["n"] = lift.n;
  doc["krot"] = krot_value;
  doc["eval"] = lift.displacement;
  doc["frames"] = lift.trajectory.empty() ? 0 : static_cast<int>(lift.trajectory.size()) - 1;
  doc["trajectory"] = lift.trajectory;
  return doc.dump(indent);
}

}  // namespace kreeb
