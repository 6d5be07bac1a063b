#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "json.hpp"
#include "kreeb/cli.hpp"
#include "kreeb/covering.hpp"
#include "kreeb/epi.hpp"
#include "kreeb/smith.hpp"

namespace kreeb {

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

std::string vec_str(const std::vector<std::int64_t>& v) {
  std::ostringstream s;
  s << '(';
  for (std::size_t k = 0; k < v.size(); ++k) s << (k ? "," : "") << v[k];
  s << ')';
  return s.str();
}

class Recorder {
 public:
  explicit Recorder(VerifyReport& r) : r_(r) {}

  void add(const std::string& group, const std::string& name, bool ok, std::string detail) {
    r_.checks.push_back({group, name, ok, std::move(detail)});
  }

  /// Runs `body`, which returns {passed, detail}; errors count as failures.
  void check(const std::string& group, const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    try {
      auto [ok, detail] = body();
      add(group, name, ok, std::move(detail));
    } catch (const Error& e) {
      add(group, name, false, e.what());
    }
  }

 private:
  VerifyReport& r_;
};

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

bool VerifyReport::group_passed(const std::string& group) const {
  bool any = false;
  for (const auto& c : checks) {
    if (c.group != group) continue;
    any = true;
    if (!c.passed) return false;
  }
  return any;
}

VerifyReport run_verification(int n, int res, bool corrupt_slide, int random_isotopies) {
  VerifyReport report;
  report.n = n;
  report.resolution = res;
  report.corrupt_slide = corrupt_slide;
  Recorder rec(report);

  const CollarFixture fx = make_flat_collar_fixture(n);
  const GridField field = sample_grid(fx.expr, res);

  rec.check("fixture", "critical_count", [&] {
    const auto count = find_critical_points(field).size();
    return std::pair{count == static_cast<std::size_t>(4 * n), std::to_string(count) + " critical points"};
  });
  rec.check("fixture", "cyclic_index", [&] {
    const int idx = decompose(field, 0.0).cyclic_index;
    return std::pair{idx == n, "cyclic index " + std::to_string(idx)};
  });

  // Slides, twists and the rotation lambda.
  for (int i = 0; i < n; ++i)
    report.slides.push_back(corrupt_slide && i == 0 ? slide_profile(res, fx.collar(0) + 2 * fx.eps, fx.eps)
                                                    : special_slide(i, fx, res));
  const auto& slides = report.slides;
  std::vector<GridDiffeo> twists;
  for (int i = 0; i < n; ++i) twists.push_back(special_twist(i, fx, res));
  const GridDiffeo lambda = lambda_map(fx, res);

  rec.check("modeldiffeo", "slide_invariance", [&] {
    double worst = 0.0;
    for (const auto& s : slides) worst = std::max(worst, s.invariance_error(fx.expr));
    return std::pair{worst <= 1e-9, "max |f o s_i - f| = " + fmt(worst)};
  });
  rec.check("modeldiffeo", "twist_invariance", [&] {
    double worst = 0.0;
    for (const auto& t : twists) worst = std::max(worst, t.invariance_error(fx.expr));
    return std::pair{worst <= 1e-9, "max |f o tau_i - f| = " + fmt(worst)};
  });
  rec.check("modeldiffeo", "lambda_invariance", [&] {
    const double e = lambda.invariance_error(fx.expr);
    return std::pair{e <= 1e-9, "max |f o lambda - f| = " + fmt(e)};
  });
  rec.check("modeldiffeo", "lambda_power_identity", [&] {
    const double d = lambda.power(n).distance(GridDiffeo::identity(res));
    return std::pair{d <= 1e-12, "max displacement of lambda^n = " + fmt(d)};
  });
  rec.check("modeldiffeo", "slides_disjoint", [&] {
    int overlap = 0;
    for (int i = 0; i < n; ++i)
      for (int k = i + 1; k < n; ++k)
        for (std::size_t p = 0; p < slides[i].displacements().size(); ++p)
          overlap += wrap_half(slides[i].displacements()[p].y) != 0.0 && wrap_half(slides[k].displacements()[p].y) != 0.0;
    return std::pair{overlap == 0, std::to_string(overlap) + " nodes moved by two slides"};
  });
  rec.check("modeldiffeo", "slides_fix_curves", [&] {
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (const TorusPoint& p : fx.collar_curve(i, res)) {
        const Vec2 d = slides[i].displacement_at(p);
        worst = std::max({worst, std::abs(wrap_half(d.x)), std::abs(wrap_half(d.y))});
      }
    return std::pair{worst <= 1e-12, "max motion of C_i under s_i = " + fmt(worst)};
  });
  rec.check("modeldiffeo", "positive_jacobian", [&] {
    double worst = lambda.min_jacobian();
    for (const auto& s : slides) worst = std::min(worst, s.min_jacobian());
    for (const auto& t : twists) worst = std::min(worst, t.min_jacobian());
    return std::pair{worst > 0.0, "smallest Jacobian " + fmt(worst)};
  });
  rec.check("modeldiffeo", "homology_action", [&] {
    const Matrix2 id{{{1, 0}, {0, 1}}}, unipotent{{{1, 0}, {1, 1}}};
    bool ok = homology_action(lambda) == id && homology_action(twists[0]) == unipotent;
    for (const auto& s : slides) ok = ok && homology_action(s) == id;
    return std::pair{ok, "lambda and s_i act trivially, tau_0 as [[1,0],[1,1]]"};
  });
  rec.check("modeldiffeo", "slide_vectors", [&] {
    bool ok = true;
    std::string detail;
    for (int i = 0; i < n; ++i) {
      const TwistVector q = twist_coordinates(slides[i], fx);
      ok = ok && q == slide_vector(i, n);
      detail += (i ? " " : "") + std::string("q(s_") + std::to_string(i) + ")=" + vec_str(q);
    }
    return std::pair{ok, detail};
  });
  rec.check("modeldiffeo", "slide_product_trivial", [&] {
    GridDiffeo all = GridDiffeo::identity(res);
    for (const auto& s : slides) all = s.after(all);
    const TwistVector q = twist_coordinates(all, fx);
    return std::pair{q == TwistVector(static_cast<std::size_t>(n), 0), "q(s_0...s_{n-1}) = " + vec_str(q)};
  });
  rec.check("modeldiffeo", "slide_basis", [&] {
    if (n == 1) return std::pair{true, std::string("pi_0 G trivial (n = 1)")};
    IntMatrix cols(static_cast<std::size_t>(n), std::vector<std::int64_t>(static_cast<std::size_t>(n) - 1));
    for (int i = 1; i < n; ++i) {
      const TwistVector q = twist_coordinates(slides[i], fx);
      for (int r = 0; r < n; ++r) cols[r][i - 1] = q[r];
    }
    const IntMatrix top(cols.begin(), cols.end() - 1);
    const std::int64_t det = determinant(top);
    const bool unit = smith_normal_form(cols).diagonal == std::vector<std::int64_t>(static_cast<std::size_t>(n) - 1, 1);
    return std::pair{unit && (det == 1 || det == -1), "elimination determinant " + std::to_string(det)};
  });
  rec.check("modeldiffeo", "slide_round_trip", [&] {
    if (n == 1) return std::pair{decompose_in_slides({0}).empty(), std::string("Delta = 0 (n = 1)")};
    std::mt19937 rng(1000 + n);
    int bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<std::int64_t> b(static_cast<std::size_t>(n) - 1);
      for (auto& v : b) v = static_cast<std::int64_t>(rng() % 201) - 100;
      TwistVector a(static_cast<std::size_t>(n), 0);
      for (int i = 1; i < n; ++i) {
        const TwistVector q = slide_vector(i, n);
        for (int r = 0; r < n; ++r) a[r] += b[i - 1] * q[r];
      }
      bad += decompose_in_slides(a) != b;
    }
    return std::pair{bad == 0, std::to_string(1000 - bad) + "/1000 exact"};
  });
  rec.check("modeldiffeo", "flow_equals_slides", [&] {
    GridDiffeo all = GridDiffeo::identity(res);
    for (int i = 0; i < n; ++i) all = special_slide(i, fx, res).after(all);
    const ShiftField sigma = slide_shift(fx, res);
    const double d = flow_shift(Flow::M, sigma).distance(all);
    const double d1 = flow_shift(Flow::M, sigma.plus(1.0)).distance(all);
    return std::pair{std::max(d, d1) <= 1e-12, "|M_sigma - prod s_i| = " + fmt(d) + ", with sigma+1: " + fmt(d1)};
  });

  // Epimorphisms.
  const OrbitFamily orbit = fixture_orbit(fx, res);
  const Isotopy gamma = Isotopy::rotation(res, Flow::L, 1.0 / n);
  rec.check("epi", "eval_L", [&] {
    const auto e = eval(Isotopy::rotation(res, Flow::L, 1.0), orbit).displacement;
    return std::pair{e == n, "eval(L) = " + std::to_string(e)};
  });
  rec.check("epi", "eval_M", [&] {
    const auto e = eval(Isotopy::rotation(res, Flow::M, 1.0), orbit).displacement;
    return std::pair{e == 0, "eval(M) = " + std::to_string(e)};
  });
  rec.check("epi", "eval_gamma", [&] {
    const auto e = eval(gamma, orbit).displacement;
    return std::pair{e == 1, "eval(gamma) = " + std::to_string(e)};
  });
  rec.check("epi", "krot_gamma", [&] {
    const int k = krot(gamma.terminal(), orbit);
    return std::pair{k == 1 % n, "krot(gamma(1)) = " + std::to_string(k)};
  });
  rec.check("epi", "gamma_power_identity", [&] {
    const double d = gamma.terminal().power(n).distance(GridDiffeo::identity(res));
    return std::pair{d <= 1e-12, "max displacement of gamma(1)^n = " + fmt(d)};
  });
  rec.check("epi", "eval_slides", [&] {
    bool ok = true;
    for (int i = 0; i < n; ++i) ok = ok && eval(Isotopy::flow(Flow::M, slide_shift(fx, res, i)), orbit).displacement == 0;
    return std::pair{ok, "slide isotopies have eval 0"};
  });
  rec.check("epi", "krot_eval_compatible", [&] {
    std::mt19937 rng(7 + n);
    int good = 0;
    std::string first_bad;
    for (int trial = 0; trial < random_isotopies; ++trial) {
      Isotopy omega(res);
      const int pieces = 1 + static_cast<int>(rng() % 3);
      for (int p = 0; p < pieces; ++p) {
        switch (rng() % 3) {
          case 0: omega = omega.then(Isotopy::rotation(res, Flow::L, (static_cast<int>(rng() % 7) - 3) / double(n))); break;
          case 1: omega = omega.then(Isotopy::rotation(res, Flow::M, rng() % 2 ? 1.0 : -1.0)); break;
          default: omega = omega.then(Isotopy::flow(Flow::M, slide_shift(fx, res, static_cast<int>(rng() % n))));
        }
      }
      const std::int64_t e = eval(omega, orbit).displacement;
      const int k = krot(omega.terminal(), orbit);
      if (k == ((e % n) + n) % n)
        ++good;
      else if (first_bad.empty())
        first_bad = ", trial " + std::to_string(trial) + ": eval " + std::to_string(e) + " krot " + std::to_string(k);
    }
    return std::pair{good == random_isotopies,
                     std::to_string(good) + "/" + std::to_string(random_isotopies) + " isotopies" + first_bad};
  });
  rec.check("epi", "eval_additive", [&] {
    const Isotopy a = Isotopy::rotation(res, Flow::L, 2.0 / n);
    const Isotopy b = Isotopy::flow(Flow::M, slide_shift(fx, res)).then(Isotopy::rotation(res, Flow::L, -1.0 / n));
    const auto ea = eval(a, orbit).displacement, eb = eval(b, orbit).displacement;
    const auto eab = eval(a.then(b), orbit).displacement;
    return std::pair{eab == ea + eb, "eval(ab) = " + std::to_string(eab) + " = " + std::to_string(ea) + " + " +
                                         std::to_string(eb)};
  });
  rec.check("epi", "krot_homomorphism", [&] {
    const GridDiffeo l2 = lambda.power(2);
    const int a = krot(l2, orbit), b = krot(slides[n - 1].after(lambda), orbit), ab = krot(l2.after(slides[n - 1].after(lambda)), orbit);
    return std::pair{ab == (a + b) % n, "krot(hg) = " + std::to_string(ab)};
  });

  // The quotient by the deck rotation.
  rec.check("covering", "quotient", [&] {
    const QuotientResult q = build_quotient(field, n);
    const bool ok = q.commutation_error <= 1e-9 && q.quotient_betti1 == 1 && q.quotient_cyclic_index == 1 &&
                    q.quotient_critical_count * static_cast<std::size_t>(n) == q.critical_count &&
                    (n == 1 || q.deck_min_shift > 0.0);
    return std::pair{ok, "commutation " + fmt(q.commutation_error) + ", quotient betti1 " +
                             std::to_string(q.quotient_betti1) + ", cyclic index " +
                             std::to_string(q.quotient_cyclic_index) + ", critical " +
                             std::to_string(q.critical_count) + " -> " + std::to_string(q.quotient_critical_count)};
  });
  return report;
}

std::string verify_report_json(const VerifyReport& report, int indent) {
  nlohmann::json doc;
  doc["schema"] = 1;
  doc["n"] = report.n;
  doc["resolution"] = report.resolution;
  doc["corrupt_slide"] = report.corrupt_slide;
  doc["passed"] = report.passed();
  auto& checks = doc["checks"] = nlohmann::json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"group", c.group}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return doc.dump(indent);
}

}  // namespace kreeb
