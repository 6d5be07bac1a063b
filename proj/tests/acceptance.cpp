// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "kreeb/cli.hpp"
#include "kreeb/covering.hpp"
#include "kreeb/decomp.hpp"
#include "kreeb/present.hpp"
#include "kreeb/reeb.hpp"
#include "kreeb/wreath.hpp"

using namespace kreeb;

namespace {

std::string family_expr(int n) { return "cos(" + std::to_string(2 * n) + "*pi*x)+0.5*cos(2*pi*y)"; }

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (passed) detail << "first failure: " << what << "; ";
    passed = false;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void criterion(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("unexpected error: ") + e.what());
  }
  const double dt = seconds_since(t0);
  if (!o.passed) ++failures;
  std::printf("criterion %d: %s - %s (%s%.2f s)\n", id, o.passed ? "PASS" : "FAIL", title.c_str(), o.detail.str().c_str(),
              dt);
  std::fflush(stdout);
}

// ---- criterion 4 helpers ---------------------------------------------------

/// Every alpha in carrier^n, in odometer order.
template <class E>
std::vector<std::vector<E>> all_alphas(const std::vector<E>& carrier, int n) {
  std::vector<std::vector<E>> out;
  std::vector<std::size_t> digits(static_cast<std::size_t>(n), 0);
  while (true) {
    std::vector<E> alpha;
    for (std::size_t d : digits) alpha.push_back(carrier[d]);
    out.push_back(std::move(alpha));
    std::size_t pos = 0;
    while (pos < digits.size() && ++digits[pos] == carrier.size()) digits[pos++] = 0;
    if (pos == digits.size()) break;
  }
  return out;
}

/// Group axioms for G wr_n Z on alpha in G^n, k in [-3, 3].
///
/// Identity and inverses are checked element by element. Associativity is
/// checked through the finite quotient (alpha, k mod n): its multiplication
/// table is read off Wreath::mul, every product of window elements (and of
/// window elements with products of two window elements) is confirmed to agree
/// with the table on alpha and to add on k, and then the table is checked for
/// associativity on all triples.
template <class G>
void wreath_axioms(const G& g, int n, Outcome& o, std::size_t& triples) {
  const Wreath<G> w(g, n);
  const auto carrier = g.elements();
  const auto alphas = all_alphas(carrier, n);
  std::map<std::vector<typename G::Element>, std::size_t> alpha_index;
  for (std::size_t i = 0; i < alphas.size(); ++i) alpha_index[alphas[i]] = i;
  const std::size_t size = alphas.size() * static_cast<std::size_t>(n);
  auto residue = [&](const typename Wreath<G>::Element& e) {
    return alpha_index.at(e.alpha) * static_cast<std::size_t>(n) + static_cast<std::size_t>(mod_index(e.k, n));
  };

  std::vector<typename Wreath<G>::Element> window, wide;
  std::vector<std::size_t> window_res, wide_res;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    for (int k = -3; k <= 3; ++k) {
      window.push_back(w.make(alphas[i], k));
      window_res.push_back(i * static_cast<std::size_t>(n) + static_cast<std::size_t>(mod_index(k, n)));
    }
    for (int k = -6; k <= 6; ++k) {
      wide.push_back(w.make(alphas[i], k));
      wide_res.push_back(i * static_cast<std::size_t>(n) + static_cast<std::size_t>(mod_index(k, n)));
    }
  }

  const std::string ctx = g.name() + " wr_" + std::to_string(n) + " Z";
  for (const auto& a : window) {
    o.require(w.equal(w.mul(a, w.identity()), a) && w.equal(w.mul(w.identity(), a), a), ctx + ": identity");
    o.require(w.equal(w.mul(a, w.inv(a)), w.identity()) && w.equal(w.mul(w.inv(a), a), w.identity()), ctx + ": inverse");
  }

  // Residue table from representatives with k in [0, n).
  std::vector<std::size_t> table(size * size);
  for (std::size_t x = 0; x < size; ++x)
    for (std::size_t y = 0; y < size; ++y) {
      const auto a = w.make(alphas[x / n], static_cast<std::int64_t>(x % n));
      const auto b = w.make(alphas[y / n], static_cast<std::int64_t>(y % n));
      table[x * size + y] = residue(w.mul(a, b));
    }

  // Products that occur in ((ab)c) and (a(bc)) for window a, b, c.
  bool consistent = true;
  auto agree = [&](const auto& a, std::size_t ra, const auto& b, std::size_t rb) {
    const auto ab = w.mul(a, b);
    const std::size_t expect = table[ra * size + rb];
    consistent = consistent && ab.k == a.k + b.k && mod_index(ab.k, n) == static_cast<int>(expect % n);
    const auto& alpha = alphas[expect / n];
    for (int i = 0; i < n && consistent; ++i)
      consistent = g.equal(ab.alpha[static_cast<std::size_t>(i)], alpha[static_cast<std::size_t>(i)]);
  };
  for (std::size_t x = 0; x < wide.size(); ++x)
    for (std::size_t y = 0; y < window.size(); ++y) {
      agree(wide[x], wide_res[x], window[y], window_res[y]);
      agree(window[y], window_res[y], wide[x], wide_res[x]);
    }
  o.require(consistent, ctx + ": multiplication does not factor through k mod n");

  bool assoc = true;
  for (std::size_t x = 0; x < size && assoc; ++x)
    for (std::size_t y = 0; y < size; ++y) {
      const std::size_t xy = table[x * size + y];
      for (std::size_t z = 0; z < size; ++z)
        assoc = assoc && table[xy * size + z] == table[x * size + table[y * size + z]];
    }
  o.require(assoc, ctx + ": associativity");
  triples += window.size() * window.size() * window.size();
}

template <class G>
void exact_sequence(const G& g, int n, std::mt19937& rng, Outcome& o) {
  const Wreath<G> w(g, n);
  const auto carrier = g.elements();
  auto random_alpha = [&] {
    std::vector<typename G::Element> alpha;
    for (int i = 0; i < n; ++i) alpha.push_back(carrier[rng() % carrier.size()]);
    return alpha;
  };
  for (int trial = 0; trial < 1000; ++trial) {
    const auto alpha = random_alpha();
    const auto a = w.make(alpha, static_cast<std::int64_t>(rng() % 7) - 3);
    const bool in_kernel = w.projection(a) == 0;
    const bool in_image = w.equal(a, w.inclusion(a.alpha));
    o.require(in_kernel == in_image, "ker p = im zeta");
    o.require(w.projection(w.inclusion(alpha)) == 0, "p o zeta = 0");
    const auto beta = random_alpha();
    o.require(w.equal(w.inclusion(alpha), w.inclusion(beta)) == (alpha == beta), "zeta injective");
    const auto b = w.make(beta, static_cast<std::int64_t>(rng() % 7) - 3);
    o.require(w.projection(w.mul(a, b)) == a.k + b.k, "p homomorphism");
    o.require(w.projection(w.translation(a.k)) == a.k, "p onto");
  }
}

// ---- criterion 5 helpers ---------------------------------------------------

Word random_word(std::mt19937& rng, int rank, int length) {
  Word w;
  for (int i = 0; i < length; ++i) w.push_back({static_cast<int>(rng() % rank), rng() % 2 ? 1 : -1});
  return w;
}

}  // namespace

int main() {
  std::printf("acceptance run\n");

  criterion(1, "fixture family n = 1..4 at N = 256: 4n critical points, betti1 1, cyclic index n, < 10 s each",
            [](Outcome& o) {
              for (int n = 1; n <= 4; ++n) {
                const auto t0 = std::chrono::steady_clock::now();
                const GridField f = sample_grid(parse_field_expr(family_expr(n)), 256);
                const auto crit = find_critical_points(f);
                const ReebGraph reeb = build_reeb_graph(f, crit);
                const int idx = decompose(f).cyclic_index;
                const double dt = seconds_since(t0);
                o.detail << "n=" << n << ": " << crit.size() << " crit, betti1 " << reeb.betti1 << ", index " << idx
                         << ", " << static_cast<int>(dt * 1000) << " ms; ";
                const std::string tag = "n=" + std::to_string(n);
                o.require(crit.size() == static_cast<std::size_t>(4 * n), tag + " critical count");
                o.require(reeb.betti1 == 1, tag + " betti1");
                o.require(idx == n, tag + " cyclic index");
                o.require(dt < 10.0, tag + " runtime");
              }
            });

  std::map<int, VerifyReport> reports;
  criterion(2, "flat-collar fixtures n = 1..3: invariance, lambda^n = id, q(s_i) = e_{i-1} - e_i, slide basis, round trip",
            [&](Outcome& o) {
              for (int n = 1; n <= 3; ++n) {
                reports[n] = run_verification(n, 512, false, 20);
                const VerifyReport& r = reports[n];
                for (const auto& c : r.checks)
                  if (c.group == "modeldiffeo" || c.group == "fixture")
                    o.require(c.passed, "n=" + std::to_string(n) + " " + c.name + " (" + c.detail + ")");
                o.detail << "n=" << n << ": " << (r.group_passed("modeldiffeo") ? "ok" : "failed") << "; ";
              }
            });

  criterion(3, "epimorphisms at n = 3: eval(L) = 3, eval(M) = 0, eval(gamma) = 1, krot(gamma(1)) = 1, krot = eval mod 3 "
               "on 20 random isotopies",
            [&](Outcome& o) {
              if (!reports.count(3)) reports[3] = run_verification(3, 512, false, 20);
              for (const auto& c : reports[3].checks) {
                if (c.group != "epi") continue;
                o.require(c.passed, c.name + " (" + c.detail + ")");
                if (c.name == "eval_L" || c.name == "eval_M" || c.name == "eval_gamma" || c.name == "krot_gamma" ||
                    c.name == "krot_eval_compatible")
                  o.detail << c.detail << "; ";
              }
            });

  criterion(4, "wreath axioms for Z_2 and S_3, n = 1..3, k in [-3, 3]; exact sequence; n = 1 product form over Z_3; < 5 s",
            [](Outcome& o) {
              const auto t0 = std::chrono::steady_clock::now();
              std::size_t triples = 0;
              std::mt19937 rng(4);
              for (int n = 1; n <= 3; ++n) {
                wreath_axioms(CyclicGroup(2), n, o, triples);
                wreath_axioms(PermutationGroup(3), n, o, triples);
                exact_sequence(CyclicGroup(2), n, rng, o);
                exact_sequence(PermutationGroup(3), n, rng, o);
              }
              const Wreath<CyclicGroup> w(CyclicGroup(3), 1);
              std::vector<Wreath<CyclicGroup>::Element> win;
              for (std::int64_t g : w.group().elements())
                for (int k = -3; k <= 3; ++k) win.push_back(w.make({g}, k));
              std::map<std::pair<std::int64_t, std::int64_t>, int> images;
              for (const auto& a : win) {
                const auto [g, k] = w.to_product(a);
                images[{g, k}]++;
                o.require(w.equal(w.from_product(g, k), a), "n=1 round trip");
                for (const auto& b : win) {
                  const auto [h, l] = w.to_product(b);
                  const auto [gh, kl] = w.to_product(w.mul(a, b));
                  o.require(gh == w.group().multiply(g, h) && kl == k + l, "n=1 product homomorphism");
                }
              }
              o.require(images.size() == win.size(), "n=1 product map injective");
              const double dt = seconds_since(t0);
              o.require(dt < 5.0, "runtime");
              o.detail << triples << " window triples via residue tables, 6000 exact-sequence samples; ";
            });

  criterion(5, "presentation layer, P = Z, n = 2: normal_form homomorphism on 1000 pairs, eval/krot tables, center_check",
            [](Outcome& o) {
              const Pi1Assembly a = assemble_pi1(free_abelian_presentation(1), 2);
              const PresentedWreath wr = wreath_of(a);
              std::mt19937 rng(5);
              for (int trial = 0; trial < 1000; ++trial) {
                const Word u = random_word(rng, a.presentation.rank(), 1 + static_cast<int>(rng() % 16));
                const Word v = random_word(rng, a.presentation.rank(), 1 + static_cast<int>(rng() % 16));
                o.require(wr.equal(normal_form(a, concat(u, v)), wr.mul(normal_form(a, u), normal_form(a, v))),
                          "normal form of a product");
              }
              for (int gen = 0; gen < a.presentation.rank(); ++gen) {
                const std::int64_t expect = gen == a.t ? 1 : 0;
                o.require(a.eval_table[static_cast<std::size_t>(gen)] == expect, "eval table");
                o.require(a.krot_table[static_cast<std::size_t>(gen)] == expect % a.n, "krot table");
              }
              // The centre is {constant alpha, k = 0 mod n}; on the k = 0 slice this
              // is exactly the constant-alpha elements.
              int accepted = 0, constant_slice = 0, mismatches = 0, slice_mismatches = 0;
              for (int x = -2; x <= 2; ++x)
                for (int y = -2; y <= 2; ++y)
                  for (int k = -3; k <= 3; ++k) {
                    const bool central = center_check(a, to_word(a, wr.make({{x}, {y}}, k)));
                    accepted += central;
                    mismatches += central != (x == y && k % 2 == 0);
                    if (k == 0) {
                      constant_slice += central;
                      slice_mismatches += central != (x == y);
                    }
                  }
              o.require(mismatches == 0, "center_check differs from {constant alpha, k even}");
              o.require(slice_mismatches == 0, "center_check on k = 0 differs from constant alpha");
              o.detail << "1000 pairs; centre window 175 elements, " << accepted
                       << " accepted (constant alpha, k even); k = 0 slice accepts exactly the " << constant_slice
                       << " constant-alpha elements; ";
            });

  criterion(6, "covering n = 2..4: commutation <= 1e-9, quotient betti1 1, cyclic index 1, critical count divisible by n",
            [](Outcome& o) {
              for (int n = 2; n <= 4; ++n) {
                const QuotientResult q = build_quotient(sample_grid(parse_field_expr(family_expr(n)), 256), n);
                const std::string tag = "n=" + std::to_string(n);
                o.require(q.commutation_error <= 1e-9, tag + " commutation");
                o.require(q.quotient_betti1 == 1, tag + " betti1");
                o.require(q.quotient_cyclic_index == 1, tag + " cyclic index");
                o.require(q.quotient_critical_count * static_cast<std::size_t>(n) == q.critical_count, tag + " divisibility");
                o.detail << tag << ": " << q.critical_count << " -> " << q.quotient_critical_count << ", err "
                         << q.commutation_error << "; ";
              }
            });

  criterion(7, "negative controls: tree pi1 exits NoCycle, corrupted slide breaks invariance, non-periodic input rejected",
            [](Outcome& o) {
              const auto dir = std::filesystem::temp_directory_path() / "kreeb_acceptance";
              std::filesystem::remove_all(dir);
              std::ostringstream out, err;
              const int tree = run_cli({"pi1", "--expr", "cos(2*pi*x)*cos(2*pi*y)", "--out", dir.string()}, out, err);
              o.require(tree == kExitTopology && err.str().find("NoCycle") != std::string::npos, "tree pi1");
              o.detail << "tree pi1 exit " << tree << "; ";

              const VerifyReport bad = run_verification(2, 512, true, 1);
              bool invariance_failed = false;
              for (const auto& c : bad.checks)
                if (c.name == "slide_invariance") {
                  invariance_failed = !c.passed;
                  o.detail << "corrupted slide " << c.detail << "; ";
                }
              o.require(invariance_failed && !bad.passed(), "corrupted slide");

              std::ostringstream out2, err2;
              const int np = run_cli({"analyze", "--expr", "cos(x)+cos(2*pi*y)", "--out", dir.string()}, out2, err2);
              o.require(np == kExitInput && err2.str().find("NotPeriodic") != std::string::npos, "non-periodic input");
              o.detail << "cos(x) exit " << np << "; ";
              std::filesystem::remove_all(dir);
            });

  std::printf("%s\n", failures == 0 ? "all criteria passed" : (std::to_string(failures) + " criteria failed").c_str());
  return failures == 0 ? 0 : 1;
}
