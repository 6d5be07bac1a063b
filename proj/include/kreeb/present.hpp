#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kreeb/smith.hpp"
#include "kreeb/wreath.hpp"

namespace kreeb {

struct Letter {
  int gen = 0;
  int exp = 1;  // +1 or -1
  friend bool operator==(const Letter&, const Letter&) = default;
};
using Word = std::vector<Letter>;

Word free_reduce(Word w);
Word inverse_word(const Word& w);
Word concat(const Word& a, const Word& b);
/// x y x^-1 y^-1
Word commutator(const Word& x, const Word& y);
Word letter_power(int gen, std::int64_t power);

/// P = Z^r / (row span of `rows`), with r = number of generators.
struct AbelianData {
  IntMatrix rows;
};

struct Presentation {
  std::vector<std::string> generators;
  std::vector<Word> relators;
  std::optional<AbelianData> abelian;

  int rank() const { return static_cast<int>(generators.size()); }
  int generator_index(std::string_view name) const;  // -1 when absent
};

/// Builds the abelian presentation: all commutators of generator pairs plus the rows.
Presentation abelian_presentation(std::vector<std::string> generators, IntMatrix rows = {});
/// Z^r on generators a, b, c, ... (g<k> past 26).
Presentation free_abelian_presentation(int rank);
/// Sets the abelian flag when every pair of generators has a commutator relator;
/// the remaining relators become matrix rows by exponent sums.
Presentation detect_abelian(Presentation p);

/// `gens: a, b` / `rels: a b a^-1 b^-1, ...`. Throws SyntaxError.
Presentation parse_presentation(std::string_view text);
Presentation load_presentation_file(const std::string& path);
std::string format_word(const Presentation& p, const Word& w);
Word parse_word(const Presentation& p, std::string_view text);
std::string presentation_to_text(const Presentation& p);
nlohmann::json presentation_to_json(const Presentation& p);
Presentation presentation_from_json(const nlohmann::json& j);

/// Abelian group Z^r / rows, elements canonical in Smith coordinates: the
/// coordinate vector w = v V is reduced modulo each invariant factor.
class AbelianQuotient {
 public:
  using Element = std::vector<std::int64_t>;

  explicit AbelianQuotient(const AbelianData& data, int rank);

  int rank() const { return rank_; }
  const std::vector<std::int64_t>& invariant_factors() const { return factors_; }
  /// Canonical element for a vector of generator exponents.
  Element from_exponents(const std::vector<std::int64_t>& v) const;
  /// Some exponent vector representing the element.
  std::vector<std::int64_t> to_exponents(const Element& e) const;

  Element identity() const { return Element(static_cast<std::size_t>(rank_), 0); }
  Element multiply(const Element& a, const Element& b) const;
  Element inverse(const Element& a) const;
  bool equal(const Element& a, const Element& b) const { return a == b; }
  std::string name() const;
  nlohmann::json encode(const Element& a) const { return a; }
  Element decode(const nlohmann::json& j) const { return reduce(j.get<Element>()); }

 private:
  Element reduce(Element w) const;

  int rank_;
  std::vector<std::int64_t> factors_;  // one per coordinate; 0 means free
  IntMatrix v_;
  IntMatrix v_inverse_;
};

/// Free rank and torsion coefficients (> 1) of the abelianization.
struct AbelianInvariants {
  int free_rank = 0;
  std::vector<std::int64_t> torsion;
};
AbelianInvariants abelianization(const Presentation& p);

/// Generators g_i for each generator g of P and i in Z_n, then t. Relators: the
/// P-relators in every copy, [g_i, h_j] for i != j, and t g_i t^-1 g_{i-1}^-1.
/// For n = 1 the copies keep the plain names of P.
Presentation wreath_presentation(const Presentation& p, int n);

struct Pi1Assembly {
  Presentation base;
  int n = 1;
  Presentation presentation;
  int t = 0;  // index of the translation generator
  std::vector<std::int64_t> eval_table;  // per generator
  std::vector<std::int64_t> krot_table;  // eval mod n
  bool direct_product = false;           // n = 1: P x Z
};

/// Throws InvalidIndex when n < 1.
Pi1Assembly assemble_pi1(const Presentation& p, int n);

std::int64_t eval_word(const Pi1Assembly& a, const Word& w);
std::int64_t krot_word(const Pi1Assembly& a, const Word& w);

using PresentedWreath = Wreath<AbelianQuotient>;
PresentedWreath wreath_of(const Pi1Assembly& a);

/// Collection into (alpha, k): reading g_i after t^k adds g to alpha(i - k mod n).
/// Throws NotAbelian unless P carries an abelian flag.
PresentedWreath::Element normal_form(const Pi1Assembly& a, const Word& w);
/// Word g_0^{..} g_1^{..} ... t^k for an element.
Word to_word(const Pi1Assembly& a, const PresentedWreath::Element& e);
/// True iff w commutes with every generator.
bool center_check(const Pi1Assembly& a, const Word& w);

nlohmann::json assembly_to_json(const Pi1Assembly& a);
std::string assembly_to_text(const Pi1Assembly& a);

}  // namespace kreeb
