#include "kreeb/present.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "kreeb/error.hpp"

namespace kreeb {

Word free_reduce(Word w) {
  Word out;
  for (const Letter& l : w) {
    if (!out.empty() && out.back().gen == l.gen && out.back().exp == -l.exp) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return out;
}

Word inverse_word(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (auto& l : out) l.exp = -l.exp;
  return out;
}

Word concat(const Word& a, const Word& b) {
  Word out(a);
  out.insert(out.end(), b.begin(), b.end());
  return free_reduce(std::move(out));
}

Word commutator(const Word& x, const Word& y) { return concat(concat(x, y), concat(inverse_word(x), inverse_word(y))); }

Word letter_power(int gen, std::int64_t power) {
  Word w;
  for (std::int64_t k = 0; k < std::abs(power); ++k) w.push_back({gen, power > 0 ? 1 : -1});
  return w;
}

int Presentation::generator_index(std::string_view name) const {
  for (std::size_t k = 0; k < generators.size(); ++k)
    if (generators[k] == name) return static_cast<int>(k);
  return -1;
}

namespace {

std::vector<std::int64_t> exponent_sums(const Word& w, int rank) {
  std::vector<std::int64_t> v(static_cast<std::size_t>(rank), 0);
  for (const Letter& l : w) v[static_cast<std::size_t>(l.gen)] += l.exp;
  return v;
}

Word row_word(const std::vector<std::int64_t>& row) {
  Word w;
  for (std::size_t g = 0; g < row.size(); ++g) {
    const Word part = letter_power(static_cast<int>(g), row[g]);
    w.insert(w.end(), part.begin(), part.end());
  }
  return w;
}

// The generator pair when w is a cyclic rotation of [x, y]^{+-1}.
std::optional<std::pair<int, int>> commutator_pair(const Word& w) {
  if (w.size() != 4) return std::nullopt;
  for (std::size_t r = 0; r < 4; ++r) {
    const Letter a = w[r], b = w[(r + 1) % 4], c = w[(r + 2) % 4], d = w[(r + 3) % 4];
    if (a.gen != b.gen && a.gen == c.gen && b.gen == d.gen && a.exp == -c.exp && b.exp == -d.exp)
      return std::make_pair(std::min(a.gen, b.gen), std::max(a.gen, b.gen));
  }
  return std::nullopt;
}

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string_view::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(a, b - a + 1));
}

// Comma-separated items with their byte offsets in `text`.
std::vector<std::pair<std::string, std::size_t>> split_items(std::string_view text, std::size_t base) {
  std::vector<std::pair<std::string, std::size_t>> items;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    const std::string_view raw = text.substr(start, end - start);
    const auto lead = raw.find_first_not_of(" \t\r");
    if (lead != std::string_view::npos) items.emplace_back(trim(raw), base + start + lead);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

Word parse_word_at(const Presentation& p, std::string_view text, std::size_t base) {
  Word w;
  std::size_t i = 0;
  const auto skip = [&] {
    while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == '*')) ++i;
  };
  skip();
  if (trim(text) == "1") return w;
  while (i < text.size()) {
    if (!is_name_start(text[i])) throw SyntaxError(base + i, "expected a generator name");
    const std::size_t s = i;
    while (i < text.size() && is_name_char(text[i])) ++i;
    const std::string name(text.substr(s, i - s));
    const int gen = p.generator_index(name);
    if (gen < 0) throw SyntaxError(base + s, "unknown generator '" + name + "'");
    std::int64_t power = 1;
    if (i < text.size() && text[i] == '^') {
      ++i;
      const char* first = text.data() + i;
      const auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), power);
      if (ec != std::errc() || ptr == first) throw SyntaxError(base + i, "expected an integer exponent");
      i += static_cast<std::size_t>(ptr - first);
    }
    const Word part = letter_power(gen, power);
    w.insert(w.end(), part.begin(), part.end());
    skip();
  }
  return free_reduce(std::move(w));
}

}  // namespace

Presentation abelian_presentation(std::vector<std::string> generators, IntMatrix rows) {
  Presentation p;
  p.generators = std::move(generators);
  const int r = p.rank();
  for (int a = 0; a < r; ++a)
    for (int b = a + 1; b < r; ++b) p.relators.push_back(commutator({{a, 1}}, {{b, 1}}));
  for (auto& row : rows) {
    if (static_cast<int>(row.size()) != r) throw Error(ErrorKind::Domain, "relation row has the wrong length");
    const Word w = row_word(row);
    if (!w.empty()) p.relators.push_back(w);
  }
  p.abelian = AbelianData{std::move(rows)};
  return p;
}

Presentation free_abelian_presentation(int rank) {
  std::vector<std::string> names;
  for (int k = 0; k < rank; ++k) names.push_back(k < 26 ? std::string(1, static_cast<char>('a' + k)) : "g" + std::to_string(k));
  return abelian_presentation(std::move(names));
}

Presentation detect_abelian(Presentation p) {
  const int r = p.rank();
  std::set<std::pair<int, int>> pairs;
  IntMatrix rows;
  for (const Word& w : p.relators) {
    if (auto pr = commutator_pair(w)) {
      pairs.insert(*pr);
    } else {
      rows.push_back(exponent_sums(w, r));
    }
  }
  if (static_cast<int>(pairs.size()) == r * (r - 1) / 2) p.abelian = AbelianData{std::move(rows)};
  return p;
}

Word parse_word(const Presentation& p, std::string_view text) { return parse_word_at(p, text, 0); }

Presentation parse_presentation(std::string_view text) {
  Presentation p;
  bool have_gens = false;
  std::vector<std::pair<std::string, std::size_t>> pending;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    const std::size_t colon = line.find(':');
    const std::string key = trim(line.substr(0, colon == std::string_view::npos ? line.size() : colon));
    if (!key.empty() && key[0] != '#') {
      if (colon == std::string_view::npos) throw SyntaxError(pos, "expected 'gens:' or 'rels:'");
      const std::string_view rest = line.substr(colon + 1);
      if (key == "gens") {
        for (auto& [name, at] : split_items(rest, pos + colon + 1)) {
          if (!is_name_start(name[0]) || !std::all_of(name.begin(), name.end(), is_name_char))
            throw SyntaxError(at, "bad generator name '" + name + "'");
          if (p.generator_index(name) >= 0) throw SyntaxError(at, "duplicate generator '" + name + "'");
          p.generators.push_back(name);
        }
        have_gens = true;
      } else if (key == "rels") {
        for (auto& item : split_items(rest, pos + colon + 1)) pending.push_back(item);
      } else {
        throw SyntaxError(pos, "unknown section '" + key + "'");
      }
    }
    if (eol == text.size()) break;
    pos = eol + 1;
  }
  if (!have_gens) throw SyntaxError(text.size(), "missing 'gens:' line");
  for (const auto& [item, at] : pending) {
    Word w = parse_word_at(p, item, at);
    if (!w.empty()) p.relators.push_back(std::move(w));
  }
  return detect_abelian(std::move(p));
}

Presentation load_presentation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open presentation file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return presentation_from_json(nlohmann::json::parse(text));
  return parse_presentation(text);
}

std::string format_word(const Presentation& p, const Word& w) {
  if (w.empty()) return "1";
  std::string out;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (k) out += ' ';
    out += p.generators.at(static_cast<std::size_t>(w[k].gen));
    if (w[k].exp < 0) out += "^-1";
  }
  return out;
}

std::string presentation_to_text(const Presentation& p) {
  std::string out = "gens: ";
  for (std::size_t k = 0; k < p.generators.size(); ++k) out += (k ? ", " : "") + p.generators[k];
  out += "\nrels: ";
  for (std::size_t k = 0; k < p.relators.size(); ++k) out += (k ? ", " : "") + format_word(p, p.relators[k]);
  out += '\n';
  return out;
}

nlohmann::json presentation_to_json(const Presentation& p) {
  nlohmann::json j;
  j["generators"] = p.generators;
  auto& rels = j["relators"] = nlohmann::json::array();
  for (const Word& w : p.relators) rels.push_back(format_word(p, w));
  if (p.abelian) j["abelian"] = {{"rows", p.abelian->rows}};
  return j;
}

Presentation presentation_from_json(const nlohmann::json& j) {
  Presentation p;
  p.generators = j.at("generators").get<std::vector<std::string>>();
  for (const auto& r : j.value("relators", nlohmann::json::array())) {
    Word w = parse_word(p, r.get<std::string>());
    if (!w.empty()) p.relators.push_back(std::move(w));
  }
  return detect_abelian(std::move(p));
}

AbelianQuotient::AbelianQuotient(const AbelianData& data, int rank) : rank_(rank) {
  const SmithForm s = smith_normal_form(data.rows, rank);
  factors_.assign(static_cast<std::size_t>(rank), 0);
  for (std::size_t i = 0; i < s.diagonal.size(); ++i) factors_[i] = s.diagonal[i];
  v_ = s.v;
  v_inverse_ = s.v_inverse;
}

AbelianQuotient::Element AbelianQuotient::reduce(Element w) const {
  for (std::size_t i = 0; i < w.size(); ++i) {
    const std::int64_t d = factors_[i];
    if (d != 0) w[i] = ((w[i] % d) + d) % d;
  }
  return w;
}

AbelianQuotient::Element AbelianQuotient::from_exponents(const std::vector<std::int64_t>& v) const {
  if (static_cast<int>(v.size()) != rank_) throw Error(ErrorKind::Domain, "exponent vector has the wrong rank");
  Element w(static_cast<std::size_t>(rank_), 0);
  for (int j = 0; j < rank_; ++j)
    for (int i = 0; i < rank_; ++i) w[j] += v[i] * v_[i][j];
  return reduce(std::move(w));
}

std::vector<std::int64_t> AbelianQuotient::to_exponents(const Element& e) const {
  std::vector<std::int64_t> v(static_cast<std::size_t>(rank_), 0);
  for (int j = 0; j < rank_; ++j)
    for (int i = 0; i < rank_; ++i) v[j] += e[i] * v_inverse_[i][j];
  return v;
}

AbelianQuotient::Element AbelianQuotient::multiply(const Element& a, const Element& b) const {
  Element c(a);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
  return reduce(std::move(c));
}

AbelianQuotient::Element AbelianQuotient::inverse(const Element& a) const {
  Element c(a);
  for (auto& x : c) x = -x;
  return reduce(std::move(c));
}

std::string AbelianQuotient::name() const {
  std::string s = "Zab(";
  for (std::size_t i = 0; i < factors_.size(); ++i) s += (i ? "," : "") + std::to_string(factors_[i]);
  return s + ")";
}

AbelianInvariants abelianization(const Presentation& p) {
  IntMatrix rows;
  for (const Word& w : p.relators) rows.push_back(exponent_sums(w, p.rank()));
  const SmithForm s = smith_normal_form(rows, p.rank());
  AbelianInvariants inv;
  inv.free_rank = p.rank() - s.rank;
  for (std::int64_t d : s.diagonal)
    if (d > 1) inv.torsion.push_back(d);
  return inv;
}

Presentation wreath_presentation(const Presentation& p, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidIndex, "cyclic index must be at least 1");
  const int r = p.rank();
  Presentation w;
  auto copy = [&](int g, int i) { return i * r + g; };
  for (int i = 0; i < n; ++i)
    for (int g = 0; g < r; ++g) w.generators.push_back(n == 1 ? p.generators[g] : p.generators[g] + "_" + std::to_string(i));
  std::string tname = "t";
  while (w.generator_index(tname) >= 0) tname += "'";
  const int t = static_cast<int>(w.generators.size());
  w.generators.push_back(tname);

  for (int i = 0; i < n; ++i)
    for (const Word& rel : p.relators) {
      Word moved = rel;
      for (auto& l : moved) l.gen = copy(l.gen, i);
      w.relators.push_back(moved);
    }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int g = 0; g < r; ++g)
        for (int h = 0; h < r; ++h) w.relators.push_back(commutator({{copy(g, i), 1}}, {{copy(h, j), 1}}));
  for (int i = 0; i < n; ++i)
    for (int g = 0; g < r; ++g) {
      const int prev = (i + n - 1) % n;
      w.relators.push_back(free_reduce({{t, 1}, {copy(g, i), 1}, {t, -1}, {copy(g, prev), -1}}));
    }
  return w;
}

Pi1Assembly assemble_pi1(const Presentation& p, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidIndex, "cyclic index must be at least 1, got " + std::to_string(n));
  Pi1Assembly a;
  a.base = p;
  a.n = n;
  a.direct_product = n == 1;
  a.presentation = wreath_presentation(p, n);
  a.t = a.presentation.rank() - 1;
  a.eval_table.assign(static_cast<std::size_t>(a.presentation.rank()), 0);
  a.eval_table[static_cast<std::size_t>(a.t)] = 1;
  for (std::int64_t e : a.eval_table) a.krot_table.push_back(((e % n) + n) % n);
  return a;
}

std::int64_t eval_word(const Pi1Assembly& a, const Word& w) {
  std::int64_t total = 0;
  for (const Letter& l : w) total += l.exp * a.eval_table.at(static_cast<std::size_t>(l.gen));
  return total;
}

std::int64_t krot_word(const Pi1Assembly& a, const Word& w) {
  const std::int64_t e = eval_word(a, w);
  return ((e % a.n) + a.n) % a.n;
}

PresentedWreath wreath_of(const Pi1Assembly& a) {
  if (!a.base.abelian) throw Error(ErrorKind::NotAbelian, "the base group carries no abelian relation matrix");
  return PresentedWreath(AbelianQuotient(*a.base.abelian, a.base.rank()), a.n);
}

PresentedWreath::Element normal_form(const Pi1Assembly& a, const Word& w) {
  const PresentedWreath wr = wreath_of(a);
  const int r = a.base.rank(), n = a.n;
  std::vector<std::vector<std::int64_t>> alpha(static_cast<std::size_t>(n), std::vector<std::int64_t>(r, 0));
  std::int64_t k = 0;
  for (const Letter& l : w) {
    if (l.gen == a.t) {
      k += l.exp;
      continue;
    }
    const int i = l.gen / r, g = l.gen % r;
    alpha[static_cast<std::size_t>(mod_index(i - k, n))][static_cast<std::size_t>(g)] += l.exp;
  }
  std::vector<AbelianQuotient::Element> reduced;
  for (const auto& v : alpha) reduced.push_back(wr.group().from_exponents(v));
  return wr.make(std::move(reduced), k);
}

Word to_word(const Pi1Assembly& a, const PresentedWreath::Element& e) {
  const PresentedWreath wr = wreath_of(a);
  wr.check(e);
  const int r = a.base.rank();
  Word w;
  for (int i = 0; i < a.n; ++i) {
    const auto v = wr.group().to_exponents(e.alpha[static_cast<std::size_t>(i)]);
    for (int g = 0; g < r; ++g) {
      const Word part = letter_power(i * r + g, v[static_cast<std::size_t>(g)]);
      w.insert(w.end(), part.begin(), part.end());
    }
  }
  const Word tail = letter_power(a.t, e.k);
  w.insert(w.end(), tail.begin(), tail.end());
  return w;
}

bool center_check(const Pi1Assembly& a, const Word& w) {
  const PresentedWreath wr = wreath_of(a);
  for (int g = 0; g < a.presentation.rank(); ++g) {
    const Word gw{{g, 1}};
    if (!wr.equal(normal_form(a, concat(w, gw)), normal_form(a, concat(gw, w)))) return false;
  }
  return true;
}

nlohmann::json assembly_to_json(const Pi1Assembly& a) {
  nlohmann::json j;
  j["schema"] = 1;
  j["n"] = a.n;
  j["form"] = a.direct_product ? "direct_product" : "wreath";
  j["base"] = presentation_to_json(a.base);
  j["presentation"] = presentation_to_json(a.presentation);
  j["translation"] = a.presentation.generators[static_cast<std::size_t>(a.t)];
  nlohmann::json eval = nlohmann::json::object(), krot = nlohmann::json::object();
  for (int g = 0; g < a.presentation.rank(); ++g) {
    eval[a.presentation.generators[g]] = a.eval_table[g];
    krot[a.presentation.generators[g]] = a.krot_table[g];
  }
  j["eval"] = eval;
  j["krot"] = krot;
  return j;
}

std::string assembly_to_text(const Pi1Assembly& a) {
  std::ostringstream out;
  out << (a.direct_product ? "# P x Z (cyclic index 1)\n" : "# P wr_" + std::to_string(a.n) + " Z\n");
  out << presentation_to_text(a.presentation);
  out << "eval:";
  for (int g = 0; g < a.presentation.rank(); ++g) out << ' ' << a.presentation.generators[g] << '=' << a.eval_table[g];
  out << "\nkrot:";
  for (int g = 0; g < a.presentation.rank(); ++g) out << ' ' << a.presentation.generators[g] << '=' << a.krot_table[g];
  out << '\n';
  return out.str();
}

}  // namespace kreeb
