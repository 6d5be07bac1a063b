#include "kreeb/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kreeb/covering.hpp"
#include "kreeb/decomp.hpp"
#include "kreeb/present.hpp"
#include "kreeb/reeb.hpp"

namespace kreeb {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax:
    case ErrorKind::Io:
    case ErrorKind::NotPeriodic:
    case ErrorKind::InvalidResolution: return kExitInput;
    case ErrorKind::DegenerateCritical: return kExitDegenerate;
    case ErrorKind::CriticalLevel:
    case ErrorKind::NoCrossing:
    case ErrorKind::MultipleCycles:
    case ErrorKind::NoCycle:
    case ErrorKind::Topology: return kExitTopology;
    case ErrorKind::NotInvariant: return kExitVerify;
    default: return kExitOther;
  }
}

std::string critical_points_json(const std::vector<CriticalPoint>& points, int indent) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : points)
    arr.push_back({{"x", p.location.x}, {"y", p.location.y}, {"value", p.value}, {"index", static_cast<int>(p.index)}});
  nlohmann::json doc;
  doc["schema"] = 1;
  doc["count"] = points.size();
  doc["points"] = std::move(arr);
  return doc.dump(indent);
}

namespace {

struct RunConfig {
  std::string expr;
  std::string input;
  int resolution = 0;  // 0: subcommand default
  std::optional<double> tol;
  std::string out_dir = ".";
};

GridField load_field(const RunConfig& cfg) {
  const int res = cfg.resolution > 0 ? cfg.resolution : 256;
  if (!cfg.expr.empty()) return sample_grid(parse_field_expr(cfg.expr), res);
  if (!cfg.input.empty()) return load_field_file(cfg.input, res);
  throw Error(ErrorKind::Io, "give the field with --expr or --input");
}

void write_text(const RunConfig& cfg, const std::string& name, const std::string& text, std::ostream& out) {
  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path path = std::filesystem::path(cfg.out_dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "wrote " << path.string() << '\n';
}

std::string with_newline(std::string s) { return s + '\n'; }

void add_field_options(CLI::App* cmd, RunConfig& cfg) {
  auto* e = cmd->add_option("--expr", cfg.expr, "field expression in x and y");
  auto* i = cmd->add_option("--input", cfg.input, "field file (expr: or grid: form)");
  e->excludes(i);
  cmd->add_option("-N,--resolution", cfg.resolution, "grid resolution, a power of two >= 64 (default 256)");
  cmd->add_option("--tol", cfg.tol, "relative value tolerance for block equivalence");
  cmd->add_option("--out", cfg.out_dir, "output directory (default .)");
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  const GridField f = load_field(cfg);
  const auto crit = find_critical_points(f);
  const ReebGraph reeb = build_reeb_graph(f, crit);
  const auto cycle = find_cycle(reeb);
  int counts[3] = {0, 0, 0};
  for (const auto& p : crit) counts[static_cast<int>(p.index)]++;
  out << "critical points: " << crit.size() << " (" << counts[0] << " minima, " << counts[1] << " saddles, "
      << counts[2] << " maxima)\n";
  out << "reeb graph: " << reeb.vertices.size() << " vertices, " << reeb.edges.size() << " edges, betti1 "
      << reeb.betti1 << '\n';
  write_text(cfg, "critical_points.json", with_newline(critical_points_json(crit)), out);
  write_text(cfg, "reeb.json", with_newline(reeb_to_json(reeb, cycle)), out);
  write_text(cfg, "reeb.svg", render_reeb_svg(reeb, cycle), out);
  return kExitOk;
}

int cmd_render(const RunConfig& cfg, std::ostream& out) {
  const GridField f = load_field(cfg);
  const ReebGraph reeb = build_reeb_graph(f);
  write_text(cfg, "reeb.svg", render_reeb_svg(reeb, find_cycle(reeb)), out);
  return kExitOk;
}

int cmd_decompose(const RunConfig& cfg, std::optional<double> level, int curve, std::ostream& out) {
  const GridField f = load_field(cfg);
  const CyclicBlockWord w = decompose(f, level, cfg.tol);
  out << "cut level " << w.level << ": " << w.m << " curves, word";
  for (int l : w.word) out << ' ' << l;
  out << ", cyclic index " << w.cyclic_index << '\n';
  write_text(cfg, "decomposition.json", with_newline(decomposition_to_json(w, curve)), out);
  return kExitOk;
}

int cmd_pi1(const RunConfig& cfg, const std::string& base_path, std::optional<int> rank, std::ostream& out) {
  const GridField f = load_field(cfg);
  const CyclicBlockWord w = decompose(f, std::nullopt, cfg.tol);
  const Presentation base = !base_path.empty() ? load_presentation_file(base_path) : free_abelian_presentation(rank.value_or(1));
  const Pi1Assembly a = assemble_pi1(base, w.cyclic_index);
  nlohmann::json doc = assembly_to_json(a);
  doc["cyclic_index"] = w.cyclic_index;
  doc["block_word"] = w.word;
  const std::string text = assembly_to_text(a);
  out << text;
  write_text(cfg, "pi1.json", with_newline(doc.dump(2)), out);
  write_text(cfg, "pi1.txt", text, out);
  return kExitOk;
}

int cmd_quotient(const RunConfig& cfg, std::optional<int> degree, std::ostream& out) {
  const GridField f = load_field(cfg);
  const int n = degree ? *degree : decompose(f, std::nullopt, cfg.tol).cyclic_index;
  const QuotientResult q = build_quotient(f, n);
  out << "quotient by Z_" << n << ": commutation error " << q.commutation_error << ", critical points "
      << q.critical_count << " -> " << q.quotient_critical_count << ", betti1 " << q.quotient_betti1;
  if (q.quotient_cyclic_index > 0) out << ", cyclic index " << q.quotient_cyclic_index;
  out << '\n';
  std::ostringstream field_text;
  write_field(field_text, q.field);
  write_text(cfg, "quotient.field", field_text.str(), out);
  write_text(cfg, "quotient.json", with_newline(quotient_report_json(q)), out);
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, int n, bool corrupt, std::ostream& out) {
  const VerifyReport r = run_verification(n, cfg.resolution > 0 ? cfg.resolution : 512, corrupt);
  for (const auto& c : r.checks)
    out << (c.passed ? "PASS " : "FAIL ") << c.group << '/' << c.name << ": " << c.detail << '\n';
  write_text(cfg, "verify.json", with_newline(verify_report_json(r)), out);
  std::ostringstream bin;
  write_diffeos(bin, r.slides);
  write_text(cfg, "slides.kdf", bin.str(), out);
  out << (r.passed() ? "all checks passed\n" : "verification FAILED\n");
  return r.passed() ? kExitOk : kExitVerify;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kronrod-Reeb graphs, cyclic index and orbit groups of functions on the torus", "kreeb"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* analyze = app.add_subcommand("analyze", "critical points and the Kronrod-Reeb graph");
  add_field_options(analyze, cfg);

  auto* render = app.add_subcommand("render", "SVG drawing of the Kronrod-Reeb graph");
  add_field_options(render, cfg);

  std::optional<double> level;
  int curve = 0;
  auto* decomp = app.add_subcommand("decompose", "cut along a level and compute the cyclic index");
  add_field_options(decomp, cfg);
  decomp->add_option("--level", level, "cut level (default: a regular level on the cycle)");
  decomp->add_option("--curve", curve, "cut curve whose orbit is reported");

  std::string base_path;
  std::optional<int> rank;
  auto* pi1 = app.add_subcommand("pi1", "presentation of the fundamental group of the orbit");
  add_field_options(pi1, cfg);
  auto* bp = pi1->add_option("--base-presentation", base_path, "presentation of the block group (text or JSON)");
  pi1->add_option("--assume-abelian-rank", rank, "use Z^r as the block group (default r = 1)")->excludes(bp);

  std::optional<int> degree;
  auto* quot = app.add_subcommand("quotient", "quotient by the deck rotation x -> x + 1/n");
  add_field_options(quot, cfg);
  quot->add_option("--degree", degree, "covering degree (default: the cyclic index)");

  int fixture_n = 3;
  bool corrupt = false;
  auto* verify = app.add_subcommand("verify", "checks on the flat-collar fixture");
  verify->add_option("--fixture-n", fixture_n, "cyclic index of the fixture (default 3)")->check(CLI::PositiveNumber);
  verify->add_option("-N,--resolution", cfg.resolution, "grid resolution (default 512)");
  verify->add_option("--out", cfg.out_dir, "output directory (default .)");
  verify->add_flag("--corrupt-slide", corrupt, "move the first slide off its collar (negative control)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*analyze) return cmd_analyze(cfg, out);
    if (*render) return cmd_render(cfg, out);
    if (*decomp) return cmd_decompose(cfg, level, curve, out);
    if (*pi1) return cmd_pi1(cfg, base_path, rank, out);
    if (*quot) return cmd_quotient(cfg, degree, out);
    if (*verify) return cmd_verify(cfg, fixture_n, corrupt, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed JSON: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace kreeb
