#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "kreeb/cli.hpp"
#include "kreeb/error.hpp"

using namespace kreeb;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

/// Fresh scratch directory under the system temp dir.
fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kreeb_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_CASE("exit code mapping") {
  CHECK(exit_code_for(ErrorKind::Syntax) == 1);
  CHECK(exit_code_for(ErrorKind::Io) == 1);
  CHECK(exit_code_for(ErrorKind::NotPeriodic) == 1);
  CHECK(exit_code_for(ErrorKind::InvalidResolution) == 1);
  CHECK(exit_code_for(ErrorKind::DegenerateCritical) == 2);
  CHECK(exit_code_for(ErrorKind::NoCycle) == 3);
  CHECK(exit_code_for(ErrorKind::MultipleCycles) == 3);
  CHECK(exit_code_for(ErrorKind::CriticalLevel) == 3);
  CHECK(exit_code_for(ErrorKind::NotInvariant) == 4);
  CHECK(exit_code_for(ErrorKind::NotAbelian) == 5);
}

TEST_CASE("analyze writes the reports") {
  const fs::path dir = scratch("analyze");
  const Run r = run({"analyze", "--expr", "cos(4*pi*x)+0.5*cos(2*pi*y)", "-N", "256", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto reeb = load_json(dir / "reeb.json");
  CHECK(reeb["schema"] == 1);
  CHECK(reeb["betti1"] == 1);
  CHECK(reeb.contains("cycle"));
  const auto crit = load_json(dir / "critical_points.json");
  CHECK(crit["schema"] == 1);
  CHECK(crit["count"] == 8);
  CHECK(crit["points"].size() == 8);
  CHECK(slurp(dir / "reeb.svg").rfind("<svg", 0) == 0);
}

TEST_CASE("analyze on a tree reports no cycle") {
  const fs::path dir = scratch("tree");
  const Run r = run({"analyze", "--expr", testing::tree_expr(), "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto reeb = load_json(dir / "reeb.json");
  CHECK(reeb["betti1"] == 0);
  CHECK_FALSE(reeb.contains("cycle"));
}

TEST_CASE("input errors exit with 1") {
  const fs::path dir = scratch("errors");
  const Run missing = run({"analyze", "--input", (dir / "absent.field").string(), "--out", dir.string()});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("absent.field") != std::string::npos);
  CHECK(run({"analyze", "--expr", "cos(x)", "--out", dir.string()}).code == 1);
  CHECK(run({"analyze", "--expr", "cos(2*pi*x", "--out", dir.string()}).code == 1);
  CHECK(run({"analyze", "--expr", "cos(2*pi*x)", "-N", "100", "--out", dir.string()}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"analyze", "--expr", "cos(2*pi*x)", "--input", "f", "--out", dir.string()}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("pi1 presentations") {
  const fs::path dir = scratch("pi1");
  const Run two = run({"pi1", "--expr", testing::family_expr(2), "--out", (dir / "two").string()});
  REQUIRE(two.code == 0);
  const auto doc = load_json(dir / "two" / "pi1.json");
  CHECK(doc["schema"] == 1);
  CHECK(doc["cyclic_index"] == 2);
  CHECK(two.out.find("gens: a_0, a_1, t") != std::string::npos);
  CHECK(two.out.find("t a_0 t^-1 a_1^-1") != std::string::npos);
  CHECK(slurp(dir / "two" / "pi1.txt").find("gens: a_0, a_1, t") != std::string::npos);

  const Run one = run({"pi1", "--expr", testing::family_expr(1), "--out", (dir / "one").string()});
  REQUIRE(one.code == 0);
  CHECK(one.out.find("gens: a, t") != std::string::npos);
  CHECK(one.out.find("t a t^-1 a^-1") != std::string::npos);

  const Run tree = run({"pi1", "--expr", testing::tree_expr(), "--out", (dir / "tree").string()});
  CHECK(tree.code == 3);
  CHECK(tree.err.find("NoCycle") != std::string::npos);
}

TEST_CASE("pi1 with a given base presentation") {
  const fs::path dir = scratch("pi1base");
  {
    std::ofstream f(dir / "p.txt");
    f << "gens: a, b\nrels: a b a^-1 b^-1\n";
  }
  const Run r = run({"pi1", "--expr", testing::family_expr(2), "--base-presentation", (dir / "p.txt").string(), "--out",
                     dir.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("gens: a_0, b_0, a_1, b_1, t") != std::string::npos);
  CHECK(run({"pi1", "--expr", testing::family_expr(2), "--base-presentation", "p", "--assume-abelian-rank", "2"}).code ==
        1);
}

TEST_CASE("decompose and quotient") {
  const fs::path dir = scratch("decomp");
  REQUIRE(run({"decompose", "--expr", testing::family_expr(3), "--out", dir.string()}).code == 0);
  const auto d = load_json(dir / "decomposition.json");
  CHECK(d["schema"] == 1);
  CHECK(d["cyclic_index"] == 3);

  REQUIRE(run({"quotient", "--expr", testing::family_expr(3), "--out", dir.string()}).code == 0);
  const auto q = load_json(dir / "quotient.json");
  CHECK(q["n"] == 3);
  CHECK(q["quotient_cyclic_index"] == 1);
  CHECK(q["commutation_error"].get<double>() <= 1e-9);

  // The quotient field file feeds back into the pipeline.
  const fs::path back = dir / "back";
  REQUIRE(run({"analyze", "--input", (dir / "quotient.field").string(), "--out", back.string()}).code == 0);
  CHECK(load_json(back / "critical_points.json")["count"] == 4);

  CHECK(run({"quotient", "--expr", testing::family_expr(2), "--degree", "3", "--out", dir.string()}).code == 4);
}

TEST_CASE("outputs are deterministic") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  for (const auto& d : {a, b}) {
    REQUIRE(run({"analyze", "--expr", testing::family_expr(2), "--out", d.string()}).code == 0);
    REQUIRE(run({"pi1", "--expr", testing::family_expr(2), "--out", d.string()}).code == 0);
    REQUIRE(run({"quotient", "--expr", testing::family_expr(2), "--out", d.string()}).code == 0);
  }
  for (const char* name : {"critical_points.json", "reeb.json", "reeb.svg", "pi1.json", "quotient.json", "quotient.field"}) {
    CAPTURE(name);
    CHECK(slurp(a / name) == slurp(b / name));
  }
}

TEST_CASE("verify on small fixtures") {
  for (int n = 1; n <= 2; ++n) {
    CAPTURE(n);
    const VerifyReport r = run_verification(n, 512, false, 6);
    for (const auto& c : r.checks) {
      CAPTURE(c.name);
      CAPTURE(c.detail);
      CHECK(c.passed);
    }
    CHECK(r.passed());
    if (n == 1) {
      const auto basis = std::find_if(r.checks.begin(), r.checks.end(), [](const VerifyCheck& c) { return c.name == "slide_basis"; });
      REQUIRE(basis != r.checks.end());
      CHECK(basis->detail.find("trivial") != std::string::npos);
    }
  }
}

TEST_CASE("verify command and the corrupted slide") {
  const fs::path dir = scratch("verify");
  const Run ok = run({"verify", "--fixture-n", "2", "--out", (dir / "ok").string()});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("PASS epi/eval_L: eval(L) = 2") != std::string::npos);
  const auto doc = load_json(dir / "ok" / "verify.json");
  CHECK(doc["passed"] == true);
  std::ifstream kdf(dir / "ok" / "slides.kdf", std::ios::binary);
  REQUIRE(kdf);
  CHECK(read_diffeos(kdf).size() == 2);

  const Run bad = run({"verify", "--fixture-n", "2", "--corrupt-slide", "--out", (dir / "bad").string()});
  CHECK(bad.code == 4);
  CHECK(bad.out.find("FAIL modeldiffeo/slide_invariance") != std::string::npos);
  CHECK(load_json(dir / "bad" / "verify.json")["passed"] == false);
}
