#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kreeb/error.hpp"
#include "kreeb/modeldiffeo.hpp"
#include "kreeb/morse.hpp"

namespace kreeb {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,       // parse errors, unreadable files, non-periodic fields, bad resolution, usage
  kExitDegenerate = 2,  // degenerate critical point
  kExitTopology = 3,    // no cycle, several cycles, level problems, inconsistent topology
  kExitVerify = 4,      // a verification check failed, or the quotient symmetry is missing
  kExitOther = 5,       // any other library error
};

int exit_code_for(ErrorKind kind);

struct VerifyCheck {
  std::string group;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  int n = 1;
  int resolution = 512;
  bool corrupt_slide = false;
  std::vector<VerifyCheck> checks;
  std::vector<GridDiffeo> slides;

  bool passed() const;
  bool group_passed(const std::string& group) const;
};

/// Builds the flat-collar fixture for n and runs the slide, twist, rotation,
/// epimorphism and quotient checks on it. With `corrupt_slide`, s_0 is moved off
/// its collar. Library errors inside a check are recorded as failures.
VerifyReport run_verification(int n, int resolution = 512, bool corrupt_slide = false, int random_isotopies = 20);

std::string verify_report_json(const VerifyReport& report, int indent = 2);

/// {schema, count, points: [{x, y, value, index}]} with index 0 = minimum, 1 = saddle, 2 = maximum.
std::string critical_points_json(const std::vector<CriticalPoint>& points, int indent = 2);

/// Entry point of the command-line tool; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kreeb
