#include <iostream>
#include <string>
#include <vector>

#include "kreeb/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return kreeb::run_cli(args, std::cout, std::cerr);
}
