#include <iostream>
#include <string>
#include <vector>

#include "ecomp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ecomp::run_cli(args, std::cout, std::cerr);
}
