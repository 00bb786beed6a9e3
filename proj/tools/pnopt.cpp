#include <iostream>
#include <string>
#include <vector>

#include "pnopt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pnopt::cli_main(args, std::cout, std::cerr);
}
