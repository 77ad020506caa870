#include <iostream>
#include <string>
#include <vector>

#include "eqsolve/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return eqsolve::run_cli(std::move(args), std::cout, std::cerr);
}
