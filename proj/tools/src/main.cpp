#include <iostream>
#include <string>
#include <vector>

#include "funkgeo/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return funkgeo::run_cli(args, std::cout, std::cerr);
}
