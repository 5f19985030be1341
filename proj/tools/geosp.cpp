#include <iostream>
#include <string>
#include <vector>

#include "geosp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return geosp::run_cli(args, std::cout, std::cerr);
}
