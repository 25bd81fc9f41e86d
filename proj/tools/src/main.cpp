#include <iostream>
#include <string>
#include <vector>

#include "gpsim/tools/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gpsim::cli::run(args, std::cout, std::cerr);
}
