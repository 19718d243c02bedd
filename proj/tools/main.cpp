#include <iostream>
#include <string>
#include <vector>

#include "retecs/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return retecs::cli::run_cli(args, std::cout, std::cerr);
}
