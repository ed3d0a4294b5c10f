#include <iostream>
#include <string>
#include <vector>

#include "lenctl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return lenctl::cli::run(args, std::cout, std::cerr);
}
