#include <iostream>
#include <string>
#include <vector>

#include "squish_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return squish::cli::run(args, std::cout, std::cerr);
}
