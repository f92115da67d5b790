#include <iostream>
#include <string>
#include <vector>

#include "levyou/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return levyou::run_cli(args, std::cout, std::cerr);
}
