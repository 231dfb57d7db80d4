#include <iostream>
#include <string>
#include <vector>

#include "bdipt/runner.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bdipt::cli_main(args, std::cout, std::cerr);
}
