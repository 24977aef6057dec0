#include <iostream>
#include <string>
#include <vector>

#include "affine/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const auto result = affine::run_subcommand(args);
  std::cout << result.out;
  std::cerr << result.err;
  return result.code;
}
