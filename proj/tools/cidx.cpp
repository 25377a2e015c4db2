#include <iostream>

#include "cidx/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return cidx::cli::main(args, std::cout, std::cerr);
}
