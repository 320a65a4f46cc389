#include <iostream>
#include <string>
#include <vector>

#include "transkit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return transkit::cli::run(args, std::cin, std::cout, std::cerr);
}
