#include <iostream>
#include <string>
#include <vector>

#include "fisherwatch/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return fisherwatch::cli::run(args, std::cout, std::cerr);
}
