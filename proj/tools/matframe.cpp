#include <iostream>
#include <string>
#include <vector>

#include "matframe/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return matframe::cli::run(args, std::cout, std::cerr);
}
