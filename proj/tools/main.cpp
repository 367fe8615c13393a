#include <iostream>
#include <string>
#include <vector>

#include "tdrc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return tdrc::cli::run(args, std::cout, std::cerr);
}
