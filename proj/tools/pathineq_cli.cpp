#include <iostream>
#include <string>
#include <vector>

#include "pathineq/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return pathineq::cli::run(args, std::cout, std::cerr);
}
