#include <iostream>
#include <string>
#include <vector>

#include "ecalign/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ecalign::run_cli(args, std::cout, std::cerr);
}
