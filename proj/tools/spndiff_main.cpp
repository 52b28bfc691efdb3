#include <iostream>
#include <string>
#include <vector>

#include "spndiff/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return spndiff::run_cli(args, std::cout, std::cerr);
}
