#include <iostream>

#include "fitchmi/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fitchmi::run_cli(args, std::cin, std::cout, std::cerr);
}
