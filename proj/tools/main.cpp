#include <iostream>
#include <string>
#include <vector>

#include "svset/io.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return svset::run_cli(args, std::cout, std::cerr);
}
