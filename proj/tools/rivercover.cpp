#include <iostream>

#include "rivercover/cli.hpp"

int main(int argc, char** argv) {
  return rivercover::run_cli(argc, argv, std::cout, std::cerr);
}
