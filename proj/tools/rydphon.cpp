#include <iostream>

#include "rydphon/cli.hpp"

int main(int argc, char** argv) {
  return rydphon::run_cli(argc, argv, std::cout, std::cerr);
}
