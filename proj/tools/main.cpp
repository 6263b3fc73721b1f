#include <iostream>

#include "deltamap/cli.hpp"

int main(int argc, char** argv) {
  return deltamap::cli::run(argc, argv, std::cout, std::cerr);
}
