#include <iostream>

#include "tracelens/cli.hpp"

int main(int argc, char** argv) {
  return tracelens::cli::run(argc, argv, std::cout, std::cerr);
}
