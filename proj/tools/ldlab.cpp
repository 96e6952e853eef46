#include <iostream>

#include <unistd.h>

#include "ldlab/cli/app.hpp"

int main(int argc, char** argv) {
  return ldlab::cli::run(argc, argv, std::cout, std::cerr, isatty(STDOUT_FILENO) != 0);
}
