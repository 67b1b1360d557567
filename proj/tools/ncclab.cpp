#include <iostream>

#include "ncclab/cli.hpp"

int main(int argc, char** argv) {
  return ncclab::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
