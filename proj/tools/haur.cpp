#include <iostream>

#include "haur/cli.hpp"

int main(int argc, char** argv) {
  return haur::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
