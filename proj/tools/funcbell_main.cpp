#include <iostream>
#include <string>
#include <vector>

#include "funcbell/cli.hpp"

int main(int argc, char** argv) {
  return funcbell::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
