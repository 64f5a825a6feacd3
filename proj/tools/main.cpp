#include <iostream>
#include <string>
#include <vector>

#include "emtr/cli.hpp"

int main(int argc, char** argv) {
  return emtr::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
