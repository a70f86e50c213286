#include <iostream>
#include <string>
#include <vector>

#include "sobolev_ball/cli.hpp"

int main(int argc, char** argv) {
  return sobolev_ball::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
