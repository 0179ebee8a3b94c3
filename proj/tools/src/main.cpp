#include <iostream>
#include <string>
#include <vector>

#include "bgev_cli/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return bgev::cli::cli_dispatch(args, std::cout, std::cerr);
}
