#include <iostream>
#include <string>
#include <vector>

#include "mtdup/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return mtdup::cli::run(args, std::cout, std::cerr);
}
