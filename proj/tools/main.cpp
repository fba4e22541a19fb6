#include <iostream>
#include <string>
#include <vector>

#include "seqprice/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return seqprice::cli_main(std::move(args), std::cout, std::cerr);
}
