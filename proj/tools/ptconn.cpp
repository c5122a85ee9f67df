#include <iostream>
#include <string>
#include <vector>

#include "ptconn/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  auto r = ptconn::cli::run(args);
  (r.code == 2 ? std::cerr : std::cout) << r.out;
  return r.code;
}
