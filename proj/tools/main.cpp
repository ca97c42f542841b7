#include <string>
#include <vector>

#include "btoep/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return btoep::run_cli(args);
}
