#include <string>
#include <vector>

#include "mc/pipeline.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  mc::RealProcessRunner runner;
  return mc::run_cli(args, runner);
}
