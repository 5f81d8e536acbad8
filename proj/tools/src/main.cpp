#include <string>
#include <vector>

#include "jamflow_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return jamflow::cli::run_command(args);
}
