#include "cli.hpp"

#include <unistd.h>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return xstring::cli::run(args, std::cin, std::cout, std::cerr, isatty(STDOUT_FILENO) != 0);
}
